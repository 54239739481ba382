#include "mfstop/rules.hpp"

namespace mfstop {

StoppingRule constant_rule(int N, int k) {
  StoppingRule r;
  r.N = N;
  r.stop.assign(static_cast<std::size_t>((1 << N) - 1), 0);
  if (k < N)
    for (int b = 0; b < (1 << k); ++b)
      r.stop[static_cast<std::size_t>(LatticeModel::node_id(k, b))] = 1;
  return r;
}

namespace {

// Enumerates sub-rules for the subtree rooted at (k, prefix) of a depth-N
// tree, writing decisions into `flags` and emitting complete rules via
// `emit` once the root of the recursion is resolved.
void enumerate_subtree(int N, int k, int prefix, std::vector<std::uint8_t>& flags,
                       const std::function<void()>& emit) {
  if (k == N) {  // forced stop, nothing to decide
    emit();
    return;
  }
  const std::size_t id =
      static_cast<std::size_t>(LatticeModel::node_id(k, prefix));
  flags[id] = 1;  // stop here; deeper nodes stay canonical 0
  emit();
  flags[id] = 0;  // continue: independent choices on both children
  enumerate_subtree(N, k + 1, prefix, flags, [&]() {
    enumerate_subtree(N, k + 1, prefix | (1 << k), flags, emit);
  });
}

}  // namespace

std::vector<StoppingRule> enumerate_rules(int N) {
  if (N < 1) throw ConfigError("enumerate_rules: depth must be >= 1");
  if (N > 3)
    throw ConfigError(
        "enumerate_rules: depth cap is 3 (rule count is doubly exponential)");
  std::vector<StoppingRule> rules;
  std::vector<std::uint8_t> flags(static_cast<std::size_t>((1 << N) - 1), 0);
  enumerate_subtree(N, 0, 0, flags, [&]() {
    StoppingRule r;
    r.N = N;
    r.stop = flags;
    rules.push_back(std::move(r));
  });
  return rules;
}

}  // namespace mfstop
