#include "mfstop/lattice.hpp"

#include <cmath>

namespace mfstop {

double condexp_over_others(
    const LatticeModel& model, int i, int k, int prefix_i,
    const std::function<double(const std::vector<int>&)>& f) {
  model.check_cap();
  const int others = model.n - 1;
  const std::uint64_t combos = std::uint64_t{1}
                               << static_cast<unsigned>(others * k);
  std::vector<int> prefixes(static_cast<std::size_t>(model.n), 0);
  prefixes[static_cast<std::size_t>(i)] = prefix_i;
  double acc = 0.0;
  for (std::uint64_t c = 0; c < combos; ++c) {
    std::uint64_t rest = c;
    for (int j = 0; j < model.n; ++j) {
      if (j == i) continue;
      prefixes[static_cast<std::size_t>(j)] =
          static_cast<int>(rest & ((std::uint64_t{1} << k) - 1));
      rest >>= k;
    }
    acc += f(prefixes);
  }
  return acc / static_cast<double>(combos);
}

TreeValues exact_lattice_value(const LatticeModel& model,
                               const TreeValues& obstacle,
                               const std::function<double(int)>& xi) {
  model.check_cap();
  const int N = model.N;
  TreeValues Y(static_cast<std::size_t>(model.nodes()), 0.0);
  for (int b = 0; b < (1 << N); ++b)
    Y[static_cast<std::size_t>(LatticeModel::node_id(N, b))] = xi(b);
  for (int k = N - 1; k >= 0; --k) {
    for (int b = 0; b < (1 << k); ++b) {
      const double up = Y[static_cast<std::size_t>(
          LatticeModel::node_id(k + 1, b | (1 << k)))];
      const double dn =
          Y[static_cast<std::size_t>(LatticeModel::node_id(k + 1, b))];
      const double cont = 0.5 * (up + dn);
      const double l =
          obstacle[static_cast<std::size_t>(LatticeModel::node_id(k, b))];
      Y[static_cast<std::size_t>(LatticeModel::node_id(k, b))] =
          std::max(l, cont);
    }
  }
  return Y;
}

double tree_level_mean(const TreeValues& values, int k) {
  const int count = 1 << k;
  double acc = 0.0;
  for (int b = 0; b < count; ++b)
    acc += values[static_cast<std::size_t>(LatticeModel::node_id(k, b))];
  return acc / count;
}

}  // namespace mfstop
