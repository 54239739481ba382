#pragma once

#include <vector>

#include "mfstop/lattice.hpp"

namespace mfstop {

// Adapted stopping rule on a depth-N binary tree: a stop/continue decision
// per node with k < N, forced stop at depth N. Adaptedness is structural
// (decisions are keyed by the own-path prefix only). Canonical form: every
// node below a stop decision, and every node never reached, carries 0.
struct StoppingRule {
  int N = 0;
  std::vector<std::uint8_t> stop;  // indexed by LatticeModel::node_id, k < N

  bool stops_at(int k, int prefix) const {
    return stop[static_cast<std::size_t>(LatticeModel::node_id(k, prefix))] != 0;
  }

  // First stop index along a full path (length-N prefix); N if none.
  int stop_index(int path) const {
    for (int k = 0; k < N; ++k)
      if (stops_at(k, path & ((1 << k) - 1))) return k;
    return N;
  }
};

// Always-stop-at-k rule (deterministic time).
StoppingRule constant_rule(int N, int k);

// All canonical adapted rules for depth N. Counts follow
// count(d) = 1 + count(d-1)^2 with count(1) = 2; capped at N <= 3.
std::vector<StoppingRule> enumerate_rules(int N);

}  // namespace mfstop
