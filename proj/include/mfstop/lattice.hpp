#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "mfstop/errors.hpp"

namespace mfstop {

// Exact joint binomial tree over n particles and N steps: each particle
// moves +-sqrt(dt) with probability 1/2 per step, independently. Particle
// i's filtration is its own path prefix; conditional expectations w.r.t.
// it are exact averages over the other particles' branches.
//
// Node addressing for one particle's binary tree: a prefix of length k is
// the integer whose bit j is the step taken at time t_j, bit value 1
// meaning an up move. Node id = (1 << k) - 1 + prefix; the children of
// prefix b at level k are b and b | (1 << k) at level k + 1.
struct LatticeModel {
  int n = 1;
  int N = 1;
  double dt = 1.0;
  std::vector<double> initials;         // per particle
  std::uint64_t path_cap = 1u << 20;    // max joint paths 2^(N*n)

  std::uint64_t joint_paths() const { return std::uint64_t{1} << (N * n); }
  void check_cap() const {
    if (N * n >= 63 || joint_paths() > path_cap)
      throw InstanceTooLarge(
          "lattice instance exceeds the joint-path cap", joint_paths());
  }

  int nodes() const { return (1 << (N + 1)) - 1; }
  static int node_id(int k, int prefix) { return (1 << k) - 1 + prefix; }

  // State of particle i after following `prefix` for k steps.
  double state(int i, int k, int prefix) const {
    int ups = 0;
    for (int b = 0; b < k; ++b) ups += (prefix >> b) & 1;
    return initials[static_cast<std::size_t>(i)] +
           std::sqrt(dt) * (2 * ups - k);
  }
};

// A process adapted to one particle's filtration: one value per tree node.
using TreeValues = std::vector<double>;

// Average of f over all joint length-k prefixes of the other n-1 particles,
// with particle `i` pinned to `prefix_i`. f receives the full vector of
// per-particle prefixes.
double condexp_over_others(
    const LatticeModel& model, int i, int k, int prefix_i,
    const std::function<double(const std::vector<int>&)>& f);

// Exact backward induction on particle i's tree:
//   Y(N, b) = xi(b),  Y(k, b) = max(L(k, b), average of children).
// L holds obstacle values at nodes with k < N; xi maps a full path prefix
// (length N) to the terminal payoff.
TreeValues exact_lattice_value(const LatticeModel& model,
                               const TreeValues& obstacle,
                               const std::function<double(int)>& xi);

// Mean of an adapted tree process at level k (all prefixes equally likely).
double tree_level_mean(const TreeValues& values, int k);

}  // namespace mfstop
