#pragma once

#include <utility>
#include <vector>

#include "model.hpp"

namespace tcbo {

struct ExactResult {
  double log_partition;
  double map_value;
  Assignment map_assignment;                // lowest-lex among maximizers
  std::vector<std::vector<double>> marginals;  // per variable, sums to 1
};

// Exhaustive enumeration in table order (last variable fastest). Refuses
// models with more than 2^20 joint states. log_partition uses a max-shifted
// accumulation; the MAP tie-break keeps the first maximizer in enumeration
// order, which is the lexicographically smallest.
ExactResult brute_force(const DiscreteModel& m);

struct TreeDpResult {
  double value;          // log partition (sum mode) or maximum (max mode)
  Assignment argmax;     // max mode only; empty in sum mode
};

// Exact inference on an acyclic pairwise structure given directly as
// potentials: node_potentials[v] is a log table over x_v (may be all zero),
// edge_potentials[k] is a log table over (edges[k].first, edges[k].second)
// with the second variable fastest. Forests are handled per component;
// a cycle raises not_a_tree. Max-mode ties resolve to the lowest value.
TreeDpResult tree_dp(const std::vector<std::vector<double>>& node_potentials,
                     const std::vector<std::vector<double>>& edge_potentials,
                     const std::vector<std::pair<int, int>>& edges,
                     const std::vector<int>& cards, Mode mode);

// tree_dp over a pairwise model's own factors (unary + pairwise tables).
// Structure must be acyclic.
TreeDpResult tree_dp_model(const DiscreteModel& m, Mode mode);

}  // namespace tcbo
