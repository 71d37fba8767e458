#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "tables.hpp"

namespace tcbo {

// One value per variable, in variable order.
using Assignment = std::vector<int>;

// Log-potential over an ordered scope; table is dense row-major with the
// last scope variable fastest.
struct Factor {
  std::vector<int> scope;
  std::vector<double> table;
};

// Discrete model in log-potential form: the score of a joint assignment is
// the sum of its factor entries, and inference maximizes it. Scopes are
// normalized to ascending variable order at construction (tables permuted
// accordingly) and factors with the same scope set are merged by adding
// tables, so downstream code sees at most one factor per scope.
class DiscreteModel {
 public:
  DiscreteModel(int var_count, std::vector<int> cardinalities,
                std::vector<Factor> factors);

  int var_count() const { return var_count_; }
  const std::vector<int>& cardinalities() const { return cards_; }
  int cardinality(int v) const { return cards_[static_cast<std::size_t>(v)]; }
  const std::vector<Factor>& factors() const { return factors_; }

  bool is_pairwise() const { return max_arity_ <= 2; }
  int max_arity() const { return max_arity_; }
  double log2_state_count() const;

  // Sorted (i, j) scopes of the arity-2 factors, in factor order.
  std::vector<std::pair<int, int>> pairwise_edges() const;
  // Index into factors() of the arity-1 factor on v, or -1.
  int unary_factor_index(int v) const;
  // Index into factors() of the arity-2 factor on sorted pair (i, j), or -1.
  int pair_factor_index(int i, int j) const;

 private:
  int var_count_;
  std::vector<int> cards_;
  std::vector<Factor> factors_;
  int max_arity_ = 0;
  std::vector<int> unary_index_;            // per variable, -1 if absent
  std::vector<std::vector<int>> pair_index_;  // per low endpoint: (high, factor)
};

// Sum of factor entries at x; x must assign every variable a value within
// its cardinality.
double energy(const DiscreteModel& m, const Assignment& x);

// rows x cols binary grid with 4-neighbor couplings. In spin convention
// s(0) = -1, s(1) = +1: pair potentials J_ij * s(x_i) s(x_j), unary
// potentials h_i * s(x_i), J ~ U[-coupling_half_width, +coupling_half_width],
// h ~ U[-field_half_width, +field_half_width]. The generator is a seeded
// std::mt19937_64 with one draw per number, mapped to [lo, hi) via the top
// 53 bits; draw order is couplings first (cells row-major, right edge then
// down edge), then fields in variable order. Identical seeds reproduce
// identical models on any platform.
DiscreteModel gen_spin_glass(int rows, int cols, double coupling_half_width,
                             double field_half_width, std::uint64_t seed);

}  // namespace tcbo
