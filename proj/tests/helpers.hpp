#pragma once

// Shared fixtures for the test binaries: deterministic random models and a
// few naive re-implementations used as second routes to library results.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "model.hpp"
#include "region_graph.hpp"
#include "solvers.hpp"

namespace testutil {

inline std::vector<double> rand_table(std::mt19937_64& rng, std::size_t n,
                                      double half_width = 2.0) {
  std::uniform_real_distribution<double> u(-half_width, half_width);
  std::vector<double> t(n);
  for (double& x : t) x = u(rng);
  return t;
}

// Chain of 2..8 variables with mixed cardinalities 2..3 and arbitrary unary
// and pairwise tables, all derived from the seed.
inline tcbo::DiscreteModel make_chain_model(unsigned seed) {
  std::mt19937_64 rng(seed);
  const int n = 2 + static_cast<int>(rng() % 7);
  std::vector<int> cards(static_cast<std::size_t>(n));
  for (auto& c : cards) c = 2 + static_cast<int>(rng() % 2);
  std::vector<tcbo::Factor> fs;
  for (int v = 0; v < n; ++v)
    fs.push_back({{v}, rand_table(rng, static_cast<std::size_t>(cards[static_cast<std::size_t>(v)]))});
  for (int v = 0; v + 1 < n; ++v)
    fs.push_back({{v, v + 1},
                  rand_table(rng, static_cast<std::size_t>(cards[static_cast<std::size_t>(v)] *
                                                           cards[static_cast<std::size_t>(v + 1)]))});
  return tcbo::DiscreteModel(n, std::move(cards), std::move(fs));
}

// Three binary variables, fully connected: the smallest pairwise model whose
// edges are not a grid and not a path.
inline tcbo::DiscreteModel make_triangle_model(unsigned seed) {
  std::mt19937_64 rng(seed);
  std::vector<tcbo::Factor> fs;
  for (int v = 0; v < 3; ++v) fs.push_back({{v}, rand_table(rng, 2)});
  fs.push_back({{0, 1}, rand_table(rng, 4)});
  fs.push_back({{0, 2}, rand_table(rng, 4)});
  fs.push_back({{1, 2}, rand_table(rng, 4)});
  return tcbo::DiscreteModel(3, {2, 2, 2}, std::move(fs));
}

// Single pairwise factor plus both unaries over two binary variables.
inline tcbo::DiscreteModel make_single_edge_model(unsigned seed) {
  std::mt19937_64 rng(seed);
  std::vector<tcbo::Factor> fs;
  fs.push_back({{0, 1}, rand_table(rng, 4, 3.0)});
  fs.push_back({{0}, rand_table(rng, 2, 3.0)});
  fs.push_back({{1}, rand_table(rng, 2, 3.0)});
  return tcbo::DiscreteModel(2, {2, 2}, std::move(fs));
}

inline double naive_lse(const std::vector<double>& t) {
  double m = *std::max_element(t.begin(), t.end());
  double s = 0.0;
  for (double x : t) s += std::exp(x - m);
  return m + std::log(s);
}

inline double rel_gap(double a, double b) {
  return std::abs(a - b) / std::max({1e-12, std::abs(a), std::abs(b)});
}

// Largest bound increase between consecutive trace rows (0 when monotone).
inline double worst_rise(const tcbo::SolverTrace& t) {
  double w = 0.0;
  for (std::size_t i = 1; i < t.rows.size(); ++i)
    w = std::max(w, t.rows[i].bound - t.rows[i - 1].bound);
  return w;
}

// Sum of per-region tables evaluated at the restriction of a full assignment;
// the naive way to check that region potentials add up to the model energy.
inline double eval_regions_at(const tcbo::RegionGraph& g,
                              const std::vector<std::vector<double>>& tables,
                              const tcbo::Assignment& x) {
  double total = 0.0;
  for (std::size_t r = 0; r < g.regions().size(); ++r) {
    const auto& scope = g.regions()[r].scope;
    std::size_t idx = 0;
    for (int v : scope)
      idx = idx * static_cast<std::size_t>(g.cardinalities()[static_cast<std::size_t>(v)]) +
            static_cast<std::size_t>(x[static_cast<std::size_t>(v)]);
    total += tables[r][idx];
  }
  return total;
}

}  // namespace testutil
