#include "model.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <string>

#include "error.hpp"

namespace tcbo {

namespace {

// Permutes a factor's table so its scope is ascending. No-op for sorted
// scopes (the common case).
Factor normalize_factor(const Factor& f, const std::vector<int>& cards) {
  Factor out;
  out.scope = f.scope;
  std::sort(out.scope.begin(), out.scope.end());
  std::vector<int> in_cards, out_cards;
  for (int v : f.scope) in_cards.push_back(cards[static_cast<std::size_t>(v)]);
  for (int v : out.scope) out_cards.push_back(cards[static_cast<std::size_t>(v)]);
  if (out.scope == f.scope) {
    out.table = f.table;
    return out;
  }
  const auto map = restriction_map(f.scope, in_cards, out.scope, out_cards);
  out.table.assign(table_size(out_cards), 0.0);
  for (std::size_t i = 0; i < f.table.size(); ++i) out.table[map[i]] = f.table[i];
  return out;
}

}  // namespace

DiscreteModel::DiscreteModel(int var_count, std::vector<int> cardinalities,
                             std::vector<Factor> factors)
    : var_count_(var_count), cards_(std::move(cardinalities)) {
  if (var_count_ <= 0)
    fail(ErrorKind::invalid_argument, "model: var_count must be positive");
  if (static_cast<int>(cards_.size()) != var_count_)
    fail(ErrorKind::dimension_mismatch,
         "model: cardinality list length " + std::to_string(cards_.size()) +
             " does not match var_count " + std::to_string(var_count_));
  for (int c : cards_)
    if (c < 2)
      fail(ErrorKind::invalid_argument,
           "model: cardinalities must be >= 2, got " + std::to_string(c));

  std::map<std::vector<int>, std::size_t> by_scope;
  for (const Factor& raw : factors) {
    if (raw.scope.empty())
      fail(ErrorKind::invalid_argument, "model: factor with empty scope");
    std::vector<int> seen = raw.scope;
    std::sort(seen.begin(), seen.end());
    if (std::adjacent_find(seen.begin(), seen.end()) != seen.end())
      fail(ErrorKind::invalid_argument, "model: factor scope repeats a variable");
    for (int v : raw.scope)
      if (v < 0 || v >= var_count_)
        fail(ErrorKind::invalid_argument,
             "model: factor scope variable " + std::to_string(v) +
                 " out of range");
    std::size_t want = 1;
    for (int v : raw.scope) want *= static_cast<std::size_t>(cards_[v]);
    if (raw.table.size() != want)
      fail(ErrorKind::dimension_mismatch,
           "model: factor table has " + std::to_string(raw.table.size()) +
               " entries, scope requires " + std::to_string(want));
    for (double e : raw.table)
      if (!std::isfinite(e))
        fail(ErrorKind::invalid_argument, "model: non-finite factor entry");

    Factor f = normalize_factor(raw, cards_);
    auto it = by_scope.find(f.scope);
    if (it == by_scope.end()) {
      by_scope.emplace(f.scope, factors_.size());
      factors_.push_back(std::move(f));
    } else {
      auto& dst = factors_[it->second].table;
      for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += f.table[i];
    }
  }

  unary_index_.assign(static_cast<std::size_t>(var_count_), -1);
  pair_index_.assign(static_cast<std::size_t>(var_count_), {});
  for (std::size_t k = 0; k < factors_.size(); ++k) {
    const auto& sc = factors_[k].scope;
    max_arity_ = std::max(max_arity_, static_cast<int>(sc.size()));
    if (sc.size() == 1) unary_index_[sc[0]] = static_cast<int>(k);
    if (sc.size() == 2) {
      pair_index_[sc[0]].push_back(sc[1]);
      pair_index_[sc[0]].push_back(static_cast<int>(k));
    }
  }
}

double DiscreteModel::log2_state_count() const {
  double b = 0.0;
  for (int c : cards_) b += std::log2(static_cast<double>(c));
  return b;
}

std::vector<std::pair<int, int>> DiscreteModel::pairwise_edges() const {
  std::vector<std::pair<int, int>> out;
  for (const auto& f : factors_)
    if (f.scope.size() == 2) out.emplace_back(f.scope[0], f.scope[1]);
  return out;
}

int DiscreteModel::unary_factor_index(int v) const {
  if (v < 0 || v >= var_count_) return -1;
  return unary_index_[static_cast<std::size_t>(v)];
}

int DiscreteModel::pair_factor_index(int i, int j) const {
  if (i > j) std::swap(i, j);
  if (i < 0 || j >= var_count_) return -1;
  const auto& row = pair_index_[static_cast<std::size_t>(i)];
  for (std::size_t k = 0; k + 1 < row.size(); k += 2)
    if (row[k] == j) return row[k + 1];
  return -1;
}

double energy(const DiscreteModel& m, const Assignment& x) {
  if (static_cast<int>(x.size()) != m.var_count())
    fail(ErrorKind::dimension_mismatch,
         "energy: assignment length " + std::to_string(x.size()) +
             " does not match var_count " + std::to_string(m.var_count()));
  for (int v = 0; v < m.var_count(); ++v)
    if (x[v] < 0 || x[v] >= m.cardinality(v))
      fail(ErrorKind::invalid_argument,
           "energy: value " + std::to_string(x[v]) + " out of range for variable " +
               std::to_string(v));
  double e = 0.0;
  for (const Factor& f : m.factors()) {
    std::size_t idx = 0;
    for (int v : f.scope)
      idx = idx * static_cast<std::size_t>(m.cardinality(v)) +
            static_cast<std::size_t>(x[static_cast<std::size_t>(v)]);
    e += f.table[idx];
  }
  return e;
}

DiscreteModel gen_spin_glass(int rows, int cols, double coupling_half_width,
                             double field_half_width, std::uint64_t seed) {
  if (rows < 1 || cols < 1)
    fail(ErrorKind::invalid_argument, "gen_spin_glass: grid dims must be >= 1");
  if (coupling_half_width < 0.0 || field_half_width < 0.0)
    fail(ErrorKind::invalid_argument,
         "gen_spin_glass: half-widths must be non-negative");

  std::mt19937_64 rng(seed);
  auto unif = [&rng](double half_width) {
    // Top 53 bits -> [0,1); fixed mapping so streams are portable.
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return -half_width + 2.0 * half_width * u;
  };

  const int n = rows * cols;
  std::vector<std::pair<int, int>> edges;
  std::vector<double> J;
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      const int v = r * cols + c;
      if (c + 1 < cols) {
        edges.emplace_back(v, v + 1);
        J.push_back(unif(coupling_half_width));
      }
      if (r + 1 < rows) {
        edges.emplace_back(v, v + cols);
        J.push_back(unif(coupling_half_width));
      }
    }
  std::vector<double> h(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v) h[static_cast<std::size_t>(v)] = unif(field_half_width);

  std::vector<Factor> factors;
  factors.reserve(edges.size() + static_cast<std::size_t>(n));
  for (std::size_t k = 0; k < edges.size(); ++k) {
    // s(0) = -1, s(1) = +1: table over (x_i, x_j), x_j fastest.
    const double w = J[k];
    factors.push_back({{edges[k].first, edges[k].second}, {w, -w, -w, w}});
  }
  for (int v = 0; v < n; ++v)
    factors.push_back({{v}, {-h[static_cast<std::size_t>(v)], h[static_cast<std::size_t>(v)]}});

  return DiscreteModel(n, std::vector<int>(static_cast<std::size_t>(n), 2),
                       std::move(factors));
}

}  // namespace tcbo
