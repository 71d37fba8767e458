#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "error.hpp"
#include "logsum.hpp"
#include "solvers.hpp"

namespace tcbo {

namespace {

std::vector<double> normalized_exp(std::vector<double> t) {
  const double z = log_sum_exp(t);
  for (double& v : t) v = std::exp(v - z);
  return t;
}

}  // namespace

std::vector<double> heskes_to_mplp_transform(const std::vector<double>& mu,
                                             const std::vector<double>& theta_ij,
                                             int card_i, int card_j) {
  if (mu.size() != theta_ij.size() ||
      mu.size() != static_cast<std::size_t>(card_i) * static_cast<std::size_t>(card_j))
    fail(ErrorKind::dimension_mismatch, "edge message and pair table sizes differ");
  std::vector<double> out(static_cast<std::size_t>(card_i), kNegInf);
  for (int a = 0; a < card_i; ++a)
    for (int b = 0; b < card_j; ++b) {
      const std::size_t idx =
          static_cast<std::size_t>(a) * static_cast<std::size_t>(card_j) +
          static_cast<std::size_t>(b);
      out[static_cast<std::size_t>(a)] = std::max(
          out[static_cast<std::size_t>(a)], 0.5 * theta_ij[idx] + mu[idx]);
    }
  return out;
}

MplpSolver::MplpSolver(const DiscreteModel& m, const SolverConfig& cfg)
    : model_(&m), cfg_(cfg) {
  check_config(cfg_);
  if (cfg_.mode != Mode::max)
    fail(ErrorKind::invalid_argument,
         "mplp maximizes; use heskes on a star-edge graph for the sum version");
  if (!m.is_pairwise())
    fail(ErrorKind::unsupported_structure,
         "mplp needs a pairwise model (max arity " + std::to_string(m.max_arity()) +
             ")");
  edges_ = m.pairwise_edges();
  const int n = m.var_count();
  unary_.resize(static_cast<std::size_t>(n));
  incident_.resize(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v) {
    const int f = m.unary_factor_index(v);
    unary_[static_cast<std::size_t>(v)] =
        f >= 0 ? m.factors()[static_cast<std::size_t>(f)].table
               : std::vector<double>(static_cast<std::size_t>(m.cardinality(v)), 0.0);
  }
  pair_table_.resize(edges_.size());
  lambda_.resize(2 * edges_.size());
  gamma_at_update_.resize(2 * edges_.size());
  for (std::size_t k = 0; k < edges_.size(); ++k) {
    const int i = edges_[k].first, j = edges_[k].second;
    incident_[static_cast<std::size_t>(i)].push_back(static_cast<int>(k));
    incident_[static_cast<std::size_t>(j)].push_back(static_cast<int>(k));
    pair_table_[k] =
        m.factors()[static_cast<std::size_t>(m.pair_factor_index(i, j))].table;
    const int ci = m.cardinality(i), cj = m.cardinality(j);
    std::vector<double> half(pair_table_[k].size());
    for (std::size_t t = 0; t < half.size(); ++t) half[t] = 0.5 * pair_table_[k][t];
    // The compact image of the all-zero message state: each side starts at
    // the max-projection of half the pair table.
    lambda_[2 * k].assign(static_cast<std::size_t>(ci), kNegInf);
    lambda_[2 * k + 1].assign(static_cast<std::size_t>(cj), kNegInf);
    for (int a = 0; a < ci; ++a)
      for (int b = 0; b < cj; ++b) {
        const double t = half[static_cast<std::size_t>(a) * static_cast<std::size_t>(cj) +
                              static_cast<std::size_t>(b)];
        auto& la = lambda_[2 * k][static_cast<std::size_t>(a)];
        auto& lb = lambda_[2 * k + 1][static_cast<std::size_t>(b)];
        la = std::max(la, t);
        lb = std::max(lb, t);
      }
    gamma_at_update_[2 * k].assign(static_cast<std::size_t>(ci), 0.0);
    gamma_at_update_[2 * k + 1].assign(static_cast<std::size_t>(cj), 0.0);
  }
  graph_ = std::make_unique<RegionGraph>(build_star_edge(m));
}

std::vector<double> MplpSolver::aggregate(int v, int skip_edge) const {
  std::vector<double> out = unary_[static_cast<std::size_t>(v)];
  for (int k : incident_[static_cast<std::size_t>(v)]) {
    if (k == skip_edge) continue;
    const int side = edges_[static_cast<std::size_t>(k)].first == v ? 0 : 1;
    const auto& l = lambda_[2 * static_cast<std::size_t>(k) + static_cast<std::size_t>(side)];
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += l[i];
  }
  return out;
}

void MplpSolver::sweep() {
  for (std::size_t k = 0; k < edges_.size(); ++k) {
    const int i = edges_[k].first, j = edges_[k].second;
    const int ci = model_->cardinality(i), cj = model_->cardinality(j);
    // Both directions update together from the aggregates before the update.
    std::vector<double> gi = aggregate(i, static_cast<int>(k));
    std::vector<double> gj = aggregate(j, static_cast<int>(k));
    const auto& T = pair_table_[k];
    std::vector<double>& li = lambda_[2 * k];
    std::vector<double>& lj = lambda_[2 * k + 1];
    for (int a = 0; a < ci; ++a) {
      double best = kNegInf;
      for (int b = 0; b < cj; ++b)
        best = std::max(best, T[static_cast<std::size_t>(a) * static_cast<std::size_t>(cj) +
                                static_cast<std::size_t>(b)] +
                                  gj[static_cast<std::size_t>(b)]);
      li[static_cast<std::size_t>(a)] = 0.5 * best - 0.5 * gi[static_cast<std::size_t>(a)];
    }
    for (int b = 0; b < cj; ++b) {
      double best = kNegInf;
      for (int a = 0; a < ci; ++a)
        best = std::max(best, T[static_cast<std::size_t>(a) * static_cast<std::size_t>(cj) +
                                static_cast<std::size_t>(b)] +
                                  gi[static_cast<std::size_t>(a)]);
      lj[static_cast<std::size_t>(b)] = 0.5 * best - 0.5 * gj[static_cast<std::size_t>(b)];
    }
    gamma_at_update_[2 * k] = std::move(gi);
    gamma_at_update_[2 * k + 1] = std::move(gj);
  }
}

double MplpSolver::bound() const {
  double total = 0.0;
  for (int v = 0; v < model_->var_count(); ++v) total += max_value(aggregate(v, -1));
  return total;
}

const std::vector<double>& MplpSolver::message(int edge_index, int endpoint_side) const {
  return lambda_[2 * static_cast<std::size_t>(edge_index) +
                 static_cast<std::size_t>(endpoint_side)];
}

std::vector<double> MplpSolver::node_belief(int v) const {
  return normalized_exp(aggregate(v, -1));
}

std::vector<std::vector<double>> MplpSolver::variable_beliefs() const {
  std::vector<std::vector<double>> out(static_cast<std::size_t>(model_->var_count()));
  for (int v = 0; v < model_->var_count(); ++v)
    out[static_cast<std::size_t>(v)] = node_belief(v);
  return out;
}

std::vector<double> MplpSolver::edge_belief(int edge_index) const {
  const std::size_t k = static_cast<std::size_t>(edge_index);
  const int i = edges_[k].first, j = edges_[k].second;
  const int cj = model_->cardinality(j);
  const std::vector<double> gi = aggregate(i, edge_index);
  const std::vector<double> gj = aggregate(j, edge_index);
  std::vector<double> t = pair_table_[k];
  for (std::size_t a = 0; a < gi.size(); ++a)
    for (std::size_t b = 0; b < gj.size(); ++b)
      t[a * static_cast<std::size_t>(cj) + b] += gi[a] + gj[b];
  return normalized_exp(std::move(t));
}

MessageLedger MplpSolver::equivalent_ledger() const {
  MessageLedger ledger(*graph_);
  for (std::size_t k = 0; k < edges_.size(); ++k) {
    const int ci = model_->cardinality(edges_[k].first);
    const int cj = model_->cardinality(edges_[k].second);
    const auto& gi = gamma_at_update_[2 * k];
    const auto& gj = gamma_at_update_[2 * k + 1];
    // After an edge's update its two nets are separable in the aggregates the
    // update saw; between updates they do not move, so this is exact.
    std::vector<double>& ni = ledger.net(static_cast<int>(2 * k));
    std::vector<double>& nj = ledger.net(static_cast<int>(2 * k + 1));
    for (int a = 0; a < ci; ++a)
      for (int b = 0; b < cj; ++b) {
        const std::size_t idx =
            static_cast<std::size_t>(a) * static_cast<std::size_t>(cj) +
            static_cast<std::size_t>(b);
        ni[idx] = 0.5 * (gi[static_cast<std::size_t>(a)] - gj[static_cast<std::size_t>(b)]);
        nj[idx] = -ni[idx];
      }
  }
  return ledger;
}

}  // namespace tcbo
