#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "error.hpp"
#include "logsum.hpp"
#include "solvers.hpp"

namespace tcbo {

ChainSolver::ChainSolver(const DiscreteModel& m, const TreeDecomposition& d,
                         const SolverConfig& cfg, Schedule schedule)
    : model_(&m), decomp_(&d), cfg_(cfg), schedule_(schedule) {
  check_config(cfg_);
  if (!m.is_pairwise())
    fail(ErrorKind::unsupported_structure,
         "chain message passing needs a pairwise model (max arity " +
             std::to_string(m.max_arity()) + ")");
  edges_ = m.pairwise_edges();
  rho_ = d.rho;
  if (rho_.size() != edges_.size())
    fail(ErrorKind::invalid_argument,
         "decomposition covers a different edge set than the model");
  for (double r : rho_)
    if (!(r > 0.0))
      fail(ErrorKind::invalid_argument,
           "every model edge needs a positive appearance weight");
  if (!check_monotonic(d, m.var_count()))
    fail(ErrorKind::schedule_invalid,
         "node order is not monotonic along the decomposition's chains");

  const int n = m.var_count();
  order_pos_.assign(static_cast<std::size_t>(n), -1);
  for (std::size_t p = 0; p < d.node_order.size(); ++p)
    order_pos_[static_cast<std::size_t>(d.node_order[p])] = static_cast<int>(p);

  unary_.resize(static_cast<std::size_t>(n));
  incident_.resize(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v) {
    const int f = m.unary_factor_index(v);
    unary_[static_cast<std::size_t>(v)] =
        f >= 0 ? m.factors()[static_cast<std::size_t>(f)].table
               : std::vector<double>(static_cast<std::size_t>(m.cardinality(v)), 0.0);
  }
  pair_table_.resize(edges_.size());
  msg_.resize(2 * edges_.size());
  for (std::size_t k = 0; k < edges_.size(); ++k) {
    const int i = edges_[k].first, j = edges_[k].second;
    incident_[static_cast<std::size_t>(i)].push_back(static_cast<int>(k));
    incident_[static_cast<std::size_t>(j)].push_back(static_cast<int>(k));
    pair_table_[k] =
        m.factors()[static_cast<std::size_t>(m.pair_factor_index(i, j))].table;
    msg_[2 * k].assign(static_cast<std::size_t>(m.cardinality(j)), 0.0);
    msg_[2 * k + 1].assign(static_cast<std::size_t>(m.cardinality(i)), 0.0);
  }
}

double ChainSolver::update_message(int edge, int from) {
  const std::size_t k = static_cast<std::size_t>(edge);
  const int i = edges_[k].first, j = edges_[k].second;
  const bool from_first = from == i;
  const int to = from_first ? j : i;
  const double rho = rho_[k];
  const int cf = model_->cardinality(from), ct = model_->cardinality(to);

  // Reweighted aggregate at the sender, with the reverse message discounted.
  std::vector<double> base = unary_[static_cast<std::size_t>(from)];
  for (int k2 : incident_[static_cast<std::size_t>(from)]) {
    if (k2 == edge) continue;
    const auto& in = edges_[static_cast<std::size_t>(k2)].first == from
                         ? msg_[2 * static_cast<std::size_t>(k2) + 1]
                         : msg_[2 * static_cast<std::size_t>(k2)];
    for (int x = 0; x < cf; ++x)
      base[static_cast<std::size_t>(x)] +=
          rho_[static_cast<std::size_t>(k2)] * in[static_cast<std::size_t>(x)];
  }
  const auto& back = from_first ? msg_[2 * k + 1] : msg_[2 * k];
  for (int x = 0; x < cf; ++x)
    base[static_cast<std::size_t>(x)] -= (1.0 - rho) * back[static_cast<std::size_t>(x)];

  const auto& T = pair_table_[k];
  const int cj = model_->cardinality(j);
  std::vector<double> out(static_cast<std::size_t>(ct));
  std::vector<double> vals(static_cast<std::size_t>(cf));
  for (int y = 0; y < ct; ++y) {
    for (int x = 0; x < cf; ++x) {
      const int a = from_first ? x : y;
      const int b = from_first ? y : x;
      vals[static_cast<std::size_t>(x)] =
          base[static_cast<std::size_t>(x)] +
          T[static_cast<std::size_t>(a) * static_cast<std::size_t>(cj) +
            static_cast<std::size_t>(b)] /
              rho;
    }
    out[static_cast<std::size_t>(y)] =
        cfg_.mode == Mode::sum ? log_sum_exp(vals) : max_value(vals);
  }
  const double shift = max_value(out);
  for (double& v : out) v -= shift;

  std::vector<double>& slot = from_first ? msg_[2 * k] : msg_[2 * k + 1];
  double change = 0.0;
  for (int y = 0; y < ct; ++y)
    change = std::max(change, std::abs(out[static_cast<std::size_t>(y)] -
                                       slot[static_cast<std::size_t>(y)]));
  slot = std::move(out);
  return change;
}

double ChainSolver::sweep() {
  const auto& order = decomp_->node_order;
  double change = 0.0;
  auto visit = [&](int v, bool toward_later) {
    for (int k : incident_[static_cast<std::size_t>(v)]) {
      const auto& e = edges_[static_cast<std::size_t>(k)];
      const int other = e.first == v ? e.second : e.first;
      if (schedule_ == Schedule::forward_only ||
          (order_pos_[static_cast<std::size_t>(other)] >
           order_pos_[static_cast<std::size_t>(v)]) == toward_later)
        change = std::max(change, update_message(k, v));
    }
  };
  for (std::size_t p = 0; p < order.size(); ++p) visit(order[p], true);
  if (schedule_ == Schedule::forward_backward)
    for (std::size_t p = order.size(); p-- > 0;) visit(order[p], false);
  return change;
}

std::vector<double> ChainSolver::log_node_belief(int v) const {
  std::vector<double> t = unary_[static_cast<std::size_t>(v)];
  for (int k : incident_[static_cast<std::size_t>(v)]) {
    const auto& in = edges_[static_cast<std::size_t>(k)].first == v
                         ? msg_[2 * static_cast<std::size_t>(k) + 1]
                         : msg_[2 * static_cast<std::size_t>(k)];
    for (std::size_t x = 0; x < t.size(); ++x)
      t[x] += rho_[static_cast<std::size_t>(k)] * in[x];
  }
  return t;
}

std::vector<double> ChainSolver::log_edge_belief(int k) const {
  const std::size_t ks = static_cast<std::size_t>(k);
  const int i = edges_[ks].first, j = edges_[ks].second;
  const int ci = model_->cardinality(i), cj = model_->cardinality(j);
  std::vector<double> ai = log_node_belief(i);
  std::vector<double> aj = log_node_belief(j);
  // b_ij is the pair term at 1/rho strength flanked by the node aggregates
  // with the crossing message divided back out once.
  const auto& mji = msg_[2 * ks + 1];
  const auto& mij = msg_[2 * ks];
  for (int a = 0; a < ci; ++a) ai[static_cast<std::size_t>(a)] -= mji[static_cast<std::size_t>(a)];
  for (int b = 0; b < cj; ++b) aj[static_cast<std::size_t>(b)] -= mij[static_cast<std::size_t>(b)];
  const auto& T = pair_table_[ks];
  std::vector<double> s(static_cast<std::size_t>(ci) * static_cast<std::size_t>(cj));
  for (int a = 0; a < ci; ++a)
    for (int b = 0; b < cj; ++b) {
      const std::size_t idx = static_cast<std::size_t>(a) * static_cast<std::size_t>(cj) +
                              static_cast<std::size_t>(b);
      s[idx] = T[idx] / rho_[ks] + ai[static_cast<std::size_t>(a)] +
               aj[static_cast<std::size_t>(b)];
    }
  return s;
}

std::vector<std::vector<double>> ChainSolver::variable_beliefs() const {
  std::vector<std::vector<double>> out(static_cast<std::size_t>(model_->var_count()));
  for (int v = 0; v < model_->var_count(); ++v) {
    std::vector<double> t = log_node_belief(v);
    const double z = log_sum_exp(t);
    for (double& x : t) x = std::exp(x - z);
    out[static_cast<std::size_t>(v)] = std::move(t);
  }
  return out;
}

std::vector<std::vector<double>> ChainSolver::edge_beliefs() const {
  std::vector<std::vector<double>> out(edges_.size());
  for (std::size_t k = 0; k < edges_.size(); ++k) {
    std::vector<double> t = log_edge_belief(static_cast<int>(k));
    const double z = log_sum_exp(t);
    for (double& x : t) x = std::exp(x - z);
    out[k] = std::move(t);
  }
  return out;
}

double ChainSolver::bound() {
  return trw_bound(variable_beliefs(), edge_beliefs(), *decomp_, *model_, cfg_.mode,
                   cfg_.seed, &probe_dev_);
}

}  // namespace tcbo
