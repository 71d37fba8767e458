#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "error.hpp"
#include "logsum.hpp"
#include "solvers.hpp"

namespace tcbo {

namespace {

// Pull state of one intersection: every parent's projection onto the child
// scope (scaled by its counting number in sum mode) and the common target g
// all members move to.
struct StarPull {
  std::vector<std::vector<double>> proj;  // one per incoming edge
  std::vector<double> g;
};

StarPull pull_intersection(const RegionGraph& graph, const MessageLedger& ledger,
                           Mode mode, int beta) {
  const auto& in = graph.in_edges(beta);
  StarPull out;
  std::vector<double> tb = ledger.theta_tilde(beta);
  const std::size_t n = tb.size();

  double chat = graph.regions()[static_cast<std::size_t>(beta)].c;
  out.proj.resize(in.size());
  for (std::size_t k = 0; k < in.size(); ++k) {
    const int e = in[k];
    const int alpha = graph.edges()[static_cast<std::size_t>(e)].parent;
    const double ca = graph.regions()[static_cast<std::size_t>(alpha)].c;
    chat += ca;
    std::vector<double> ta = ledger.theta_tilde(alpha);
    if (mode == Mode::max || ca == 0.0) {
      out.proj[k] = project_logtable(ta, ledger.edge_map(e), n, Mode::max);
    } else {
      for (double& v : ta) v /= ca;
      out.proj[k] = project_logtable(ta, ledger.edge_map(e), n, Mode::sum);
      for (double& v : out.proj[k]) v *= ca;
    }
  }
  if (in.empty()) return out;
  if (chat == 0.0)
    fail(ErrorKind::invalid_counting_numbers,
         "counting numbers around an intersection sum to zero");
  out.g.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = tb[i];
    for (const auto& p : out.proj) s += p[i];
    out.g[i] = s / chat;
  }
  return out;
}

std::vector<double> normalized_exp(std::vector<double> t) {
  const double z = log_sum_exp(t);
  for (double& v : t) v = std::exp(v - z);
  return t;
}

}  // namespace

HeskesSolver::HeskesSolver(const DiscreteModel& m, const RegionGraph& g,
                           const SolverConfig& cfg, std::vector<int> intersection_order)
    : model_(&m), graph_(&g), cfg_(cfg), ledger_(g) {
  check_config(cfg_);
  std::vector<int> natural;
  for (int r = 0; r < static_cast<int>(g.regions().size()); ++r)
    if (!g.parents_of(r).empty()) natural.push_back(r);
  if (intersection_order.empty()) {
    intersections_ = std::move(natural);
  } else {
    std::vector<int> sorted = intersection_order;
    std::sort(sorted.begin(), sorted.end());
    if (sorted != natural)
      fail(ErrorKind::schedule_invalid,
           "intersection order must visit each region with parents exactly once");
    intersections_ = std::move(intersection_order);
  }
}

void HeskesSolver::update_intersection(int beta) {
  const auto& in = graph_->in_edges(beta);
  if (in.empty()) return;
  const StarPull pull = pull_intersection(*graph_, ledger_, cfg_.mode, beta);
  for (std::size_t k = 0; k < in.size(); ++k) {
    const int e = in[k];
    const double ca =
        graph_->regions()[static_cast<std::size_t>(graph_->edges()[static_cast<std::size_t>(e)].parent)].c;
    std::vector<double>& net = ledger_.net(e);
    for (std::size_t i = 0; i < net.size(); ++i)
      net[i] += pull.proj[k][i] - ca * pull.g[i];
  }
}

void HeskesSolver::sweep() {
  for (int beta : intersections_) update_intersection(beta);
}

double HeskesSolver::bound() const {
  return cfg_.mode == Mode::sum ? bound_sum(ledger_) : bound_max(ledger_);
}

std::vector<std::vector<double>> HeskesSolver::variable_beliefs() const {
  const int n = model_->var_count();
  std::vector<std::vector<double>> out(static_cast<std::size_t>(n));

  std::vector<int> singleton(static_cast<std::size_t>(n), -1);
  for (std::size_t r = 0; r < graph_->regions().size(); ++r) {
    const auto& scope = graph_->regions()[r].scope;
    if (scope.size() == 1) singleton[static_cast<std::size_t>(scope[0])] = static_cast<int>(r);
  }

  for (int v = 0; v < n; ++v) {
    const int r = singleton[static_cast<std::size_t>(v)];
    if (r >= 0) {
      if (graph_->parents_of(r).empty()) {
        out[static_cast<std::size_t>(v)] =
            belief(ledger_.theta_tilde(r), graph_->regions()[static_cast<std::size_t>(r)].c);
      } else {
        // The target g of the variable's own intersection is its belief
        // exponent at any state, and the fixed-point belief at convergence.
        out[static_cast<std::size_t>(v)] =
            normalized_exp(pull_intersection(*graph_, ledger_, cfg_.mode, r).g);
      }
      continue;
    }
    // No singleton region (star-edge graphs): project the smallest positive-c
    // region containing v onto it.
    int best = -1;
    for (std::size_t q = 0; q < graph_->regions().size(); ++q) {
      const Region& reg = graph_->regions()[q];
      if (reg.c <= 0.0) continue;
      if (!std::binary_search(reg.scope.begin(), reg.scope.end(), v)) continue;
      if (best < 0 ||
          reg.scope.size() < graph_->regions()[static_cast<std::size_t>(best)].scope.size())
        best = static_cast<int>(q);
    }
    if (best < 0)
      fail(ErrorKind::unsupported_structure,
           "no region with positive counting number covers variable " +
               std::to_string(v));
    const Region& reg = graph_->regions()[static_cast<std::size_t>(best)];
    std::vector<double> tt = ledger_.theta_tilde(best);
    if (cfg_.mode == Mode::sum)
      for (double& x : tt) x /= reg.c;
    const auto map = restriction_map(reg.scope, graph_->region_cards(best), {v},
                                     {model_->cardinality(v)});
    out[static_cast<std::size_t>(v)] = normalized_exp(project_logtable(
        tt, map, static_cast<std::size_t>(model_->cardinality(v)), cfg_.mode));
  }
  return out;
}

}  // namespace tcbo
