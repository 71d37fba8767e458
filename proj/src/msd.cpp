#include <cstddef>
#include <vector>

#include "error.hpp"
#include "solvers.hpp"

namespace tcbo {

MsdSolver::MsdSolver(const DiscreteModel& m, const RegionGraph& g,
                     const SolverConfig& cfg)
    : model_(&m), graph_(&g), cfg_(cfg), ledger_(g) {
  check_config(cfg_);
  // The even split below is block-optimal only when a pair hands potential to
  // its two endpoints; reject anything but a pair-singleton graph.
  for (std::size_t r = 0; r < g.regions().size(); ++r) {
    const std::size_t arity = g.regions()[r].scope.size();
    if (arity != 1 && arity != 2)
      fail(ErrorKind::unsupported_structure,
           "edge equalization runs on pair-singleton graphs only");
    if ((arity == 2 && g.out_edges(static_cast<int>(r)).size() != 2) ||
        (arity == 1 && !g.out_edges(static_cast<int>(r)).empty()))
      fail(ErrorKind::unsupported_structure,
           "edge equalization runs on pair-singleton graphs only");
  }
  if (cfg_.mode == Mode::sum) {
    for (const Region& r : g.regions())
      if (r.c <= 0.0)
        fail(ErrorKind::invalid_counting_numbers,
             "sum-mode edge equalization needs a positive counting number on "
             "every region");
  }
  singleton_region_.assign(static_cast<std::size_t>(m.var_count()), -1);
  for (std::size_t r = 0; r < g.regions().size(); ++r) {
    const auto& scope = g.regions()[r].scope;
    if (scope.size() == 1)
      singleton_region_[static_cast<std::size_t>(scope[0])] = static_cast<int>(r);
  }
}

void MsdSolver::sweep() {
  const auto& edges = graph_->edges();
  for (int e = 0; e < static_cast<int>(edges.size()); ++e) {
    const std::vector<double> tc = ledger_.theta_tilde(edges[e].child);
    std::vector<double> tp = ledger_.theta_tilde(edges[e].parent);
    std::vector<double>& net = ledger_.net(e);
    if (cfg_.mode == Mode::max) {
      // Split the disagreement evenly; afterwards the parent's max-projection
      // and the child table coincide, the minimum of the two max terms.
      const std::vector<double> p =
          project_logtable(tp, ledger_.edge_map(e), tc.size(), Mode::max);
      for (std::size_t i = 0; i < tc.size(); ++i) net[i] += 0.5 * (p[i] - tc[i]);
    } else {
      // Harmonic split: the unique transfer after which the parent's marginal
      // belief equals the child belief, the minimum of the two lse terms.
      const double ca = graph_->regions()[edges[e].parent].c;
      const double cb = graph_->regions()[edges[e].child].c;
      for (double& v : tp) v /= ca;
      const std::vector<double> p =
          project_logtable(tp, ledger_.edge_map(e), tc.size(), Mode::sum);
      const double w = ca * cb / (ca + cb);
      for (std::size_t i = 0; i < tc.size(); ++i)
        net[i] += w * (p[i] - tc[i] / cb);
    }
  }
}

double MsdSolver::bound() const {
  return cfg_.mode == Mode::sum ? bound_sum(ledger_) : bound_max(ledger_);
}

std::vector<std::vector<double>> MsdSolver::variable_beliefs() const {
  std::vector<std::vector<double>> out(
      static_cast<std::size_t>(model_->var_count()));
  for (int v = 0; v < model_->var_count(); ++v) {
    const int r = singleton_region_[static_cast<std::size_t>(v)];
    if (r < 0)
      fail(ErrorKind::unsupported_structure,
           "variable beliefs need a singleton region for every variable");
    out[static_cast<std::size_t>(v)] =
        belief(ledger_.theta_tilde(r), graph_->regions()[static_cast<std::size_t>(r)].c);
  }
  return out;
}

}  // namespace tcbo
