#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <vector>

#include "error.hpp"
#include "solvers.hpp"

namespace tcbo {

void check_config(const SolverConfig& cfg) {
  if (cfg.max_iters < 1)
    fail(ErrorKind::invalid_argument, "max_iters must be at least 1");
  if (!(cfg.bound_tol > 0.0) || !(cfg.consistency_tol > 0.0))
    fail(ErrorKind::invalid_argument, "tolerances must be positive");
}

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

// A forward sweep counts as settled once no message moves more than this.
constexpr double kMessageFixedPointTol = 1e-10;

// L-inf gap between each edge belief projected onto an endpoint and that
// endpoint's node belief; the chain analog of the region-graph residual.
double chain_consistency(const DiscreteModel& m,
                         const std::vector<std::vector<double>>& node_beliefs,
                         const std::vector<std::vector<double>>& edge_beliefs,
                         Mode mode) {
  double r = 0.0;
  const auto edges = m.pairwise_edges();
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const int i = edges[k].first, j = edges[k].second;
    const int ci = m.cardinality(i), cj = m.cardinality(j);
    const auto& b = edge_beliefs[k];
    for (int side = 0; side < 2; ++side) {
      const int v = side == 0 ? i : j;
      const int cv = side == 0 ? ci : cj;
      std::vector<double> p(static_cast<std::size_t>(cv), 0.0);
      for (int a = 0; a < ci; ++a)
        for (int bb = 0; bb < cj; ++bb) {
          const double val = b[static_cast<std::size_t>(a) * static_cast<std::size_t>(cj) +
                               static_cast<std::size_t>(bb)];
          auto& slot = p[static_cast<std::size_t>(side == 0 ? a : bb)];
          slot = mode == Mode::sum ? slot + val : std::max(slot, val);
        }
      if (mode == Mode::max) {
        double z = 0.0;
        for (double x : p) z += x;
        if (z > 0.0)
          for (double& x : p) x /= z;
      }
      const auto& nb = node_beliefs[static_cast<std::size_t>(v)];
      for (int x = 0; x < cv; ++x)
        r = std::max(r, std::abs(p[static_cast<std::size_t>(x)] -
                                 nb[static_cast<std::size_t>(x)]));
    }
  }
  return r;
}

// Bound-driven iteration shared by the convergent solvers: sweep until one
// full sweep improves the bound by less than bound_tol.
template <typename Solver, typename PushRow>
void iterate_until_flat(Solver& s, const SolverConfig& cfg, SolverTrace& tr,
                        PushRow&& push) {
  push(0);
  tr.termination = "max_iters";
  for (int it = 1; it <= cfg.max_iters; ++it) {
    const double prev = tr.rows.back().bound;
    s.sweep();
    push(it);
    if (prev - tr.rows.back().bound < cfg.bound_tol) {
      tr.termination = "converged";
      break;
    }
  }
}

void finish_trace(SolverTrace& tr, const DiscreteModel& m,
                  std::vector<std::vector<double>> beliefs, Mode mode) {
  tr.variable_beliefs = std::move(beliefs);
  if (mode == Mode::max) {
    tr.map_assignment = decode_map(tr.variable_beliefs);
    tr.map_energy = energy(m, *tr.map_assignment);
  }
}

}  // namespace

Assignment decode_map(const std::vector<std::vector<double>>& variable_beliefs) {
  Assignment x(variable_beliefs.size(), 0);
  for (std::size_t v = 0; v < variable_beliefs.size(); ++v) {
    const auto& b = variable_beliefs[v];
    if (b.empty()) fail(ErrorKind::invalid_argument, "empty belief table");
    std::size_t best = 0;
    for (std::size_t i = 1; i < b.size(); ++i)
      if (b[i] > b[best]) best = i;
    x[v] = static_cast<int>(best);
  }
  return x;
}

SolverTrace run_msd(const DiscreteModel& m, const RegionGraph& g,
                    const SolverConfig& cfg) {
  MsdSolver s(m, g, cfg);
  SolverTrace tr;
  tr.algorithm = "msd";
  tr.structure = "pair-singleton";
  tr.schedule = "edge-sweep";
  tr.mode = cfg.mode;
  const auto probes = make_probes(m, cfg.seed, 32);
  const auto t0 = Clock::now();
  iterate_until_flat(s, cfg, tr, [&](int sweep) {
    TraceRow r;
    r.sweep = sweep;
    r.bound = s.bound();
    r.admissibility_residual = admissibility_residual(s.ledger(), m, probes);
    r.consistency_residual = consistency_residual(s.ledger(), cfg.mode);
    r.elapsed_ms = ms_since(t0);
    tr.rows.push_back(r);
  });
  finish_trace(tr, m, s.variable_beliefs(), cfg.mode);
  return tr;
}

SolverTrace run_heskes(const DiscreteModel& m, const RegionGraph& g,
                       const SolverConfig& cfg) {
  HeskesSolver s(m, g, cfg);
  SolverTrace tr;
  tr.algorithm = "heskes";
  bool pair_singleton = true;
  for (const Region& r : g.regions())
    pair_singleton = pair_singleton && r.scope.size() <= 2;
  tr.structure = pair_singleton ? "pair-singleton" : "star-edge";
  tr.schedule = "intersection-sweep";
  tr.mode = cfg.mode;
  const auto probes = make_probes(m, cfg.seed, 32);
  const auto t0 = Clock::now();
  iterate_until_flat(s, cfg, tr, [&](int sweep) {
    TraceRow r;
    r.sweep = sweep;
    r.bound = s.bound();
    r.admissibility_residual = admissibility_residual(s.ledger(), m, probes);
    r.consistency_residual = consistency_residual(s.ledger(), cfg.mode);
    r.elapsed_ms = ms_since(t0);
    tr.rows.push_back(r);
  });
  finish_trace(tr, m, s.variable_beliefs(), cfg.mode);
  return tr;
}

SolverTrace run_mplp(const DiscreteModel& m, const SolverConfig& cfg) {
  MplpSolver s(m, cfg);
  SolverTrace tr;
  tr.algorithm = "mplp";
  tr.structure = "star-edge";
  tr.schedule = "edge-sweep";
  tr.mode = cfg.mode;
  const auto probes = make_probes(m, cfg.seed, 32);
  const auto t0 = Clock::now();
  iterate_until_flat(s, cfg, tr, [&](int sweep) {
    TraceRow r;
    r.sweep = sweep;
    r.bound = s.bound();
    const MessageLedger ledger = s.equivalent_ledger();
    r.admissibility_residual = admissibility_residual(ledger, m, probes);
    r.consistency_residual = consistency_residual(ledger, Mode::max);
    r.elapsed_ms = ms_since(t0);
    tr.rows.push_back(r);
  });
  finish_trace(tr, m, s.variable_beliefs(), Mode::max);
  return tr;
}

namespace {

SolverTrace run_chain(const DiscreteModel& m, const TreeDecomposition& d,
                      const SolverConfig& cfg, ChainSolver::Schedule schedule) {
  ChainSolver s(m, d, cfg, schedule);
  SolverTrace tr;
  const bool forward_only = schedule == ChainSolver::Schedule::forward_only;
  tr.algorithm = forward_only ? "trw-forward" : "trws";
  tr.structure = "chains";
  tr.schedule = forward_only ? "forward" : "forward-backward";
  tr.mode = cfg.mode;
  const auto t0 = Clock::now();
  auto push = [&](int sweep) {
    TraceRow r;
    r.sweep = sweep;
    r.bound = s.bound();
    r.admissibility_residual = s.last_probe_deviation();
    r.consistency_residual =
        chain_consistency(m, s.variable_beliefs(), s.edge_beliefs(), cfg.mode);
    r.elapsed_ms = ms_since(t0);
    tr.rows.push_back(r);
  };
  push(0);
  tr.termination = "max_iters";
  for (int it = 1; it <= cfg.max_iters; ++it) {
    const double prev = tr.rows.back().bound;
    const double change = s.sweep();
    push(it);
    if (forward_only) {
      if (change < kMessageFixedPointTol) {
        tr.termination = "message_fixed_point";
        break;
      }
    } else if (prev - tr.rows.back().bound < cfg.bound_tol) {
      tr.termination = "converged";
      break;
    }
  }
  finish_trace(tr, m, s.variable_beliefs(), cfg.mode);
  return tr;
}

}  // namespace

SolverTrace run_trws(const DiscreteModel& m, const TreeDecomposition& d,
                     const SolverConfig& cfg) {
  return run_chain(m, d, cfg, ChainSolver::Schedule::forward_backward);
}

SolverTrace run_trw_forward(const DiscreteModel& m, const TreeDecomposition& d,
                            const SolverConfig& cfg) {
  return run_chain(m, d, cfg, ChainSolver::Schedule::forward_only);
}

}  // namespace tcbo
