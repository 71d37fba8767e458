#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "model.hpp"
#include "region_graph.hpp"
#include "reparam.hpp"

namespace tcbo {

struct SolverConfig {
  Mode mode = Mode::max;
  int max_iters = 1000;
  double bound_tol = 1e-8;        // stop when a full sweep improves less
  double consistency_tol = 1e-6;  // reported threshold, not a stop criterion
  std::uint64_t seed = 0;         // probe assignments for residual checks
};

// Rejects non-positive tolerances and max_iters < 1; every solver constructor
// runs this before touching the model.
void check_config(const SolverConfig& cfg);

struct TraceRow {
  int sweep = 0;
  double bound = 0.0;
  double admissibility_residual = 0.0;  // probe deviation for the chain solvers
  double consistency_residual = 0.0;
  double elapsed_ms = 0.0;  // cumulative since run start
};

struct SolverTrace {
  std::string algorithm;
  std::string structure;
  std::string schedule;
  Mode mode = Mode::max;
  std::vector<TraceRow> rows;  // rows[0] is the initial state, before any update
  std::string termination;     // "converged" | "max_iters" | "message_fixed_point"
  std::vector<std::vector<double>> variable_beliefs;
  std::optional<Assignment> map_assignment;  // max mode only
  double map_energy = 0.0;

  double final_bound() const { return rows.back().bound; }
};

// Ties go to the lowest value index.
Assignment decode_map(const std::vector<std::vector<double>>& variable_beliefs);

// ---------------------------------------------------------------------------
// Edge-sweep equalization on a pair-singleton graph. Each region-graph edge
// update moves potential between the pair and one endpoint so their beliefs
// agree on that edge, which is the exact minimizer of the edge's two bound
// terms; sweeps therefore never increase the bound.
class MsdSolver {
 public:
  MsdSolver(const DiscreteModel& m, const RegionGraph& g, const SolverConfig& cfg);
  void sweep();
  double bound() const;
  const MessageLedger& ledger() const { return ledger_; }
  const SolverConfig& config() const { return cfg_; }
  std::vector<std::vector<double>> variable_beliefs() const;

 private:
  const DiscreteModel* model_;
  const RegionGraph* graph_;
  SolverConfig cfg_;
  MessageLedger ledger_;
  std::vector<int> singleton_region_;  // per variable
};

// ---------------------------------------------------------------------------
// Intersection sweeps on a general region graph: each child region pulls all
// parents to a common projection (geometric combination weighted c_alpha /
// c_hat, c_hat = c_beta + sum of parent c's), the block-optimal
// redistribution for that star of regions in both modes.
class HeskesSolver {
 public:
  HeskesSolver(const DiscreteModel& m, const RegionGraph& g, const SolverConfig& cfg,
               std::vector<int> intersection_order = {});
  void sweep();
  double bound() const;
  const MessageLedger& ledger() const { return ledger_; }
  const SolverConfig& config() const { return cfg_; }
  std::vector<std::vector<double>> variable_beliefs() const;
  const std::vector<int>& intersections() const { return intersections_; }

 private:
  void update_intersection(int beta);

  const DiscreteModel* model_;
  const RegionGraph* graph_;
  SolverConfig cfg_;
  MessageLedger ledger_;
  std::vector<int> intersections_;
};

// ---------------------------------------------------------------------------
// Compact form of the intersection sweep on the star-edge graph: state is one
// log message per directed model edge plus, for diagnostics, the aggregates
// each edge saw at its last update (which reconstruct the equivalent ledger
// exactly). Sweeping the model edges in factor order performs the identical
// update sequence to HeskesSolver on build_star_edge(m).
class MplpSolver {
 public:
  MplpSolver(const DiscreteModel& m, const SolverConfig& cfg);
  void sweep();
  double bound() const;
  const SolverConfig& config() const { return cfg_; }

  // lambda_{ij->i}: log message from edge (i,j) to endpoint i.
  const std::vector<double>& message(int edge_index, int endpoint_side) const;
  std::vector<double> node_belief(int v) const;       // normalized
  std::vector<double> edge_belief(int edge_index) const;  // normalized
  std::vector<std::vector<double>> variable_beliefs() const;

  // Equivalent star-edge ledger, rebuilt from the stored per-edge aggregates;
  // used for the trace's admissibility and consistency diagnostics.
  const RegionGraph& equivalent_graph() const { return *graph_; }
  MessageLedger equivalent_ledger() const;

 private:
  std::vector<double> aggregate(int v, int skip_edge) const;  // theta_v + sum lambdas

  const DiscreteModel* model_;
  SolverConfig cfg_;
  std::vector<std::pair<int, int>> edges_;
  std::vector<std::vector<double>> unary_;          // per variable
  std::vector<std::vector<double>> pair_table_;     // per edge, (i,j), j fastest
  std::vector<std::vector<double>> lambda_;         // 2 per edge: to i, to j
  std::vector<std::vector<double>> gamma_at_update_;  // 2 per edge, for the ledger
  std::vector<std::vector<int>> incident_;          // per variable: edge indices
  std::unique_ptr<RegionGraph> graph_;              // star-edge equivalent
};

// max over x_j of (theta_ij(x_i, x_j) / 2 + mu(x_i, x_j)): converts an
// edge-region-to-star message into the compact per-endpoint message.
std::vector<double> heskes_to_mplp_transform(const std::vector<double>& mu,
                                             const std::vector<double>& theta_ij,
                                             int card_i, int card_j);

// ---------------------------------------------------------------------------
// Reweighted chain message passing. Messages live on directed model edges;
// an update at node i toward j combines the unary, the pair table scaled by
// 1/rho_ij, incoming messages scaled by rho_ki, and divides by the opposite
// message to the power 1 - rho_ij. Messages are max-shifted to 0 after each
// update; the shift lands in the bound's additive constant.
class ChainSolver {
 public:
  enum class Schedule { forward_backward, forward_only };

  ChainSolver(const DiscreteModel& m, const TreeDecomposition& d,
              const SolverConfig& cfg, Schedule schedule);
  // Returns the max absolute message change of the sweep.
  double sweep();
  double bound();  // also refreshes beliefs and the probe deviation
  double last_probe_deviation() const { return probe_dev_; }
  const SolverConfig& config() const { return cfg_; }
  Schedule schedule() const { return schedule_; }
  std::vector<std::vector<double>> variable_beliefs() const;
  std::vector<std::vector<double>> edge_beliefs() const;

 private:
  // Recomputes the message out of `from` along `edge`; returns its L-inf change.
  double update_message(int edge, int from);
  std::vector<double> log_node_belief(int v) const;
  std::vector<double> log_edge_belief(int k) const;

  const DiscreteModel* model_;
  const TreeDecomposition* decomp_;
  SolverConfig cfg_;
  Schedule schedule_;
  std::vector<std::pair<int, int>> edges_;
  std::vector<double> rho_;
  std::vector<std::vector<double>> unary_;
  std::vector<std::vector<double>> pair_table_;
  std::vector<std::vector<int>> incident_;
  std::vector<std::vector<double>> msg_;  // 2 per edge: [2k] i->j, [2k+1] j->i
  std::vector<int> order_pos_;            // position of each node in node_order
  double probe_dev_ = 0.0;
};

// ---------------------------------------------------------------------------
// Trace-producing runs. Row 0 records the initial state; each subsequent row
// one full sweep. Termination: "converged" when a sweep improves the bound by
// less than bound_tol, "max_iters" otherwise. run_trw_forward ignores the
// bound (it may rise) and stops on a message fixed point instead.
SolverTrace run_msd(const DiscreteModel& m, const RegionGraph& g,
                    const SolverConfig& cfg);
SolverTrace run_heskes(const DiscreteModel& m, const RegionGraph& g,
                       const SolverConfig& cfg);
SolverTrace run_mplp(const DiscreteModel& m, const SolverConfig& cfg);
SolverTrace run_trws(const DiscreteModel& m, const TreeDecomposition& d,
                     const SolverConfig& cfg);
SolverTrace run_trw_forward(const DiscreteModel& m, const TreeDecomposition& d,
                            const SolverConfig& cfg);

}  // namespace tcbo
