#pragma once

#include <cstdint>
#include <vector>

#include "model.hpp"
#include "region_graph.hpp"

namespace tcbo {

// Message state over a region graph. Each containment edge (alpha, beta)
// carries one net log table over the child's states; the region potentials
// are reconstructed as
//
//   theta~_beta = theta0_beta + sum over incoming edges of net
//   theta~_alpha = theta0_alpha - sum over outgoing edges of net(restricted)
//
// so the sum of theta~ over all regions telescopes back to the sum of
// theta0 at every joint state. Admissibility is therefore exact by
// construction for any message values; the residual functions below measure
// only floating-point noise (and catch bookkeeping bugs).
class MessageLedger {
 public:
  explicit MessageLedger(const RegionGraph& graph);

  const RegionGraph& graph() const { return *graph_; }
  std::vector<double>& net(int edge) { return nets_[static_cast<std::size_t>(edge)]; }
  const std::vector<double>& net(int edge) const {
    return nets_[static_cast<std::size_t>(edge)];
  }
  // Index map from parent states to child states for an edge.
  const std::vector<std::uint32_t>& edge_map(int edge) const {
    return maps_[static_cast<std::size_t>(edge)];
  }

  std::vector<double> theta_tilde(int region) const;
  std::vector<std::vector<double>> theta_tilde_all() const;

 private:
  const RegionGraph* graph_;
  std::vector<std::vector<double>> nets_;
  std::vector<std::vector<std::uint32_t>> maps_;
};

// Normalized belief of a region: proportional to exp(theta~ / c) for c > 0.
// At c = 0 the zero-temperature limit applies: uniform over the argmax set
// of theta~ (exact float maximum), zero elsewhere.
std::vector<double> belief(const std::vector<double>& theta_tilde, double c);

// Log-partition style bound: sum over regions of c * log sum exp(theta~/c),
// with the c = 0 term being max(theta~). Decreases under the solvers'
// sum-mode updates; always >= log Z for admissible states.
double bound_sum(const MessageLedger& ledger);

// MAP bound: sum over regions of max(theta~). Always >= the MAP value.
double bound_max(const MessageLedger& ledger);

// Max over probe assignments of |sum of theta~ restrictions - model energy|.
double admissibility_residual(const MessageLedger& ledger, const DiscreteModel& m,
                              const std::vector<Assignment>& probes);

// Max over region-graph edges and child states of |proj(b_parent) - b_child|,
// where proj marginalizes the parent belief onto the child scope (sum mode)
// or maximizes and renormalizes to sum 1 (max mode).
double consistency_residual(const MessageLedger& ledger, Mode mode);

// Seeded probe assignments, uniform per variable; used for admissibility
// checks and the TRW bound constant.
std::vector<Assignment> make_probes(const DiscreteModel& m, std::uint64_t seed,
                                    int count);

// Bound from tree-decomposition beliefs. node_beliefs[v] is a distribution
// over x_v; edge_beliefs[k] over the k-th model edge (both strictly
// positive). Each tree's log potential is assembled from log beliefs
// (node terms plus log b_ij - log b_i - log b_j edge terms); the additive
// constant between the model energy and the rho-weighted tree potentials is
// estimated from 32 seeded probes and must be constant to within 1e-6 or a
// not_a_reparameterization error is raised. Returns constant + weighted
// per-tree values (log partition in sum mode, maximum in max mode).
double trw_bound(const std::vector<std::vector<double>>& node_beliefs,
                 const std::vector<std::vector<double>>& edge_beliefs,
                 const TreeDecomposition& decomp, const DiscreteModel& m, Mode mode,
                 std::uint64_t probe_seed, double* probe_deviation_out = nullptr);

}  // namespace tcbo
