#include "reparam.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "error.hpp"
#include "logsum.hpp"
#include "oracle.hpp"

namespace tcbo {

MessageLedger::MessageLedger(const RegionGraph& graph) : graph_(&graph) {
  nets_.resize(graph.edges().size());
  maps_.resize(graph.edges().size());
  for (std::size_t k = 0; k < graph.edges().size(); ++k) {
    const RegionEdge& e = graph.edges()[k];
    const Region& parent = graph.regions()[static_cast<std::size_t>(e.parent)];
    const Region& child = graph.regions()[static_cast<std::size_t>(e.child)];
    std::vector<int> pc, cc;
    for (int v : parent.scope) pc.push_back(graph.cardinalities()[static_cast<std::size_t>(v)]);
    for (int v : child.scope) cc.push_back(graph.cardinalities()[static_cast<std::size_t>(v)]);
    nets_[k].assign(table_size(cc), 0.0);
    maps_[k] = restriction_map(parent.scope, pc, child.scope, cc);
  }
}

std::vector<double> MessageLedger::theta_tilde(int region) const {
  const RegionGraph& g = *graph_;
  std::vector<double> t = g.regions()[static_cast<std::size_t>(region)].theta0;
  for (int k : g.in_edges(region)) {
    const auto& n = nets_[static_cast<std::size_t>(k)];
    for (std::size_t i = 0; i < t.size(); ++i) t[i] += n[i];
  }
  for (int k : g.out_edges(region)) {
    const auto& n = nets_[static_cast<std::size_t>(k)];
    const auto& map = maps_[static_cast<std::size_t>(k)];
    for (std::size_t i = 0; i < t.size(); ++i) t[i] -= n[map[i]];
  }
  return t;
}

std::vector<std::vector<double>> MessageLedger::theta_tilde_all() const {
  std::vector<std::vector<double>> out;
  out.reserve(graph_->regions().size());
  for (std::size_t r = 0; r < graph_->regions().size(); ++r)
    out.push_back(theta_tilde(static_cast<int>(r)));
  return out;
}

std::vector<double> belief(const std::vector<double>& theta_tilde, double c) {
  if (c < 0.0)
    fail(ErrorKind::invalid_counting_numbers, "belief: negative counting number");
  std::vector<double> b(theta_tilde.size());
  const double m = max_value(theta_tilde);
  if (c == 0.0) {
    std::size_t n_max = 0;
    for (double t : theta_tilde)
      if (t == m) ++n_max;
    for (std::size_t i = 0; i < b.size(); ++i)
      b[i] = (theta_tilde[i] == m) ? 1.0 / static_cast<double>(n_max) : 0.0;
    return b;
  }
  double z = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    b[i] = std::exp((theta_tilde[i] - m) / c);
    z += b[i];
  }
  for (double& x : b) x /= z;
  return b;
}

namespace {

double bound_term(const std::vector<double>& theta_tilde, double c) {
  const double m = max_value(theta_tilde);
  if (c == 0.0) return m;
  double s = 0.0;
  for (double t : theta_tilde) s += std::exp((t - m) / c);
  return m + c * std::log(s);
}

}  // namespace

double bound_sum(const MessageLedger& ledger) {
  double b = 0.0;
  const auto& regions = ledger.graph().regions();
  for (std::size_t r = 0; r < regions.size(); ++r)
    b += bound_term(ledger.theta_tilde(static_cast<int>(r)), regions[r].c);
  return b;
}

double bound_max(const MessageLedger& ledger) {
  double b = 0.0;
  for (std::size_t r = 0; r < ledger.graph().regions().size(); ++r)
    b += max_value(ledger.theta_tilde(static_cast<int>(r)));
  return b;
}

double admissibility_residual(const MessageLedger& ledger, const DiscreteModel& m,
                              const std::vector<Assignment>& probes) {
  const RegionGraph& g = ledger.graph();
  const auto tt = ledger.theta_tilde_all();
  double worst = 0.0;
  for (const Assignment& x : probes) {
    double s = 0.0;
    for (std::size_t r = 0; r < g.regions().size(); ++r) {
      const Region& reg = g.regions()[r];
      std::size_t idx = 0;
      for (int v : reg.scope)
        idx = idx * static_cast<std::size_t>(g.cardinalities()[static_cast<std::size_t>(v)]) +
              static_cast<std::size_t>(x[static_cast<std::size_t>(v)]);
      s += tt[r][idx];
    }
    worst = std::max(worst, std::abs(s - energy(m, x)));
  }
  return worst;
}

double consistency_residual(const MessageLedger& ledger, Mode mode) {
  const RegionGraph& g = ledger.graph();
  const auto tt = ledger.theta_tilde_all();
  double worst = 0.0;
  for (std::size_t k = 0; k < g.edges().size(); ++k) {
    const RegionEdge& e = g.edges()[k];
    const std::vector<double> bp =
        belief(tt[static_cast<std::size_t>(e.parent)],
               g.regions()[static_cast<std::size_t>(e.parent)].c);
    const std::vector<double> bc =
        belief(tt[static_cast<std::size_t>(e.child)],
               g.regions()[static_cast<std::size_t>(e.child)].c);
    const auto& map = ledger.edge_map(static_cast<int>(k));
    std::vector<double> proj(bc.size(), 0.0);
    if (mode == Mode::sum) {
      for (std::size_t i = 0; i < bp.size(); ++i) proj[map[i]] += bp[i];
    } else {
      for (std::size_t i = 0; i < bp.size(); ++i)
        proj[map[i]] = std::max(proj[map[i]], bp[i]);
      double z = 0.0;
      for (double p : proj) z += p;
      if (z > 0.0)
        for (double& p : proj) p /= z;
    }
    for (std::size_t i = 0; i < bc.size(); ++i)
      worst = std::max(worst, std::abs(proj[i] - bc[i]));
  }
  return worst;
}

std::vector<Assignment> make_probes(const DiscreteModel& m, std::uint64_t seed,
                                    int count) {
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
  std::vector<Assignment> probes(static_cast<std::size_t>(count));
  for (auto& x : probes) {
    x.resize(static_cast<std::size_t>(m.var_count()));
    for (int v = 0; v < m.var_count(); ++v)
      x[static_cast<std::size_t>(v)] = static_cast<int>(
          rng() % static_cast<std::uint64_t>(m.cardinality(v)));
  }
  return probes;
}

double trw_bound(const std::vector<std::vector<double>>& node_beliefs,
                 const std::vector<std::vector<double>>& edge_beliefs,
                 const TreeDecomposition& decomp, const DiscreteModel& m, Mode mode,
                 std::uint64_t probe_seed, double* probe_deviation_out) {
  const auto model_edges = m.pairwise_edges();
  if (node_beliefs.size() != static_cast<std::size_t>(m.var_count()))
    fail(ErrorKind::dimension_mismatch, "trw_bound: node belief count mismatch");
  if (edge_beliefs.size() != model_edges.size())
    fail(ErrorKind::dimension_mismatch, "trw_bound: edge belief count mismatch");

  // Log beliefs; entries must be strictly positive.
  std::vector<std::vector<double>> ln(node_beliefs.size());
  for (std::size_t v = 0; v < node_beliefs.size(); ++v) {
    ln[v].resize(node_beliefs[v].size());
    for (std::size_t i = 0; i < node_beliefs[v].size(); ++i) {
      if (!(node_beliefs[v][i] > 0.0))
        fail(ErrorKind::invalid_argument, "trw_bound: node belief not strictly positive");
      ln[v][i] = std::log(node_beliefs[v][i]);
    }
  }
  std::vector<std::vector<double>> le(edge_beliefs.size());
  for (std::size_t k = 0; k < edge_beliefs.size(); ++k) {
    le[k].resize(edge_beliefs[k].size());
    for (std::size_t i = 0; i < edge_beliefs[k].size(); ++i) {
      if (!(edge_beliefs[k][i] > 0.0))
        fail(ErrorKind::invalid_argument, "trw_bound: edge belief not strictly positive");
      le[k][i] = std::log(edge_beliefs[k][i]);
    }
  }

  auto model_edge_index = [&model_edges](int i, int j) {
    if (i > j) std::swap(i, j);
    for (std::size_t k = 0; k < model_edges.size(); ++k)
      if (model_edges[k] == std::make_pair(i, j)) return k;
    fail(ErrorKind::invalid_argument, "trw_bound: tree edge not a model edge");
  };

  // Per-tree log potential: node term ln b_i for every variable, edge term
  // ln b_ij - ln b_i - ln b_j for the tree's edges.
  struct TreePotential {
    std::vector<std::vector<double>> node_pots;
    std::vector<std::vector<double>> edge_pots;  // over sorted (i, j)
    std::vector<std::pair<int, int>> edges;
  };
  std::vector<TreePotential> pots(decomp.trees.size());
  for (std::size_t t = 0; t < decomp.trees.size(); ++t) {
    pots[t].node_pots = ln;
    for (auto [i, j] : decomp.trees[t].edges) {
      if (i > j) std::swap(i, j);
      const std::size_t k = model_edge_index(i, j);
      std::vector<double> ep = le[k];
      const int ci = m.cardinality(i), cj = m.cardinality(j);
      for (int xi = 0; xi < ci; ++xi)
        for (int xj = 0; xj < cj; ++xj)
          ep[static_cast<std::size_t>(xi) * static_cast<std::size_t>(cj) +
             static_cast<std::size_t>(xj)] -=
              ln[static_cast<std::size_t>(i)][static_cast<std::size_t>(xi)] +
              ln[static_cast<std::size_t>(j)][static_cast<std::size_t>(xj)];
      pots[t].edge_pots.push_back(std::move(ep));
      pots[t].edges.emplace_back(i, j);
    }
  }

  auto tree_value_at = [&](const TreePotential& p, const Assignment& x) {
    double s = 0.0;
    for (std::size_t v = 0; v < p.node_pots.size(); ++v)
      s += p.node_pots[v][static_cast<std::size_t>(x[v])];
    for (std::size_t k = 0; k < p.edges.size(); ++k) {
      const auto [i, j] = p.edges[k];
      s += p.edge_pots[k][static_cast<std::size_t>(x[static_cast<std::size_t>(i)]) *
                              static_cast<std::size_t>(m.cardinality(j)) +
                          static_cast<std::size_t>(x[static_cast<std::size_t>(j)])];
    }
    return s;
  };

  // The reweighted tree potentials must reproduce the model energy up to one
  // shared constant; estimate it from probes and reject real deviations.
  const auto probes = make_probes(m, probe_seed, 32);
  std::vector<double> gaps;
  gaps.reserve(probes.size());
  for (const Assignment& x : probes) {
    double mix = 0.0;
    for (std::size_t t = 0; t < pots.size(); ++t)
      mix += decomp.trees[t].weight * tree_value_at(pots[t], x);
    gaps.push_back(energy(m, x) - mix);
  }
  double c_hat = 0.0;
  for (double gp : gaps) c_hat += gp;
  c_hat /= static_cast<double>(gaps.size());
  double dev = 0.0;
  for (double gp : gaps) dev = std::max(dev, std::abs(gp - c_hat));
  if (probe_deviation_out) *probe_deviation_out = dev;
  if (dev > 1e-6)
    fail(ErrorKind::not_a_reparameterization,
         "trw_bound: beliefs do not reparameterize the model (probe deviation " +
             std::to_string(dev) + ")");

  double total = c_hat;
  for (std::size_t t = 0; t < pots.size(); ++t) {
    const TreeDpResult r =
        tree_dp(pots[t].node_pots, pots[t].edge_pots, pots[t].edges,
                m.cardinalities(), mode);
    total += decomp.trees[t].weight * r.value;
  }
  return total;
}

}  // namespace tcbo
