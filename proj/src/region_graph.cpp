#include "region_graph.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <string>

#include "error.hpp"

namespace tcbo {

RegionGraph::RegionGraph(std::vector<Region> regions, std::vector<RegionEdge> edges,
                         std::vector<int> cardinalities)
    : regions_(std::move(regions)), edges_(std::move(edges)),
      cards_(std::move(cardinalities)) {
  const int n_regions = static_cast<int>(regions_.size());
  if (n_regions == 0)
    fail(ErrorKind::invalid_argument, "region graph: no regions");
  for (const Region& r : regions_) {
    if (r.scope.empty())
      fail(ErrorKind::invalid_argument, "region graph: empty region scope");
    if (!std::is_sorted(r.scope.begin(), r.scope.end()) ||
        std::adjacent_find(r.scope.begin(), r.scope.end()) != r.scope.end())
      fail(ErrorKind::invalid_argument,
           "region graph: region scope must be strictly ascending");
    for (int v : r.scope)
      if (v < 0 || v >= static_cast<int>(cards_.size()))
        fail(ErrorKind::invalid_argument, "region graph: scope variable out of range");
    if (r.c < 0.0)
      fail(ErrorKind::invalid_counting_numbers,
           "region graph: counting number must be non-negative, got " +
               std::to_string(r.c));
    std::size_t want = 1;
    for (int v : r.scope) want *= static_cast<std::size_t>(cards_[static_cast<std::size_t>(v)]);
    if (r.theta0.size() != want)
      fail(ErrorKind::dimension_mismatch, "region graph: theta0 size mismatch");
  }
  parents_.assign(regions_.size(), {});
  children_.assign(regions_.size(), {});
  in_edges_.assign(regions_.size(), {});
  out_edges_.assign(regions_.size(), {});
  for (std::size_t k = 0; k < edges_.size(); ++k) {
    const RegionEdge& e = edges_[k];
    if (e.parent < 0 || e.parent >= n_regions || e.child < 0 || e.child >= n_regions ||
        e.parent == e.child)
      fail(ErrorKind::invalid_argument, "region graph: bad edge endpoints");
    const auto& ps = regions_[static_cast<std::size_t>(e.parent)].scope;
    const auto& cs = regions_[static_cast<std::size_t>(e.child)].scope;
    if (!std::includes(ps.begin(), ps.end(), cs.begin(), cs.end()))
      fail(ErrorKind::invalid_argument,
           "region graph: child scope not contained in parent scope");
    parents_[static_cast<std::size_t>(e.child)].push_back(e.parent);
    children_[static_cast<std::size_t>(e.parent)].push_back(e.child);
    in_edges_[static_cast<std::size_t>(e.child)].push_back(static_cast<int>(k));
    out_edges_[static_cast<std::size_t>(e.parent)].push_back(static_cast<int>(k));
  }
}

std::vector<int> RegionGraph::region_cards(int region) const {
  std::vector<int> out;
  for (int v : regions_[static_cast<std::size_t>(region)].scope)
    out.push_back(cards_[static_cast<std::size_t>(v)]);
  return out;
}

RegionGraph build_pair_singleton(const DiscreteModel& m, double c_pair,
                                 double c_singleton) {
  if (!m.is_pairwise())
    fail(ErrorKind::unsupported_structure,
         "pair-singleton graph requires a pairwise model (max arity " +
             std::to_string(m.max_arity()) + ")");
  if (c_pair <= 0.0)
    fail(ErrorKind::invalid_counting_numbers, "c_pair must be positive");
  if (c_singleton < 0.0)
    fail(ErrorKind::invalid_counting_numbers, "c_singleton must be non-negative");

  const auto edges = m.pairwise_edges();
  std::vector<int> deg(static_cast<std::size_t>(m.var_count()), 0);
  for (const auto& [i, j] : edges) {
    ++deg[static_cast<std::size_t>(i)];
    ++deg[static_cast<std::size_t>(j)];
  }

  std::vector<Region> regions;
  std::vector<RegionEdge> redges;
  for (const auto& [i, j] : edges) {
    Region r;
    r.scope = {i, j};
    r.c = c_pair;
    r.theta0 = m.factors()[static_cast<std::size_t>(m.pair_factor_index(i, j))].table;
    const int ci = m.cardinality(i), cj = m.cardinality(j);
    const int ui = m.unary_factor_index(i), uj = m.unary_factor_index(j);
    for (int xi = 0; xi < ci; ++xi)
      for (int xj = 0; xj < cj; ++xj) {
        double& t = r.theta0[static_cast<std::size_t>(xi) * static_cast<std::size_t>(cj) +
                             static_cast<std::size_t>(xj)];
        if (ui >= 0)
          t += m.factors()[static_cast<std::size_t>(ui)].table[static_cast<std::size_t>(xi)] /
               deg[static_cast<std::size_t>(i)];
        if (uj >= 0)
          t += m.factors()[static_cast<std::size_t>(uj)].table[static_cast<std::size_t>(xj)] /
               deg[static_cast<std::size_t>(j)];
      }
    regions.push_back(std::move(r));
  }
  const int first_singleton = static_cast<int>(regions.size());
  for (int v = 0; v < m.var_count(); ++v) {
    Region r;
    r.scope = {v};
    r.c = c_singleton;
    r.theta0.assign(static_cast<std::size_t>(m.cardinality(v)), 0.0);
    if (deg[static_cast<std::size_t>(v)] == 0) {
      const int u = m.unary_factor_index(v);
      if (u >= 0) r.theta0 = m.factors()[static_cast<std::size_t>(u)].table;
    }
    regions.push_back(std::move(r));
  }
  for (std::size_t k = 0; k < edges.size(); ++k) {
    redges.push_back({static_cast<int>(k), first_singleton + edges[k].first});
    redges.push_back({static_cast<int>(k), first_singleton + edges[k].second});
  }
  return RegionGraph(std::move(regions), std::move(redges), m.cardinalities());
}

RegionGraph build_star_edge(const DiscreteModel& m) {
  if (!m.is_pairwise())
    fail(ErrorKind::unsupported_structure,
         "star-edge graph requires a pairwise model (max arity " +
             std::to_string(m.max_arity()) + ")");
  const auto edges = m.pairwise_edges();
  std::vector<std::vector<int>> nbr(static_cast<std::size_t>(m.var_count()));
  for (const auto& [i, j] : edges) {
    nbr[static_cast<std::size_t>(i)].push_back(j);
    nbr[static_cast<std::size_t>(j)].push_back(i);
  }

  std::vector<Region> regions;
  for (int v = 0; v < m.var_count(); ++v) {
    Region r;
    r.scope = nbr[static_cast<std::size_t>(v)];
    r.scope.push_back(v);
    std::sort(r.scope.begin(), r.scope.end());
    r.c = 1.0;
    std::vector<int> rc;
    for (int u : r.scope) rc.push_back(m.cardinality(u));
    r.theta0.assign(table_size(rc), 0.0);
    const auto strides = table_strides(rc);
    auto pos_of = [&r](int u) {
      return static_cast<std::size_t>(
          std::lower_bound(r.scope.begin(), r.scope.end(), u) - r.scope.begin());
    };
    const std::size_t pv = pos_of(v);
    const int u_idx = m.unary_factor_index(v);
    Odometer od(rc);
    for (std::size_t idx = 0; !od.done(); od.advance(), ++idx) {
      const int xv = od.digits()[pv];
      double t = 0.0;
      if (u_idx >= 0)
        t += m.factors()[static_cast<std::size_t>(u_idx)].table[static_cast<std::size_t>(xv)];
      for (int u : nbr[static_cast<std::size_t>(v)]) {
        const int f = m.pair_factor_index(v, u);
        const auto& ft = m.factors()[static_cast<std::size_t>(f)].table;
        const int xu = od.digits()[pos_of(u)];
        // Factor scope is sorted (low, high) with high fastest.
        const int lo = std::min(v, u), hi = std::max(v, u);
        const int xlo = (lo == v) ? xv : xu, xhi = (hi == v) ? xv : xu;
        t += 0.5 * ft[static_cast<std::size_t>(xlo) *
                          static_cast<std::size_t>(m.cardinality(hi)) +
                      static_cast<std::size_t>(xhi)];
      }
      r.theta0[idx] = t;
    }
    regions.push_back(std::move(r));
  }
  const int first_edge_region = static_cast<int>(regions.size());
  std::vector<RegionEdge> redges;
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const auto [i, j] = edges[k];
    Region r;
    r.scope = {i, j};
    r.c = 0.0;
    r.theta0.assign(static_cast<std::size_t>(m.cardinality(i)) *
                        static_cast<std::size_t>(m.cardinality(j)),
                    0.0);
    regions.push_back(std::move(r));
    redges.push_back({i, first_edge_region + static_cast<int>(k)});
    redges.push_back({j, first_edge_region + static_cast<int>(k)});
  }
  return RegionGraph(std::move(regions), std::move(redges), m.cardinalities());
}

namespace {

// The model's pairwise edge set as sorted pairs, with duplicates rejected by
// DiscreteModel's merge, for exact structure comparison.
std::set<std::pair<int, int>> edge_set(const DiscreteModel& m) {
  std::set<std::pair<int, int>> s;
  for (auto e : m.pairwise_edges()) s.insert(e);
  return s;
}

std::set<std::pair<int, int>> grid_edge_set(int rows, int cols) {
  std::set<std::pair<int, int>> s;
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      const int v = r * cols + c;
      if (c + 1 < cols) s.insert({v, v + 1});
      if (r + 1 < rows) s.insert({v, v + cols});
    }
  return s;
}

std::vector<double> rho_from_trees(const DiscreteModel& m,
                                   const std::vector<TreeDecomposition::Tree>& trees) {
  const auto edges = m.pairwise_edges();
  std::vector<double> rho(edges.size(), 0.0);
  for (const auto& t : trees)
    for (auto [i, j] : t.edges) {
      if (i > j) std::swap(i, j);
      for (std::size_t k = 0; k < edges.size(); ++k)
        if (edges[k] == std::make_pair(i, j)) rho[k] += t.weight;
    }
  return rho;
}

}  // namespace

TreeDecomposition build_grid_chain_decomposition(const DiscreteModel& m, int rows,
                                                 int cols) {
  if (rows < 1 || cols < 1)
    fail(ErrorKind::invalid_argument, "grid dims must be >= 1");
  if (!m.is_pairwise() || rows * cols != m.var_count() ||
      edge_set(m) != grid_edge_set(rows, cols))
    fail(ErrorKind::unsupported_structure,
         "model is not a " + std::to_string(rows) + "x" + std::to_string(cols) +
             " grid");

  TreeDecomposition d;
  TreeDecomposition::Tree horiz, vert;
  horiz.weight = 0.5;
  vert.weight = 0.5;
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c + 1 < cols; ++c)
      horiz.edges.emplace_back(r * cols + c, r * cols + c + 1);
  for (int r = 0; r + 1 < rows; ++r)
    for (int c = 0; c < cols; ++c)
      vert.edges.emplace_back(r * cols + c, (r + 1) * cols + c);
  d.trees.push_back(std::move(horiz));
  d.trees.push_back(std::move(vert));
  d.node_order.resize(static_cast<std::size_t>(m.var_count()));
  std::iota(d.node_order.begin(), d.node_order.end(), 0);
  d.rho = rho_from_trees(m, d.trees);
  return d;
}

TreeDecomposition build_path_decomposition(const DiscreteModel& m) {
  std::set<std::pair<int, int>> want;
  for (int v = 0; v + 1 < m.var_count(); ++v) want.insert({v, v + 1});
  if (!m.is_pairwise() || edge_set(m) != want)
    fail(ErrorKind::unsupported_structure,
         "model is not the path 0-1-...-" + std::to_string(m.var_count() - 1));
  TreeDecomposition d;
  TreeDecomposition::Tree t;
  t.weight = 1.0;
  for (int v = 0; v + 1 < m.var_count(); ++v) t.edges.emplace_back(v, v + 1);
  d.trees.push_back(std::move(t));
  d.node_order.resize(static_cast<std::size_t>(m.var_count()));
  std::iota(d.node_order.begin(), d.node_order.end(), 0);
  d.rho = rho_from_trees(m, d.trees);
  return d;
}

bool check_monotonic(const TreeDecomposition& d, int var_count) {
  std::vector<int> pos(static_cast<std::size_t>(var_count), -1);
  if (static_cast<int>(d.node_order.size()) != var_count)
    fail(ErrorKind::schedule_invalid, "node_order length mismatch");
  for (std::size_t i = 0; i < d.node_order.size(); ++i) {
    const int v = d.node_order[i];
    if (v < 0 || v >= var_count || pos[static_cast<std::size_t>(v)] != -1)
      fail(ErrorKind::schedule_invalid, "node_order is not a permutation");
    pos[static_cast<std::size_t>(v)] = static_cast<int>(i);
  }
  for (const auto& t : d.trees) {
    std::vector<int> deg(static_cast<std::size_t>(var_count), 0);
    for (auto [i, j] : t.edges) {
      if (i < 0 || i >= var_count || j < 0 || j >= var_count || i == j)
        fail(ErrorKind::unsupported_structure, "tree edge endpoint out of range");
      if (++deg[static_cast<std::size_t>(i)] > 2 || ++deg[static_cast<std::size_t>(j)] > 2)
        fail(ErrorKind::unsupported_structure,
             "tree is not a union of chains (node degree exceeds 2)");
    }
    // Acyclicity via union-find; chains with deg <= 2 and no cycle are paths.
    std::vector<int> root(static_cast<std::size_t>(var_count));
    std::iota(root.begin(), root.end(), 0);
    auto find = [&root](int v) {
      while (root[static_cast<std::size_t>(v)] != v) {
        root[static_cast<std::size_t>(v)] = root[static_cast<std::size_t>(root[static_cast<std::size_t>(v)])];
        v = root[static_cast<std::size_t>(v)];
      }
      return v;
    };
    for (auto [i, j] : t.edges) {
      const int a = find(i), b = find(j);
      if (a == b)
        fail(ErrorKind::unsupported_structure, "tree contains a cycle");
      root[static_cast<std::size_t>(a)] = b;
    }
    // Every edge of a monotonic chain connects order-adjacent-or-later nodes
    // consistently: walking from the earliest node of each chain must visit
    // strictly increasing positions.
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(var_count));
    for (auto [i, j] : t.edges) {
      adj[static_cast<std::size_t>(i)].push_back(j);
      adj[static_cast<std::size_t>(j)].push_back(i);
    }
    for (int v = 0; v < var_count; ++v) {
      if (deg[static_cast<std::size_t>(v)] != 1) continue;
      // v is a chain endpoint; walk the chain once, from its earlier end only.
      int prev = -1, cur = v, steps = 0;
      bool increasing = true;
      while (true) {
        int nxt = -1;
        for (int u : adj[static_cast<std::size_t>(cur)])
          if (u != prev) nxt = u;
        if (nxt == -1) break;
        if (pos[static_cast<std::size_t>(nxt)] <= pos[static_cast<std::size_t>(cur)])
          increasing = false;
        prev = cur;
        cur = nxt;
        ++steps;
      }
      (void)steps;
      const bool starts_earlier = pos[static_cast<std::size_t>(v)] <
                                  pos[static_cast<std::size_t>(cur)];
      if (starts_earlier && !increasing) return false;
    }
  }
  return true;
}

std::optional<std::pair<int, int>> infer_grid_dims(const DiscreteModel& m) {
  if (!m.is_pairwise()) return std::nullopt;
  const auto s = edge_set(m);
  const int n = m.var_count();
  for (int rows = 1; rows <= n; ++rows) {
    if (n % rows != 0) continue;
    const int cols = n / rows;
    if (s == grid_edge_set(rows, cols)) return std::make_pair(rows, cols);
  }
  return std::nullopt;
}

}  // namespace tcbo
