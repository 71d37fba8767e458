#include "oracle.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "error.hpp"
#include "logsum.hpp"

namespace tcbo {

ExactResult brute_force(const DiscreteModel& m) {
  if (m.log2_state_count() > 20.0 + 1e-9)
    fail(ErrorKind::too_large,
         "brute_force: 2^" + std::to_string(m.log2_state_count()) +
             " joint states exceeds the 2^20 cap");

  const std::size_t n_states = table_size(m.cardinalities());
  std::vector<double> energies(n_states);

  ExactResult res;
  res.map_value = kNegInf;
  Odometer od(m.cardinalities());
  for (std::size_t idx = 0; !od.done(); od.advance(), ++idx) {
    double e = 0.0;
    for (const Factor& f : m.factors()) {
      std::size_t t = 0;
      for (int v : f.scope)
        t = t * static_cast<std::size_t>(m.cardinality(v)) +
            static_cast<std::size_t>(od.digits()[static_cast<std::size_t>(v)]);
      e += f.table[t];
    }
    energies[idx] = e;
    if (e > res.map_value) {
      res.map_value = e;
      res.map_assignment = od.digits();
    }
  }

  double sum = 0.0;
  for (double e : energies) sum += std::exp(e - res.map_value);
  res.log_partition = res.map_value + std::log(sum);

  res.marginals.resize(static_cast<std::size_t>(m.var_count()));
  for (int v = 0; v < m.var_count(); ++v)
    res.marginals[static_cast<std::size_t>(v)].assign(
        static_cast<std::size_t>(m.cardinality(v)), 0.0);
  Odometer od2(m.cardinalities());
  for (std::size_t idx = 0; !od2.done(); od2.advance(), ++idx) {
    const double p = std::exp(energies[idx] - res.log_partition);
    for (int v = 0; v < m.var_count(); ++v)
      res.marginals[static_cast<std::size_t>(v)]
                   [static_cast<std::size_t>(od2.digits()[static_cast<std::size_t>(v)])] += p;
  }
  return res;
}

namespace {

struct DpEdge {
  int to;
  int edge_idx;
  bool from_is_first;  // orientation of the stored table
};

double edge_entry(const std::vector<double>& table, bool from_is_first,
                  int x_from, int x_to, int card_first_arg_second) {
  // Table is over (first, second) with second fastest.
  if (from_is_first)
    return table[static_cast<std::size_t>(x_from) *
                     static_cast<std::size_t>(card_first_arg_second) +
                 static_cast<std::size_t>(x_to)];
  return table[static_cast<std::size_t>(x_to) *
                   static_cast<std::size_t>(card_first_arg_second) +
               static_cast<std::size_t>(x_from)];
}

}  // namespace

TreeDpResult tree_dp(const std::vector<std::vector<double>>& node_potentials,
                     const std::vector<std::vector<double>>& edge_potentials,
                     const std::vector<std::pair<int, int>>& edges,
                     const std::vector<int>& cards, Mode mode) {
  const int n = static_cast<int>(cards.size());
  if (node_potentials.size() != cards.size())
    fail(ErrorKind::dimension_mismatch, "tree_dp: node potential count mismatch");
  if (edge_potentials.size() != edges.size())
    fail(ErrorKind::dimension_mismatch, "tree_dp: edge potential count mismatch");
  for (int v = 0; v < n; ++v)
    if (node_potentials[static_cast<std::size_t>(v)].size() !=
        static_cast<std::size_t>(cards[static_cast<std::size_t>(v)]))
      fail(ErrorKind::dimension_mismatch,
           "tree_dp: node potential size mismatch at variable " + std::to_string(v));

  std::vector<std::vector<DpEdge>> adj(static_cast<std::size_t>(n));
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const auto [a, b] = edges[k];
    if (a < 0 || a >= n || b < 0 || b >= n || a == b)
      fail(ErrorKind::invalid_argument, "tree_dp: bad edge endpoint");
    const std::size_t want = static_cast<std::size_t>(cards[static_cast<std::size_t>(a)]) *
                             static_cast<std::size_t>(cards[static_cast<std::size_t>(b)]);
    if (edge_potentials[k].size() != want)
      fail(ErrorKind::dimension_mismatch,
           "tree_dp: edge potential size mismatch at edge " + std::to_string(k));
    adj[static_cast<std::size_t>(a)].push_back({b, static_cast<int>(k), true});
    adj[static_cast<std::size_t>(b)].push_back({a, static_cast<int>(k), false});
  }

  // up[v](x_v): combined subtree score below v, given x_v.
  std::vector<std::vector<double>> up(static_cast<std::size_t>(n));
  // choice[k][x_parent]: maximizing child value for backtracking (max mode),
  // stored per edge in its child->parent orientation.
  std::vector<std::vector<int>> choice(edges.size());
  std::vector<int> parent(static_cast<std::size_t>(n), -2);
  std::vector<int> order;  // visit order (roots first)
  order.reserve(static_cast<std::size_t>(n));

  TreeDpResult res;
  res.value = 0.0;
  if (mode == Mode::max) res.argmax.assign(static_cast<std::size_t>(n), 0);

  std::vector<int> stack;
  for (int root = 0; root < n; ++root) {
    if (parent[static_cast<std::size_t>(root)] != -2) continue;
    // Iterative DFS from the component's smallest node.
    parent[static_cast<std::size_t>(root)] = -1;
    stack.push_back(root);
    const std::size_t comp_begin = order.size();
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      order.push_back(v);
      for (const DpEdge& e : adj[static_cast<std::size_t>(v)]) {
        if (e.to == parent[static_cast<std::size_t>(v)]) continue;
        if (parent[static_cast<std::size_t>(e.to)] != -2)
          fail(ErrorKind::not_a_tree, "tree_dp: edge structure contains a cycle");
        parent[static_cast<std::size_t>(e.to)] = v;
        stack.push_back(e.to);
      }
    }
    // A component with as many edges as nodes would have been caught above;
    // a self-parallel edge also trips the cycle check via revisit.

    // Leaf-to-root accumulation in reverse visit order.
    for (std::size_t i = order.size(); i-- > comp_begin;) {
      const int v = order[i];
      up[static_cast<std::size_t>(v)] = node_potentials[static_cast<std::size_t>(v)];
      for (const DpEdge& e : adj[static_cast<std::size_t>(v)]) {
        if (parent[static_cast<std::size_t>(e.to)] != v) continue;
        // Fold child e.to into v.
        const int cv = cards[static_cast<std::size_t>(v)];
        const int cc = cards[static_cast<std::size_t>(e.to)];
        const int card_second =
            e.from_is_first ? cc : cv;  // fast-axis cardinality of the table
        auto& ch = choice[static_cast<std::size_t>(e.edge_idx)];
        if (mode == Mode::max) ch.assign(static_cast<std::size_t>(cv), 0);
        for (int xv = 0; xv < cv; ++xv) {
          if (mode == Mode::max) {
            double best = kNegInf;
            int best_xc = 0;
            for (int xc = 0; xc < cc; ++xc) {
              const double s = up[static_cast<std::size_t>(e.to)][static_cast<std::size_t>(xc)] +
                               edge_entry(edge_potentials[static_cast<std::size_t>(e.edge_idx)],
                                          e.from_is_first, xv, xc, card_second);
              if (s > best) {
                best = s;
                best_xc = xc;
              }
            }
            up[static_cast<std::size_t>(v)][static_cast<std::size_t>(xv)] += best;
            ch[static_cast<std::size_t>(xv)] = best_xc;
          } else {
            double mx = kNegInf;
            for (int xc = 0; xc < cc; ++xc)
              mx = std::max(mx, up[static_cast<std::size_t>(e.to)][static_cast<std::size_t>(xc)] +
                                    edge_entry(edge_potentials[static_cast<std::size_t>(e.edge_idx)],
                                               e.from_is_first, xv, xc, card_second));
            double acc = 0.0;
            for (int xc = 0; xc < cc; ++xc)
              acc += std::exp(up[static_cast<std::size_t>(e.to)][static_cast<std::size_t>(xc)] +
                              edge_entry(edge_potentials[static_cast<std::size_t>(e.edge_idx)],
                                         e.from_is_first, xv, xc, card_second) -
                              mx);
            up[static_cast<std::size_t>(v)][static_cast<std::size_t>(xv)] += mx + std::log(acc);
          }
        }
      }
    }

    if (mode == Mode::max) {
      const auto& table = up[static_cast<std::size_t>(root)];
      int best_x = 0;
      for (int x = 1; x < cards[static_cast<std::size_t>(root)]; ++x)
        if (table[static_cast<std::size_t>(x)] > table[static_cast<std::size_t>(best_x)])
          best_x = x;
      res.value += table[static_cast<std::size_t>(best_x)];
      res.argmax[static_cast<std::size_t>(root)] = best_x;
      // Top-down backtrack in visit order.
      for (std::size_t i = comp_begin; i < order.size(); ++i) {
        const int v = order[i];
        for (const DpEdge& e : adj[static_cast<std::size_t>(v)]) {
          if (parent[static_cast<std::size_t>(e.to)] != v) continue;
          res.argmax[static_cast<std::size_t>(e.to)] =
              choice[static_cast<std::size_t>(e.edge_idx)]
                    [static_cast<std::size_t>(res.argmax[static_cast<std::size_t>(v)])];
        }
      }
    } else {
      res.value += log_sum_exp(up[static_cast<std::size_t>(root)]);
    }
  }

  return res;
}

TreeDpResult tree_dp_model(const DiscreteModel& m, Mode mode) {
  if (!m.is_pairwise())
    fail(ErrorKind::unsupported_structure, "tree_dp_model: model is not pairwise");
  std::vector<std::vector<double>> node_pots(static_cast<std::size_t>(m.var_count()));
  for (int v = 0; v < m.var_count(); ++v) {
    const int k = m.unary_factor_index(v);
    if (k >= 0)
      node_pots[static_cast<std::size_t>(v)] = m.factors()[static_cast<std::size_t>(k)].table;
    else
      node_pots[static_cast<std::size_t>(v)].assign(
          static_cast<std::size_t>(m.cardinality(v)), 0.0);
  }
  std::vector<std::pair<int, int>> edges = m.pairwise_edges();
  std::vector<std::vector<double>> edge_pots;
  for (const auto& [i, j] : edges)
    edge_pots.push_back(
        m.factors()[static_cast<std::size_t>(m.pair_factor_index(i, j))].table);
  return tree_dp(node_pots, edge_pots, edges, m.cardinalities(), mode);
}

}  // namespace tcbo
