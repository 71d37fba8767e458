#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "model.hpp"

namespace tcbo {

// A region: a set of variables (ascending), a non-negative counting number,
// and the share of the model's log potentials assigned to it at construction.
struct Region {
  std::vector<int> scope;
  double c = 0.0;
  std::vector<double> theta0;  // log table over scope, last variable fastest
};

// Directed containment edge: child scope is a subset of the parent scope
// (equality is tolerated for degenerate stars, where projection is identity).
struct RegionEdge {
  int parent = -1;
  int child = -1;
};

// Region graph over a fixed set of variable cardinalities. Construction
// validates scopes, containment, counting numbers, and table sizes; the
// theta0 tables must sum to the model energy over every joint state, which
// the builders guarantee and tests verify by enumeration.
class RegionGraph {
 public:
  RegionGraph(std::vector<Region> regions, std::vector<RegionEdge> edges,
              std::vector<int> cardinalities);

  const std::vector<Region>& regions() const { return regions_; }
  const std::vector<RegionEdge>& edges() const { return edges_; }
  const std::vector<int>& cardinalities() const { return cards_; }

  const std::vector<int>& parents_of(int region) const {
    return parents_[static_cast<std::size_t>(region)];
  }
  const std::vector<int>& children_of(int region) const {
    return children_[static_cast<std::size_t>(region)];
  }
  // Edge indices incident to a region.
  const std::vector<int>& in_edges(int region) const {
    return in_edges_[static_cast<std::size_t>(region)];
  }
  const std::vector<int>& out_edges(int region) const {
    return out_edges_[static_cast<std::size_t>(region)];
  }
  std::vector<int> region_cards(int region) const;

 private:
  std::vector<Region> regions_;
  std::vector<RegionEdge> edges_;
  std::vector<int> cards_;
  std::vector<std::vector<int>> parents_, children_, in_edges_, out_edges_;
};

// Pair regions (one per arity-2 factor) over singleton regions (one per
// variable). A pair's theta0 is its factor table plus an equal 1/deg share
// of each endpoint's unary table, where deg counts the pairwise factors
// incident to that endpoint; singletons start at zero. Unaries of isolated
// variables stay on their singleton. c_pair must be positive, c_singleton
// non-negative.
RegionGraph build_pair_singleton(const DiscreteModel& m, double c_pair,
                                 double c_singleton);

// One star region per variable (scope {i} + neighbors, c = 1, theta0 =
// unary_i + half of each incident pair table) over one edge region per
// pairwise factor (c = 0, theta0 = 0). Each edge region has exactly its two
// endpoint stars as parents.
RegionGraph build_star_edge(const DiscreteModel& m);

// A convex combination of forests covering the model's edges. Every tree
// spans all variables (isolated nodes allowed); weights sum to 1; rho of a
// model edge is the total weight of the trees containing it.
struct TreeDecomposition {
  struct Tree {
    std::vector<std::pair<int, int>> edges;
    double weight = 0.0;
  };
  std::vector<Tree> trees;
  std::vector<int> node_order;  // processing order used by chain schedules
  // rho for each model edge, parallel to DiscreteModel::pairwise_edges().
  std::vector<double> rho;
};

// Two forests on a rows x cols grid: all row chains and all column chains,
// weight 1/2 each, so every grid edge has rho = 1/2. node_order is row-major.
// The model's pairwise structure must be exactly the grid.
TreeDecomposition build_grid_chain_decomposition(const DiscreteModel& m, int rows,
                                                 int cols);

// The single path 0-1-...-n-1 as one tree with weight 1 (rho = 1 on every
// edge). The model's pairwise structure must be exactly that path.
TreeDecomposition build_path_decomposition(const DiscreteModel& m);

// True when every tree is a union of chains that are strictly increasing in
// node_order position. Non-chain trees (a node of degree > 2, or a cycle)
// are a structural error.
bool check_monotonic(const TreeDecomposition& d, int var_count);

// Grid shape detection: (rows, cols) such that the model's pairwise edges
// are exactly the 4-neighbor grid on row-major variable ids, if any.
std::optional<std::pair<int, int>> infer_grid_dims(const DiscreteModel& m);

}  // namespace tcbo
