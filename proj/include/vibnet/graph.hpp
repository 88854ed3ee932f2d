#pragma once

#include <set>
#include <vector>

#include "vibnet/network.hpp"
#include "vibnet/types.hpp"

namespace vibnet {

using EdgeSet = std::set<Edge>;

// Node/edge structure of a network. Set semantics, no self-loops.
class DirectedGraph {
 public:
  explicit DirectedGraph(int n = 0) : n_(n) {}
  // Throws InputError on bad indices or self-loops.
  DirectedGraph(int n, EdgeSet edges);

  static DirectedGraph of(const NetworkSystem& sys);

  int size() const { return n_; }
  const EdgeSet& edges() const { return edges_; }
  bool contains(const Edge& e) const { return edges_.count(e) != 0; }

  // Returns a copy with `e` inserted.
  DirectedGraph with(const Edge& e) const;

  // Out-neighbours of every node, in ascending order.
  std::vector<std::vector<int>> successors() const;

  bool operator==(const DirectedGraph&) const = default;

 private:
  int n_ = 0;
  EdgeSet edges_;
};

// Edges (i, j) whose reverse (j, i) is also present.
EdgeSet bidirected_edges(const DirectedGraph& g);

// The graph left after deleting every bidirected edge.
DirectedGraph unidirected_residual(const DirectedGraph& g);

struct DagCheck {
  bool acyclic = false;
  // Topological order when acyclic (sources first, ties broken by smallest
  // index); otherwise a directed cycle as a node sequence, first node not
  // repeated at the end.
  std::vector<int> witness;
};

DagCheck is_dag(const DirectedGraph& g);

struct StabilizabilityVerdict {
  bool stabilizable = false;  // sufficient condition only
  DirectedGraph residual;
  std::vector<int> witness;  // topological order or residual cycle
};

StabilizabilityVerdict is_structurally_stabilizable(const DirectedGraph& g);

struct PlacementResult {
  EdgeSet control_set;  // one orientation per bidirected pair, to be vibrated
  EdgeSet kept_set;     // the complementary orientations
  DirectedGraph final_graph;  // residual plus kept_set, a DAG
  std::vector<int> final_order;  // topological order of final_graph
  // Control edges in the order their pairs were processed.
  std::vector<Edge> control_sequence;
};

// Control input placement. Pairs are visited in lexicographic order of
// (min node, max node); for each pair the orientation min -> max is tried
// first. Throws NotStabilizableError when the residual is cyclic.
PlacementResult place_controls(const DirectedGraph& g);

// Node order such that P M P^T is lower-triangular, where P maps old index
// order[k] to new index k. Throws PreconditionError with a cycle witness on
// cyclic input.
std::vector<int> topological_permutation(const DirectedGraph& g);

// Permutation matrix P with (P M P^T)(k, l) = M(order[k], order[l]).
Eigen::PermutationMatrix<Eigen::Dynamic> permutation_matrix(
    const std::vector<int>& order);

// True if some directed path uses two or more edges of `edges`.
bool has_chained_edges(int n, const EdgeSet& edges);

}  // namespace vibnet
