#include "vibnet/graph.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <queue>
#include <string>

#include "vibnet/errors.hpp"

namespace vibnet {

namespace {

std::string format_cycle(const std::vector<int>& cycle) {
  std::string out;
  for (int v : cycle) out += std::to_string(v + 1) + " -> ";
  if (!cycle.empty()) out += std::to_string(cycle.front() + 1);
  return out;
}

// Shortest directed cycle through any node, found by BFS from each node.
std::vector<int> shortest_cycle(const DirectedGraph& g,
                                const std::vector<bool>& candidate) {
  const int n = g.size();
  const auto succ = g.successors();
  std::vector<int> best;
  for (int s = 0; s < n; ++s) {
    if (!candidate[s]) continue;
    std::vector<int> parent(n, -1);
    std::vector<bool> seen(n, false);
    std::deque<int> queue;
    seen[s] = true;
    queue.push_back(s);
    int closing = -1;
    while (!queue.empty() && closing < 0) {
      const int u = queue.front();
      queue.pop_front();
      for (int v : succ[u]) {
        if (v == s) {
          closing = u;
          break;
        }
        if (!seen[v]) {
          seen[v] = true;
          parent[v] = u;
          queue.push_back(v);
        }
      }
    }
    if (closing < 0) continue;
    std::vector<int> cycle;
    for (int v = closing; v != -1; v = parent[v]) cycle.push_back(v);
    std::reverse(cycle.begin(), cycle.end());
    if (best.empty() || cycle.size() < best.size()) best = std::move(cycle);
  }
  return best;
}

}  // namespace

DirectedGraph::DirectedGraph(int n, EdgeSet edges)
    : n_(n), edges_(std::move(edges)) {
  for (const auto& e : edges_) {
    if (e.from < 0 || e.from >= n_ || e.to < 0 || e.to >= n_) {
      throw InputError("edge index out of range");
    }
    if (e.from == e.to) throw InputError("self-loop in graph");
  }
}

DirectedGraph DirectedGraph::of(const NetworkSystem& sys) {
  EdgeSet edges;
  for (const auto& e : sys.edges()) edges.insert({e.from, e.to});
  return DirectedGraph(sys.size(), std::move(edges));
}

DirectedGraph DirectedGraph::with(const Edge& e) const {
  EdgeSet edges = edges_;
  edges.insert(e);
  return DirectedGraph(n_, std::move(edges));
}

std::vector<std::vector<int>> DirectedGraph::successors() const {
  std::vector<std::vector<int>> succ(n_);
  // std::set iteration is sorted by (from, to), so lists come out ascending.
  for (const auto& e : edges_) succ[e.from].push_back(e.to);
  return succ;
}

EdgeSet bidirected_edges(const DirectedGraph& g) {
  EdgeSet out;
  for (const auto& e : g.edges()) {
    if (g.contains(e.reversed())) out.insert(e);
  }
  return out;
}

DirectedGraph unidirected_residual(const DirectedGraph& g) {
  EdgeSet out;
  for (const auto& e : g.edges()) {
    if (!g.contains(e.reversed())) out.insert(e);
  }
  return DirectedGraph(g.size(), std::move(out));
}

DagCheck is_dag(const DirectedGraph& g) {
  const int n = g.size();
  const auto succ = g.successors();
  std::vector<int> indegree(n, 0);
  for (const auto& e : g.edges()) ++indegree[e.to];

  // Kahn's algorithm with a min-heap so the order is deterministic.
  std::priority_queue<int, std::vector<int>, std::greater<>> ready;
  for (int v = 0; v < n; ++v) {
    if (indegree[v] == 0) ready.push(v);
  }
  std::vector<int> order;
  order.reserve(n);
  while (!ready.empty()) {
    const int u = ready.top();
    ready.pop();
    order.push_back(u);
    for (int v : succ[u]) {
      if (--indegree[v] == 0) ready.push(v);
    }
  }
  if (static_cast<int>(order.size()) == n) return {true, std::move(order)};

  // Nodes left with positive indegree contain every cycle.
  std::vector<bool> remaining(n, false);
  for (int v = 0; v < n; ++v) remaining[v] = indegree[v] > 0;
  return {false, shortest_cycle(g, remaining)};
}

StabilizabilityVerdict is_structurally_stabilizable(const DirectedGraph& g) {
  StabilizabilityVerdict verdict;
  verdict.residual = unidirected_residual(g);
  auto check = is_dag(verdict.residual);
  verdict.stabilizable = check.acyclic;
  verdict.witness = std::move(check.witness);
  return verdict;
}

PlacementResult place_controls(const DirectedGraph& g) {
  auto verdict = is_structurally_stabilizable(g);
  if (!verdict.stabilizable) {
    throw NotStabilizableError(
        "unidirected residual has a directed cycle: " +
            format_cycle(verdict.witness),
        verdict.witness);
  }

  const EdgeSet bidirected = bidirected_edges(g);
  std::vector<std::pair<int, int>> pairs;
  for (const auto& e : bidirected) {
    if (e.from < e.to) pairs.emplace_back(e.from, e.to);
  }
  std::sort(pairs.begin(), pairs.end());

  PlacementResult result;
  DirectedGraph current = verdict.residual;
  for (const auto& [lo, hi] : pairs) {
    bool placed = false;
    for (const Edge candidate : {Edge{lo, hi}, Edge{hi, lo}}) {
      DirectedGraph trial = current.with(candidate);
      if (!is_dag(trial).acyclic) continue;
      current = std::move(trial);
      result.kept_set.insert(candidate);
      result.control_set.insert(candidate.reversed());
      result.control_sequence.push_back(candidate.reversed());
      placed = true;
      break;
    }
    if (!placed) {
      // Unreachable for an acyclic residual: one orientation always fits.
      throw NumericalError("placement failed for pair {" +
                           std::to_string(lo + 1) + "," +
                           std::to_string(hi + 1) + "}");
    }
  }
  result.final_order = is_dag(current).witness;
  result.final_graph = std::move(current);
  return result;
}

std::vector<int> topological_permutation(const DirectedGraph& g) {
  auto check = is_dag(g);
  if (!check.acyclic) {
    throw PreconditionError(
        "graph is not acyclic: " + format_cycle(check.witness),
        check.witness);
  }
  return check.witness;
}

Eigen::PermutationMatrix<Eigen::Dynamic> permutation_matrix(
    const std::vector<int>& order) {
  // Eigen's P * M places row i of M at row indices()[i].
  const int n = static_cast<int>(order.size());
  Eigen::PermutationMatrix<Eigen::Dynamic> p(n);
  for (int k = 0; k < n; ++k) p.indices()[order[k]] = k;
  return p;
}

bool has_chained_edges(int n, const EdgeSet& edges) {
  std::vector<bool> has_in(n, false);
  std::vector<bool> has_out(n, false);
  for (const auto& e : edges) {
    has_out[e.from] = true;
    has_in[e.to] = true;
  }
  for (int v = 0; v < n; ++v) {
    if (has_in[v] && has_out[v]) return true;
  }
  return false;
}

}  // namespace vibnet
