#include "vibnet/network.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "vibnet/errors.hpp"

namespace vibnet {

NetworkSystem::NetworkSystem(std::vector<double> d,
                             std::vector<WeightedEdge> edges)
    : d_(std::move(d)), edges_(std::move(edges)) {
  const int n = size();
  if (n == 0) throw InputError("network must have at least one node");
  for (int i = 0; i < n; ++i) {
    if (!std::isfinite(d_[i])) {
      throw InputError("node " + std::to_string(i + 1) +
                       ": intrinsic dynamics must be finite");
    }
  }
  std::set<std::pair<int, int>> seen;
  for (const auto& e : edges_) {
    std::ostringstream tag;
    tag << "edge " << e.from + 1 << "->" << e.to + 1;
    if (e.from < 0 || e.from >= n || e.to < 0 || e.to >= n) {
      throw InputError(tag.str() + ": node index out of range");
    }
    if (e.from == e.to) {
      throw InputError(tag.str() + ": self-loops belong in the diagonal");
    }
    if (e.weight == 0.0 || !std::isfinite(e.weight)) {
      throw InputError(tag.str() + ": weight must be finite and nonzero");
    }
    if (!seen.emplace(e.from, e.to).second) {
      throw InputError(tag.str() + ": duplicate edge");
    }
  }
}

NetworkSystem network_from_matrix(const MatrixXd& m) {
  if (m.rows() != m.cols()) throw InputError("matrix must be square");
  const int n = static_cast<int>(m.rows());
  std::vector<double> d(n);
  std::vector<WeightedEdge> edges;
  for (int i = 0; i < n; ++i) d[i] = m(i, i);
  for (int from = 0; from < n; ++from) {
    for (int to = 0; to < n; ++to) {
      if (from != to && m(to, from) != 0.0) {
        edges.push_back({from, to, m(to, from)});
      }
    }
  }
  return NetworkSystem(std::move(d), std::move(edges));
}

ValidationReport validate(const NetworkSystem& sys) {
  ValidationReport report;
  const auto& d = sys.intrinsic();
  for (int i = 0; i < sys.size(); ++i) {
    if (!(d[i] < 0.0)) {
      report.negative_diagonal = false;
      report.violations.push_back(
          {i, i, "intrinsic dynamics d_" + std::to_string(i + 1) +
                     " is not negative"});
    }
  }

  std::map<std::pair<int, int>, double> weight;
  for (const auto& e : sys.edges()) weight[{e.from, e.to}] = e.weight;
  for (const auto& [key, w] : weight) {
    const auto [from, to] = key;
    if (from > to) continue;  // visit each pair once
    auto back = weight.find({to, from});
    if (back == weight.end()) continue;
    if ((w > 0.0) != (back->second > 0.0)) {
      report.sign_consistent = false;
      report.violations.push_back(
          {to, from, "bidirected pair {" + std::to_string(from + 1) + "," +
                         std::to_string(to + 1) + "} has opposite signs"});
    }
  }
  return report;
}

}  // namespace vibnet
