#pragma once

#include <string>
#include <vector>

#include "vibnet/types.hpp"

namespace vibnet {

struct WeightedEdge {
  int from = 0;
  int to = 0;
  double weight = 0.0;

  bool operator==(const WeightedEdge&) const = default;
};

// Linear network x' = (D + A) x. Node indices are 0-based; the weight of
// edge j -> i is stored at matrix entry (i, j).
class NetworkSystem {
 public:
  NetworkSystem() = default;

  // Throws InputError on out-of-range indices, self-loops, duplicate edges,
  // zero or non-finite weights.
  NetworkSystem(std::vector<double> d, std::vector<WeightedEdge> edges);

  int size() const { return static_cast<int>(d_.size()); }
  const std::vector<double>& intrinsic() const { return d_; }
  const std::vector<WeightedEdge>& edges() const { return edges_; }

  bool operator==(const NetworkSystem&) const = default;

 private:
  std::vector<double> d_;
  std::vector<WeightedEdge> edges_;
};

template <typename Scalar = double>
Matrix<Scalar> build_matrix(const NetworkSystem& sys) {
  const int n = sys.size();
  Matrix<Scalar> m = Matrix<Scalar>::Zero(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = Scalar(sys.intrinsic()[i]);
  for (const auto& e : sys.edges()) m(e.to, e.from) = Scalar(e.weight);
  return m;
}

// Inverse of build_matrix: nonzero off-diagonal entries become edges, sorted
// by (from, to).
NetworkSystem network_from_matrix(const MatrixXd& m);

struct Violation {
  int row = 0;
  int col = 0;
  std::string message;
};

struct ValidationReport {
  bool negative_diagonal = true;  // every d_i < 0
  bool sign_consistent = true;  // sign(a_ij) == sign(a_ji) on bidirected pairs
  std::vector<Violation> violations;

  bool ok() const { return negative_diagonal && sign_consistent; }
};

ValidationReport validate(const NetworkSystem& sys);

}  // namespace vibnet
