#pragma once

#include <compare>
#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace vibnet {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using MatrixXd = Matrix<double>;
using VectorXd = Vector<double>;

// A directed edge between 0-based node indices. Edge j -> i lives at matrix
// entry (i, j).
struct Edge {
  int from = 0;
  int to = 0;

  auto operator<=>(const Edge&) const = default;

  Edge reversed() const { return {to, from}; }
};

}  // namespace vibnet
