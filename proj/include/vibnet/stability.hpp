#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "vibnet/errors.hpp"
#include "vibnet/graph.hpp"
#include "vibnet/network.hpp"
#include "vibnet/types.hpp"

namespace vibnet {

template <typename Scalar = double>
struct Spectrum {
  std::vector<std::complex<Scalar>> eigenvalues;
  Scalar abscissa = -std::numeric_limits<Scalar>::infinity();

  static Spectrum from(std::vector<std::complex<Scalar>> values) {
    Spectrum s;
    s.eigenvalues = std::move(values);
    for (const auto& z : s.eigenvalues) s.abscissa = std::max(s.abscissa, z.real());
    return s;
  }
};

template <typename Scalar>
struct EigenOptions {
  // Residual ||M v - lambda v|| / (||v|| ||M||) accepted on the checked pair.
  Scalar residual_tol = Scalar(1e-8);
  bool check_residual = true;
};

// Full spectrum of a real square matrix. Uses Eigen's Hessenberg/shifted-QR
// solver; the eigenpair with the largest real part is checked by residual.
template <typename Scalar>
Spectrum<Scalar> eigenvalues(const Matrix<Scalar>& m,
                             const EigenOptions<Scalar>& options = {}) {
  if (m.rows() != m.cols()) throw InputError("eigenvalues: matrix not square");
  if (!m.allFinite()) throw InputError("eigenvalues: non-finite entries");
  const auto n = m.rows();
  if (n == 0) return {};

  Eigen::EigenSolver<Matrix<Scalar>> solver(m, options.check_residual);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("eigenvalues: QR iteration did not converge for a " +
                         std::to_string(n) + "x" + std::to_string(n) +
                         " matrix");
  }
  const auto& values = solver.eigenvalues();
  std::vector<std::complex<Scalar>> out(values.data(), values.data() + n);

  if (options.check_residual) {
    Eigen::Index top = 0;
    for (Eigen::Index k = 1; k < n; ++k) {
      if (values[k].real() > values[top].real()) top = k;
    }
    const Matrix<std::complex<Scalar>> vectors = solver.eigenvectors();
    const auto v = vectors.col(top);
    const Scalar scale = std::max(m.norm(), std::numeric_limits<Scalar>::min());
    const Scalar residual =
        (m.template cast<std::complex<Scalar>>() * v - values[top] * v).norm() /
        (v.norm() * scale);
    if (!(residual < options.residual_tol)) {
      throw NumericalError("eigenvalues: eigenpair residual " +
                           std::to_string(static_cast<double>(residual)) +
                           " exceeds tolerance");
    }
  }
  return Spectrum<Scalar>::from(std::move(out));
}

template <typename Scalar>
Scalar spectral_abscissa(const Matrix<Scalar>& m) {
  return eigenvalues<Scalar>(m).abscissa;
}

template <typename Scalar>
bool is_hurwitz(const Matrix<Scalar>& m, Scalar margin = Scalar(0)) {
  return spectral_abscissa<Scalar>(m) < -margin;
}

// Spectrum of a network on a DAG, read off the diagonal: a topological
// relabelling makes the matrix triangular. Throws PreconditionError with the
// cycle when the graph is cyclic.
inline Spectrum<double> dag_spectrum_oracle(const NetworkSystem& sys) {
  const auto check = is_dag(DirectedGraph::of(sys));
  if (!check.acyclic) {
    throw PreconditionError("dag_spectrum_oracle: network graph is cyclic",
                            check.witness);
  }
  std::vector<std::complex<double>> values;
  values.reserve(sys.size());
  for (double d : sys.intrinsic()) values.emplace_back(d, 0.0);
  return Spectrum<double>::from(std::move(values));
}

// Greedy multiset matching: repeatedly pair the closest remaining
// eigenvalues and return the largest distance used. Infinity when the sizes
// differ.
template <typename Scalar>
Scalar spectrum_distance(const std::vector<std::complex<Scalar>>& a,
                         const std::vector<std::complex<Scalar>>& b) {
  if (a.size() != b.size()) return std::numeric_limits<Scalar>::infinity();
  std::vector<bool> used_a(a.size(), false);
  std::vector<bool> used_b(b.size(), false);
  Scalar worst = Scalar(0);
  for (std::size_t round = 0; round < a.size(); ++round) {
    Scalar best = std::numeric_limits<Scalar>::infinity();
    std::size_t bi = 0;
    std::size_t bj = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (used_a[i]) continue;
      for (std::size_t j = 0; j < b.size(); ++j) {
        if (used_b[j]) continue;
        const Scalar dist = std::abs(a[i] - b[j]);
        if (dist < best) {
          best = dist;
          bi = i;
          bj = j;
        }
      }
    }
    used_a[bi] = true;
    used_b[bj] = true;
    worst = std::max(worst, best);
  }
  return worst;
}

}  // namespace vibnet
