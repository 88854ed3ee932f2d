#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <Eigen/LU>

#include "vibnet/errors.hpp"
#include "vibnet/stability.hpp"
#include "vibnet/types.hpp"

namespace vibnet {

template <typename Scalar>
struct PowerIterationOptions {
  int max_iterations = 20000;
  Scalar tolerance = Scalar(1e-13);
};

// Largest eigenvalue of a Hermitian positive semidefinite matrix by power
// iteration. `start` is used as the initial vector when it has the right size
// and is updated with the final iterate.
template <typename Scalar, typename T>
Scalar power_iteration_hermitian(const Matrix<T>& h, Vector<T>& start,
                                 const PowerIterationOptions<Scalar>& opts = {}) {
  const auto n = h.rows();
  if (n == 0) return Scalar(0);
  if (start.size() != n || start.norm() == Scalar(0)) {
    start.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      start[i] = T(Scalar(1) + Scalar(i) / Scalar(n + 1));
    }
  }
  Vector<T> x = start / start.norm();
  Scalar lambda = Scalar(0);
  Vector<T> y(n);
  for (int it = 0; it < opts.max_iterations; ++it) {
    y.noalias() = h * x;
    using std::abs;
    using std::real;
    const Scalar next = real(x.dot(y));  // Rayleigh quotient, x normalized
    const Scalar norm = y.norm();
    if (norm == Scalar(0)) {
      start = x;
      return Scalar(0);
    }
    x = y / norm;
    if (it > 0 && abs(next - lambda) <= opts.tolerance * abs(next)) {
      start = x;
      return std::max(next, norm);
    }
    lambda = next;
  }
  throw NumericalError("power iteration did not converge after " +
                       std::to_string(opts.max_iterations) + " iterations");
}

// Largest singular value of (j omega I - M)^{-1}, via power iteration on
// G^H G. `warm` carries the dominant vector between nearby frequencies.
template <typename Scalar>
Scalar resolvent_gain(const Matrix<Scalar>& m, Scalar omega,
                      Vector<std::complex<Scalar>>& warm) {
  using Complex = std::complex<Scalar>;
  Matrix<Complex> a = -m.template cast<Complex>();
  a.diagonal().array() += Complex(Scalar(0), omega);
  Eigen::PartialPivLU<Matrix<Complex>> lu(a);
  const Matrix<Complex> g = lu.inverse();
  if (!g.allFinite()) {
    throw NumericalError("resolvent is singular on the imaginary axis");
  }
  const Matrix<Complex> gram = g.adjoint() * g;
  using std::sqrt;
  return sqrt(power_iteration_hermitian<Scalar, Complex>(gram, warm));
}

template <typename Scalar = double>
struct HinfOptions {
  // Both 0: band [1e-3 |alpha(M)|, 1e3 rho(M)].
  Scalar omega_min = Scalar(0);
  Scalar omega_max = Scalar(0);
  int grid_points = 400;
  int refine_iterations = 80;
};

template <typename Scalar = double>
struct HinfResult {
  Scalar norm = Scalar(0);
  Scalar omega_peak = Scalar(0);
  Scalar grid_norm = Scalar(0);  // best value on the grid before refinement
  Scalar omega_min = Scalar(0);
  Scalar omega_max = Scalar(0);
  int grid_points = 0;
  int evaluations = 0;
};

// sup over omega of sigma_max((j omega I - M)^{-1}) by a logarithmic sweep
// (plus omega = 0) and golden-section refinement around the best grid point.
// The result never exceeds the true norm beyond rounding: it is an estimate
// from below.
template <typename Scalar = double>
HinfResult<Scalar> hinf_norm(const Matrix<Scalar>& m,
                             const HinfOptions<Scalar>& options = {}) {
  const auto spectrum = eigenvalues<Scalar>(m);
  if (!(spectrum.abscissa < Scalar(0))) {
    throw PreconditionError("hinf_norm: matrix is not Hurwitz, norm unbounded");
  }
  HinfResult<Scalar> out;
  using std::abs;
  using std::log10;
  using std::pow;
  Scalar lo = options.omega_min;
  Scalar hi = options.omega_max;
  if (!(lo > Scalar(0)) || !(hi > lo)) {
    Scalar radius = Scalar(0);
    for (const auto& z : spectrum.eigenvalues) radius = std::max(radius, abs(z));
    lo = Scalar(1e-3) * abs(spectrum.abscissa);
    hi = Scalar(1e3) * std::max(radius, abs(spectrum.abscissa));
  }
  out.omega_min = lo;
  out.omega_max = hi;
  out.grid_points = options.grid_points;

  Vector<std::complex<Scalar>> warm;
  std::vector<Scalar> omegas{Scalar(0)};
  const int count = std::max(options.grid_points, 2);
  for (int k = 0; k < count; ++k) {
    omegas.push_back(pow(Scalar(10), log10(lo) + (log10(hi) - log10(lo)) *
                                                    Scalar(k) / Scalar(count - 1)));
  }
  std::vector<Scalar> gains;
  gains.reserve(omegas.size());
  for (Scalar w : omegas) gains.push_back(resolvent_gain<Scalar>(m, w, warm));
  out.evaluations = static_cast<int>(omegas.size());

  const auto best = static_cast<std::size_t>(
      std::max_element(gains.begin(), gains.end()) - gains.begin());
  out.grid_norm = gains[best];
  out.norm = gains[best];
  out.omega_peak = omegas[best];

  // Golden-section search on the bracket formed by the grid neighbours.
  Scalar a = best == 0 ? Scalar(0) : omegas[best - 1];
  Scalar b = best + 1 < omegas.size() ? omegas[best + 1] : omegas[best];
  if (b > a) {
    const Scalar ratio = (std::sqrt(Scalar(5)) - Scalar(1)) / Scalar(2);
    Scalar c = b - ratio * (b - a);
    Scalar d = a + ratio * (b - a);
    Scalar fc = resolvent_gain<Scalar>(m, c, warm);
    Scalar fd = resolvent_gain<Scalar>(m, d, warm);
    out.evaluations += 2;
    for (int it = 0; it < options.refine_iterations; ++it) {
      if (fc > fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - ratio * (b - a);
        fc = resolvent_gain<Scalar>(m, c, warm);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + ratio * (b - a);
        fd = resolvent_gain<Scalar>(m, d, warm);
      }
      ++out.evaluations;
      if (fc > out.norm) {
        out.norm = fc;
        out.omega_peak = c;
      }
      if (fd > out.norm) {
        out.norm = fd;
        out.omega_peak = d;
      }
    }
  }
  return out;
}

// Lower bound on the unstructured real stability radius: 1 / ||G_M||_Hinf.
template <typename Scalar = double>
Scalar ursr_lower_bound(const Matrix<Scalar>& m,
                        const HinfOptions<Scalar>& options = {}) {
  return Scalar(1) / hinf_norm<Scalar>(m, options).norm;
}

// Spectral norm of a real matrix by power iteration on A^T A.
template <typename Scalar>
Scalar spectral_norm(const Matrix<Scalar>& a) {
  Vector<Scalar> start;
  const Matrix<Scalar> gram = a.transpose() * a;
  using std::sqrt;
  return sqrt(power_iteration_hermitian<Scalar, Scalar>(gram, start));
}

template <typename Scalar = double>
struct StressResult {
  int trials = 0;
  int stable = 0;
  Scalar worst_abscissa = -std::numeric_limits<Scalar>::infinity();
  double fraction_stable() const {
    return trials == 0 ? 1.0 : static_cast<double>(stable) / trials;
  }
};

// Samples real perturbations with i.i.d. normal entries rescaled to spectral
// norm scale * bound and counts how many leave M + Delta Hurwitz.
template <typename Scalar = double>
StressResult<Scalar> stress_test(const Matrix<Scalar>& m, Scalar bound,
                                 int trials, std::uint64_t seed,
                                 Scalar scale = Scalar(0.99)) {
  if (!is_hurwitz<Scalar>(m)) {
    throw PreconditionError("stress_test: matrix is not Hurwitz");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto n = m.rows();
  StressResult<Scalar> out;
  for (int t = 0; t < trials; ++t) {
    Matrix<Scalar> delta(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
      for (Eigen::Index i = 0; i < n; ++i) delta(i, j) = Scalar(normal(rng));
    }
    delta *= scale * bound / spectral_norm<Scalar>(delta);
    const Scalar alpha = spectral_abscissa<Scalar>(m + delta);
    out.worst_abscissa = std::max(out.worst_abscissa, alpha);
    ++out.trials;
    if (alpha < Scalar(0)) ++out.stable;
  }
  return out;
}

}  // namespace vibnet
