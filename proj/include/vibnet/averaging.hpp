#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "vibnet/errors.hpp"
#include "vibnet/graph.hpp"
#include "vibnet/schedule.hpp"
#include "vibnet/types.hpp"

namespace vibnet {

enum class AveragingMethod { closed_form, numeric };

inline const char* to_string(AveragingMethod method) {
  return method == AveragingMethod::closed_form ? "closed-form" : "numeric";
}

template <typename Scalar = double>
struct FunctionalMatrix {
  Matrix<Scalar> matrix;
  AveragingMethod method = AveragingMethod::closed_form;
  Scalar horizon = Scalar(0);  // numeric only
  // Closed form: rounding scale. Numeric: max entry change between the
  // averages over [0, T/2] and [0, T].
  Scalar tolerance = Scalar(0);
  // Some directed path runs through two controlled entries. The closed form
  // misses the cross-terms such paths produce; trust the numeric average.
  bool chained_controls = false;
  std::vector<std::string> warnings;
};

namespace detail {

// out += V(s) * x for a sparse schedule.
template <typename Scalar, typename Derived>
void add_v_times(const VibrationSchedule& sched, Scalar s,
                 const Eigen::MatrixBase<Derived>& x, Matrix<Scalar>& out,
                 Scalar sign = Scalar(1)) {
  using std::sin;
  for (const auto& e : sched.entries()) {
    const Scalar v =
        sign * Scalar(e.mu) * sin(Scalar(e.omega) * s + Scalar(e.phi));
    out.row(e.row) += v * x.row(e.col);
  }
}

// out += x * V(s) for a sparse schedule.
template <typename Scalar, typename Derived>
void add_times_v(const VibrationSchedule& sched, Scalar s,
                 const Eigen::MatrixBase<Derived>& x, Matrix<Scalar>& out,
                 Scalar sign = Scalar(1)) {
  using std::sin;
  for (const auto& e : sched.entries()) {
    const Scalar v =
        sign * Scalar(e.mu) * sin(Scalar(e.omega) * s + Scalar(e.phi));
    out.col(e.col) += v * x.col(e.row);
  }
}

// Propagates (Psi, Phi) with Psi' = V Psi and Phi' = -Phi V by one RK4 step.
template <typename Scalar>
class TransitionStepper {
 public:
  TransitionStepper(const VibrationSchedule& sched, int n)
      : sched_(sched), k_psi_(4, Matrix<Scalar>(n, n)),
        k_phi_(4, Matrix<Scalar>(n, n)), n_(n) {}

  void step(Matrix<Scalar>& psi, Matrix<Scalar>& phi, Scalar s, Scalar h) {
    const Scalar half = h / Scalar(2);
    stage(0, psi, phi, s);
    stage(1, psi + half * k_psi_[0], phi + half * k_phi_[0], s + half);
    stage(2, psi + half * k_psi_[1], phi + half * k_phi_[1], s + half);
    stage(3, psi + h * k_psi_[2], phi + h * k_phi_[2], s + h);
    psi += (h / Scalar(6)) *
           (k_psi_[0] + Scalar(2) * k_psi_[1] + Scalar(2) * k_psi_[2] + k_psi_[3]);
    phi += (h / Scalar(6)) *
           (k_phi_[0] + Scalar(2) * k_phi_[1] + Scalar(2) * k_phi_[2] + k_phi_[3]);
  }

 private:
  template <typename A, typename B>
  void stage(int k, const A& psi, const B& phi, Scalar s) {
    tmp_psi_ = psi;
    tmp_phi_ = phi;
    k_psi_[k].setZero(n_, n_);
    k_phi_[k].setZero(n_, n_);
    add_v_times(sched_, s, tmp_psi_, k_psi_[k]);
    add_times_v(sched_, s, tmp_phi_, k_phi_[k], Scalar(-1));
  }

  const VibrationSchedule& sched_;
  std::vector<Matrix<Scalar>> k_psi_;
  std::vector<Matrix<Scalar>> k_phi_;
  Matrix<Scalar> tmp_psi_;
  Matrix<Scalar> tmp_phi_;
  int n_;
};

}  // namespace detail

template <typename Scalar = double>
struct TransitionResult {
  Matrix<Scalar> psi;      // Psi(s, s0)
  Matrix<Scalar> psi_inv;  // integrated separately, not inverted
  Scalar residual = Scalar(0);  // ||Psi^{-1} Psi - I||
};

// State transition matrix of dx/ds = V(s) x from s0 to s by classical RK4
// with steps no longer than `step`.
template <typename Scalar = double>
TransitionResult<Scalar> transition_matrix(const VibrationSchedule& sched,
                                           int n, Scalar s0, Scalar s,
                                           Scalar step) {
  if (!(step > Scalar(0))) throw InputError("transition_matrix: step must be > 0");
  using std::ceil;
  using std::abs;
  const Scalar span = s - s0;
  const long steps = std::max(1L, static_cast<long>(ceil(abs(span) / step)));
  const Scalar h = span / Scalar(steps);

  TransitionResult<Scalar> out;
  out.psi = Matrix<Scalar>::Identity(n, n);
  out.psi_inv = Matrix<Scalar>::Identity(n, n);
  if (span != Scalar(0)) {
    detail::TransitionStepper<Scalar> stepper(sched, n);
    for (long k = 0; k < steps; ++k) {
      stepper.step(out.psi, out.psi_inv, s0 + Scalar(k) * h, h);
    }
  }
  if (!out.psi.allFinite() || !out.psi_inv.allFinite()) {
    throw NumericalError("transition_matrix: integration blew up");
  }
  out.residual =
      (out.psi_inv * out.psi - Matrix<Scalar>::Identity(n, n)).norm();
  return out;
}

enum class AveragingWindow {
  uniform,  // plain (1/T) integral
  smooth,   // exp(-1/(u(1-u))) bump weight, much faster convergence
};

template <typename Scalar = double>
struct AveragingOptions {
  // Horizon in the fast timescale; 0 picks periods * 2 pi / min omega.
  Scalar horizon = Scalar(0);
  Scalar periods = Scalar(500);
  // Quadrature/RK4 step; 0 picks (2 pi / max omega) / steps_per_period.
  Scalar step = Scalar(0);
  int steps_per_period = 50;
  AveragingWindow window = AveragingWindow::smooth;
};

namespace detail {

template <typename Scalar>
Scalar window_weight(AveragingWindow window, Scalar u) {
  if (window == AveragingWindow::uniform) return Scalar(1);
  using std::exp;
  if (u <= Scalar(0) || u >= Scalar(1)) return Scalar(0);
  return exp(Scalar(-1) / (u * (Scalar(1) - u)));
}

}  // namespace detail

// Time average of Psi^{-1} M Psi over [0, T] by trapezoidal quadrature on
// the RK4 grid (s0 = 0).
template <typename Scalar = double>
FunctionalMatrix<Scalar> averaged_matrix_numeric(
    const Matrix<Scalar>& m, const VibrationSchedule& sched,
    const AveragingOptions<Scalar>& options = {}) {
  const int n = static_cast<int>(m.rows());
  FunctionalMatrix<Scalar> out;
  out.method = AveragingMethod::numeric;
  out.chained_controls = has_chained_edges(n, sched.controlled_edges());
  if (sched.empty()) {
    out.matrix = m;
    return out;
  }
  for (const auto& e : sched.entries()) {
    if (e.row >= n || e.col >= n) {
      throw InputError("averaged_matrix_numeric: schedule entry outside matrix");
    }
  }

  const Scalar two_pi = Scalar(2) * std::numbers::pi_v<Scalar>;
  const Scalar slow_period = two_pi / Scalar(sched.min_frequency());
  const Scalar fast_period = two_pi / Scalar(sched.max_frequency());
  const Scalar horizon = options.horizon > Scalar(0)
                             ? options.horizon
                             : options.periods * slow_period;
  const Scalar step = options.step > Scalar(0)
                          ? options.step
                          : fast_period / Scalar(options.steps_per_period);
  if (horizon < Scalar(100) * slow_period) {
    out.warnings.push_back("horizon spans fewer than 100 slow periods");
  }
  if (step > fast_period / Scalar(50)) {
    out.warnings.push_back("step resolves the fastest vibration with fewer "
                           "than 50 samples per period");
  }

  using std::ceil;
  long steps = static_cast<long>(ceil(horizon / step));
  steps += steps % 2;  // T/2 must fall on the grid
  const Scalar h = horizon / Scalar(steps);

  Matrix<Scalar> psi = Matrix<Scalar>::Identity(n, n);
  Matrix<Scalar> phi = Matrix<Scalar>::Identity(n, n);
  detail::TransitionStepper<Scalar> stepper(sched, n);

  // Running sums for [0, T] and [0, T/2], each with its own window.
  Matrix<Scalar> full = Matrix<Scalar>::Zero(n, n);
  Matrix<Scalar> half = Matrix<Scalar>::Zero(n, n);
  Scalar full_w = Scalar(0);
  Scalar half_w = Scalar(0);
  const long mid = steps / 2;
  Matrix<Scalar> integrand(n, n);
  for (long k = 0; k <= steps; ++k) {
    integrand.noalias() = phi * m * psi;
    const Scalar edge = (k == 0 || k == steps) ? Scalar(0.5) : Scalar(1);
    const Scalar wf =
        edge * detail::window_weight(options.window, Scalar(k) / Scalar(steps));
    full += wf * integrand;
    full_w += wf;
    if (k <= mid) {
      const Scalar edge_h = (k == 0 || k == mid) ? Scalar(0.5) : Scalar(1);
      const Scalar wh =
          edge_h * detail::window_weight(options.window, Scalar(k) / Scalar(mid));
      half += wh * integrand;
      half_w += wh;
    }
    if (k < steps) {
      stepper.step(psi, phi, Scalar(k) * h, h);
      if (!psi.allFinite() || !phi.allFinite()) {
        throw NumericalError("averaged_matrix_numeric: integration blew up");
      }
    }
  }
  out.matrix = full / full_w;
  out.horizon = horizon;
  out.tolerance = (out.matrix - half / half_w).cwiseAbs().maxCoeff();
  return out;
}

// c_ij = 0.5 * (mu / omega)^2 for a sinusoidal entry.
inline double averaging_constant(const ScheduleEntry& e) {
  const double ratio = e.mu / e.omega;
  return 0.5 * ratio * ratio;
}

// Functional matrix m_ij - c_ij * m_ji on scheduled entries, diagonal
// untouched. Requires the controlled edges to form a DAG.
template <typename Scalar = double>
FunctionalMatrix<Scalar> functional_matrix_closed_form(
    const Matrix<Scalar>& m, const VibrationSchedule& sched) {
  const int n = static_cast<int>(m.rows());
  for (const auto& e : sched.entries()) {
    if (e.row >= n || e.col >= n) {
      throw InputError("functional_matrix_closed_form: schedule entry outside matrix");
    }
  }
  const EdgeSet controlled = sched.controlled_edges();
  const auto check = is_dag(DirectedGraph(n, controlled));
  if (!check.acyclic) {
    throw PreconditionError(
        "closed-form averaging needs the controlled edges to form a DAG "
        "(no directed cycle among controlled edges)",
        check.witness);
  }
  FunctionalMatrix<Scalar> out;
  out.method = AveragingMethod::closed_form;
  out.matrix = m;
  for (const auto& e : sched.entries()) {
    out.matrix(e.row, e.col) -= Scalar(averaging_constant(e)) * m(e.col, e.row);
  }
  out.chained_controls = has_chained_edges(n, controlled);
  if (out.chained_controls) {
    out.warnings.push_back("controlled entries are chained; the closed form "
                           "omits cross-terms, use the numeric average");
  }
  out.tolerance = std::numeric_limits<Scalar>::epsilon() * m.cwiseAbs().maxCoeff();
  return out;
}

// The closed form where it is exact (acyclic, unchained controlled set),
// the numeric average otherwise.
template <typename Scalar = double>
FunctionalMatrix<Scalar> functional_matrix(
    const Matrix<Scalar>& m, const VibrationSchedule& sched,
    const AveragingOptions<Scalar>& options = {}) {
  const int n = static_cast<int>(m.rows());
  const EdgeSet controlled = sched.controlled_edges();
  if (is_dag(DirectedGraph(n, controlled)).acyclic &&
      !has_chained_edges(n, controlled)) {
    return functional_matrix_closed_form(m, sched);
  }
  return averaged_matrix_numeric(m, sched, options);
}

template <typename Scalar = double>
struct FunctionalNetwork {
  DirectedGraph graph;
  std::vector<Scalar> diagonal;
};

// Off-diagonal entries above the threshold become edges col -> row. With
// `relative`, zero_tol is scaled by max |entry|.
template <typename Scalar = double>
FunctionalNetwork<Scalar> functional_network(const Matrix<Scalar>& mbar,
                                             Scalar zero_tol = Scalar(1e-6),
                                             bool relative = true) {
  const int n = static_cast<int>(mbar.rows());
  const Scalar threshold =
      relative && n > 0 ? zero_tol * mbar.cwiseAbs().maxCoeff() : zero_tol;
  EdgeSet edges;
  FunctionalNetwork<Scalar> out;
  out.diagonal.resize(n);
  for (int i = 0; i < n; ++i) {
    out.diagonal[i] = mbar(i, i);
    for (int j = 0; j < n; ++j) {
      using std::abs;
      if (i != j && abs(mbar(i, j)) > threshold) edges.insert({j, i});
    }
  }
  out.graph = DirectedGraph(n, std::move(edges));
  return out;
}

}  // namespace vibnet
