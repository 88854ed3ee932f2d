#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "vibnet/averaging.hpp"
#include "vibnet/errors.hpp"
#include "vibnet/schedule.hpp"
#include "vibnet/stability.hpp"
#include "vibnet/types.hpp"

namespace vibnet {

template <typename Scalar = double>
struct Trajectory {
  std::vector<Scalar> times;
  std::vector<Vector<Scalar>> states;
  Scalar epsilon = Scalar(0);  // 0 when uncontrolled
  Scalar step = Scalar(0);
  bool blowup = false;  // integration hit a non-finite state and stopped
  std::vector<std::string> warnings;

  std::size_t size() const { return times.size(); }
};

// Step change M -> M + delta applied from `onset` on.
template <typename Scalar = double>
struct Perturbation {
  Matrix<Scalar> delta;
  Scalar onset = Scalar(0);
};

template <typename Scalar = double>
struct SimulationOptions {
  // Record every `stride`-th step; the final state is always recorded.
  int stride = 1;
  std::optional<Perturbation<Scalar>> perturbation;
};

namespace detail {

template <typename Scalar>
class ControlledRhs {
 public:
  ControlledRhs(const Matrix<Scalar>& m, const VibrationSchedule& sched,
                const std::optional<Perturbation<Scalar>>& perturbation)
      : m_(m), sched_(sched), perturbation_(perturbation) {}

  void operator()(Scalar t, const Vector<Scalar>& x, Vector<Scalar>& dx) const {
    dx.noalias() = m_ * x;
    if (perturbation_ && t >= perturbation_->onset) {
      dx.noalias() += perturbation_->delta * x;
    }
    if (sched_.empty()) return;
    using std::sin;
    const Scalar eps = Scalar(sched_.epsilon());
    const Scalar s = t / eps;
    for (const auto& e : sched_.entries()) {
      const Scalar v =
          Scalar(e.mu) * sin(Scalar(e.omega) * s + Scalar(e.phi)) / eps;
      dx[e.row] += v * x[e.col];
    }
  }

 private:
  const Matrix<Scalar>& m_;
  const VibrationSchedule& sched_;
  const std::optional<Perturbation<Scalar>>& perturbation_;
};

template <typename Scalar>
Trajectory<Scalar> integrate_rk4(const ControlledRhs<Scalar>& rhs,
                                 const Vector<Scalar>& x0, Scalar t_final,
                                 Scalar dt, int stride) {
  using std::ceil;
  const long steps = std::max(1L, static_cast<long>(ceil(t_final / dt)));
  const Scalar h = t_final / Scalar(steps);
  stride = std::max(stride, 1);

  Trajectory<Scalar> traj;
  traj.step = h;
  traj.times.reserve(steps / stride + 2);
  traj.states.reserve(steps / stride + 2);
  traj.times.push_back(Scalar(0));
  traj.states.push_back(x0);

  const auto n = x0.size();
  Vector<Scalar> x = x0;
  Vector<Scalar> k1(n), k2(n), k3(n), k4(n), tmp(n);
  const Scalar half = h / Scalar(2);
  for (long k = 0; k < steps; ++k) {
    const Scalar t = Scalar(k) * h;
    rhs(t, x, k1);
    tmp = x + half * k1;
    rhs(t + half, tmp, k2);
    tmp = x + half * k2;
    rhs(t + half, tmp, k3);
    tmp = x + h * k3;
    rhs(t + h, tmp, k4);
    x += (h / Scalar(6)) * (k1 + Scalar(2) * k2 + Scalar(2) * k3 + k4);
    if (!x.allFinite()) {
      traj.blowup = true;
      traj.warnings.push_back("state became non-finite at t = " +
                              std::to_string(static_cast<double>(t + h)));
      break;
    }
    if ((k + 1) % stride == 0 || k + 1 == steps) {
      traj.times.push_back(Scalar(k + 1) * h);
      traj.states.push_back(x);
    }
  }
  return traj;
}

inline const VibrationSchedule& empty_schedule() {
  static const VibrationSchedule sched;
  return sched;
}

}  // namespace detail

// RK4 integration of x' = M x on [0, t_final].
template <typename Scalar = double>
Trajectory<Scalar> simulate_lti(const Matrix<Scalar>& m,
                                const Vector<Scalar>& x0, Scalar t_final,
                                Scalar dt,
                                const SimulationOptions<Scalar>& options = {}) {
  if (!(dt > Scalar(0)) || !(t_final > Scalar(0))) {
    throw InputError("simulate: dt and t_final must be positive");
  }
  if (x0.size() != m.rows()) throw InputError("simulate: x0 has wrong size");
  detail::ControlledRhs<Scalar> rhs(m, detail::empty_schedule(),
                                    options.perturbation);
  auto traj = detail::integrate_rk4(rhs, x0, t_final, dt, options.stride);
  using std::abs;
  const Scalar norm_inf = m.cwiseAbs().rowwise().sum().maxCoeff();
  if (traj.step * norm_inf > Scalar(0.1)) {
    traj.warnings.push_back("dt * ||M|| exceeds 0.1; RK4 may be inaccurate");
  }
  return traj;
}

// Largest step that resolves the fastest scaled vibration omega_max/epsilon
// with `steps_per_period` samples.
inline double resolved_step(const VibrationSchedule& sched,
                            int steps_per_period = 50) {
  if (sched.empty()) return std::numeric_limits<double>::infinity();
  return 2.0 * std::numbers::pi * sched.epsilon() /
         (sched.max_frequency() * steps_per_period);
}

// RK4 integration of x' = (M + (1/eps) V(t/eps)) x. Throws ResolutionError
// if dt samples the fastest vibration fewer than 50 times per period.
template <typename Scalar = double>
Trajectory<Scalar> simulate_controlled(
    const Matrix<Scalar>& m, const VibrationSchedule& sched,
    const Vector<Scalar>& x0, Scalar t_final, Scalar dt,
    const SimulationOptions<Scalar>& options = {}) {
  if (!(dt > Scalar(0)) || !(t_final > Scalar(0))) {
    throw InputError("simulate: dt and t_final must be positive");
  }
  if (x0.size() != m.rows()) throw InputError("simulate: x0 has wrong size");
  for (const auto& e : sched.entries()) {
    if (e.row >= m.rows() || e.col >= m.cols()) {
      throw InputError("simulate: schedule entry outside matrix");
    }
  }
  const double limit = resolved_step(sched);
  if (static_cast<double>(dt) > limit * (1.0 + 1e-12)) {
    throw ResolutionError("simulate: dt = " +
                          std::to_string(static_cast<double>(dt)) +
                          " under-resolves the fastest vibration; need dt <= " +
                          std::to_string(limit));
  }
  detail::ControlledRhs<Scalar> rhs(m, sched, options.perturbation);
  auto traj = detail::integrate_rk4(rhs, x0, t_final, dt, options.stride);
  traj.epsilon = sched.empty() ? Scalar(0) : Scalar(sched.epsilon());
  return traj;
}

enum class DecayClass { decaying, growing, inconclusive };

inline const char* to_string(DecayClass c) {
  switch (c) {
    case DecayClass::decaying: return "decaying";
    case DecayClass::growing: return "growing";
    default: return "inconclusive";
  }
}

template <typename Scalar = double>
struct DecayVerdict {
  DecayClass classification = DecayClass::inconclusive;
  // Peak norm over the last window divided by the peak over the first.
  Scalar shrink_factor = Scalar(1);
};

template <typename Scalar = double>
struct DecayThresholds {
  Scalar low = Scalar(0.5);
  Scalar high = Scalar(2);
};

// Compares the peak Euclidean norms over the first and last `window` time
// units; a blown-up trajectory is growing.
template <typename Scalar = double>
DecayVerdict<Scalar> classify_decay(const Trajectory<Scalar>& traj,
                                    Scalar window,
                                    const DecayThresholds<Scalar>& limits = {}) {
  DecayVerdict<Scalar> verdict;
  if (traj.blowup) {
    verdict.classification = DecayClass::growing;
    verdict.shrink_factor = std::numeric_limits<Scalar>::infinity();
    return verdict;
  }
  if (traj.size() < 2) return verdict;
  const Scalar t0 = traj.times.front();
  const Scalar t1 = traj.times.back();
  window = std::min(window, (t1 - t0) / Scalar(2));
  Scalar first = Scalar(0);
  Scalar last = Scalar(0);
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const Scalar norm = traj.states[k].norm();
    if (traj.times[k] <= t0 + window) first = std::max(first, norm);
    if (traj.times[k] >= t1 - window) last = std::max(last, norm);
  }
  if (first == Scalar(0)) return verdict;
  verdict.shrink_factor = last / first;
  if (verdict.shrink_factor < limits.low) {
    verdict.classification = DecayClass::decaying;
  } else if (verdict.shrink_factor > limits.high) {
    verdict.classification = DecayClass::growing;
  }
  return verdict;
}

// Default window: five periods of the slowest scaled vibration, or a tenth of
// the horizon without vibrations.
inline double default_window(const VibrationSchedule& sched, double t_final) {
  if (sched.empty()) return t_final / 10.0;
  return 5.0 * 2.0 * std::numbers::pi * sched.epsilon() / sched.min_frequency();
}

// Logarithmic grid lo..hi with `per_decade` points per decade.
inline std::vector<double> log_grid(double lo, double hi, int per_decade) {
  std::vector<double> grid;
  const double a = std::log10(lo);
  const double b = std::log10(hi);
  const int count = std::max(1, static_cast<int>(std::lround((b - a) * per_decade)));
  for (int k = 0; k <= count; ++k) {
    grid.push_back(std::pow(10.0, a + (b - a) * k / count));
  }
  return grid;
}

struct ThresholdOptions {
  std::vector<double> grid = log_grid(1e-3, 1e1, 2);
  double t_final = 20.0;
  // Upper bound on the step; each grid point also resolves its vibrations.
  double dt_max = 1e-2;
  int steps_per_period = 50;
  int stride = 10;
  DecayThresholds<double> limits;
};

struct ThresholdRow {
  double epsilon = 0.0;
  DecayVerdict<double> verdict;
};

struct ThresholdResult {
  double epsilon_hat = 0.0;
  std::vector<ThresholdRow> table;  // ascending epsilon
};

// Scans epsilon over the grid and returns the largest grid value below which
// every grid point decays. Requires a Hurwitz functional matrix.
inline ThresholdResult find_epsilon_threshold(
    const MatrixXd& m, const VibrationSchedule& sched, const VectorXd& x0,
    const ThresholdOptions& options = {}) {
  const MatrixXd mbar = functional_matrix(m, sched).matrix;
  if (!is_hurwitz<double>(mbar)) {
    throw PreconditionError(
        "find_epsilon_threshold: functional matrix is not Hurwitz");
  }

  auto grid = options.grid;
  std::sort(grid.begin(), grid.end());
  ThresholdResult result;
  bool prefix = true;
  for (double eps : grid) {
    const auto scaled = sched.with_epsilon(eps);
    const double dt =
        std::min(options.dt_max, resolved_step(scaled, options.steps_per_period));
    SimulationOptions<double> sim;
    sim.stride = options.stride;
    const auto traj = simulate_controlled<double>(m, scaled, x0, options.t_final,
                                                  dt, sim);
    const auto verdict = classify_decay<double>(
        traj, default_window(scaled, options.t_final), options.limits);
    result.table.push_back({eps, verdict});
    if (prefix && verdict.classification == DecayClass::decaying) {
      result.epsilon_hat = eps;
    } else {
      prefix = false;
    }
  }
  if (result.epsilon_hat == 0.0) {
    throw ThresholdNotFoundError(
        "find_epsilon_threshold: the smallest grid epsilon does not decay");
  }
  return result;
}

}  // namespace vibnet
