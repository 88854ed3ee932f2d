#pragma once

#include <cmath>
#include <vector>

#include "vibnet/graph.hpp"
#include "vibnet/types.hpp"

namespace vibnet {

// v_ij(s) = mu * sin(omega * s + phi) on matrix entry (row, col).
struct ScheduleEntry {
  int row = 0;
  int col = 0;
  double mu = 0.0;
  double omega = 0.0;
  double phi = 0.0;

  bool operator==(const ScheduleEntry&) const = default;

  // The edge col -> row the vibration acts on.
  Edge edge() const { return {col, row}; }
};

class VibrationSchedule {
 public:
  VibrationSchedule() = default;
  // Throws InputError unless epsilon > 0, every omega > 0, frequencies are
  // pairwise distinct, positions are off-diagonal and distinct.
  VibrationSchedule(std::vector<ScheduleEntry> entries, double epsilon);

  const std::vector<ScheduleEntry>& entries() const { return entries_; }
  double epsilon() const { return epsilon_; }
  bool empty() const { return entries_.empty(); }

  double min_frequency() const;
  double max_frequency() const;

  EdgeSet controlled_edges() const;

  VibrationSchedule with_epsilon(double epsilon) const {
    return VibrationSchedule(entries_, epsilon);
  }
  VibrationSchedule with_phase(double phi) const;

  bool operator==(const VibrationSchedule&) const = default;

 private:
  std::vector<ScheduleEntry> entries_;
  double epsilon_ = 1.0;
};

struct DesignOptions {
  double omega_base = 1.0;
  double epsilon = 1.0;
  double phase = 0.0;
  // Fraction of m_ij cancelled in the functional matrix; 1 removes the edge,
  // values in (0, 1) only weaken it.
  double removal = 1.0;
};

// k-th frequency multiplier (0-based): sqrt of 1, 2, 3, 5, 7, 11, ...
double frequency_multiplier(int k);

// Amplitude that makes m_ij - 0.5 * (mu / omega)^2 * m_ji equal
// (1 - removal) * m_ij.
double design_amplitude(double m_ij, double m_ji, double omega,
                        double removal = 1.0);

// One sinusoid per control edge j -> i on entry (i, j). Entries are ordered
// by (row, col) and the k-th one gets omega_base * frequency_multiplier(k).
// Throws DesignError unless m_ij and m_ji are nonzero with equal sign.
VibrationSchedule design_vibrations(const MatrixXd& m,
                                    const std::vector<Edge>& controls,
                                    const DesignOptions& options = {});

VibrationSchedule design_vibrations(const MatrixXd& m, const EdgeSet& controls,
                                    const DesignOptions& options = {});

bool check_sparsity_constraint(const VibrationSchedule& sched,
                               const MatrixXd& m);

template <typename Scalar = double>
Matrix<Scalar> evaluate_V(const VibrationSchedule& sched, int n, Scalar s) {
  using std::sin;
  Matrix<Scalar> v = Matrix<Scalar>::Zero(n, n);
  for (const auto& e : sched.entries()) {
    v(e.row, e.col) = Scalar(e.mu) * sin(Scalar(e.omega) * s + Scalar(e.phi));
  }
  return v;
}

// (1 / epsilon) V(t / epsilon)
template <typename Scalar = double>
Matrix<Scalar> evaluate_scaled_V(const VibrationSchedule& sched, int n,
                                 Scalar t) {
  const Scalar eps = Scalar(sched.epsilon());
  return evaluate_V<Scalar>(sched, n, t / eps) / eps;
}

}  // namespace vibnet
