#include "vibnet/schedule.hpp"

#include <algorithm>
#include <set>
#include <string>

#include "vibnet/errors.hpp"

namespace vibnet {

namespace {

std::string entry_name(int row, int col) {
  return "entry (" + std::to_string(row + 1) + "," + std::to_string(col + 1) +
         ")";
}

bool is_prime(int p) {
  if (p < 2) return false;
  for (int q = 2; q * q <= p; ++q) {
    if (p % q == 0) return false;
  }
  return true;
}

}  // namespace

VibrationSchedule::VibrationSchedule(std::vector<ScheduleEntry> entries,
                                     double epsilon)
    : entries_(std::move(entries)), epsilon_(epsilon) {
  if (!(epsilon_ > 0.0) || !std::isfinite(epsilon_)) {
    throw InputError("epsilon must be positive and finite");
  }
  std::set<std::pair<int, int>> positions;
  std::set<double> frequencies;
  for (const auto& e : entries_) {
    const auto name = entry_name(e.row, e.col);
    if (e.row < 0 || e.col < 0) throw InputError(name + ": negative index");
    if (e.row == e.col) {
      throw InputError(name + ": vibrations act on edges, not on diagonals");
    }
    if (!std::isfinite(e.mu) || !std::isfinite(e.phi)) {
      throw InputError(name + ": non-finite amplitude or phase");
    }
    if (!(e.omega > 0.0) || !std::isfinite(e.omega)) {
      throw InputError(name + ": frequency must be positive");
    }
    if (!positions.emplace(e.row, e.col).second) {
      throw InputError(name + ": scheduled twice");
    }
    if (!frequencies.insert(e.omega).second) {
      throw InputError(name + ": frequency repeats another entry");
    }
  }
}

double VibrationSchedule::min_frequency() const {
  double w = 0.0;
  for (const auto& e : entries_) w = (w == 0.0) ? e.omega : std::min(w, e.omega);
  return w;
}

double VibrationSchedule::max_frequency() const {
  double w = 0.0;
  for (const auto& e : entries_) w = std::max(w, e.omega);
  return w;
}

EdgeSet VibrationSchedule::controlled_edges() const {
  EdgeSet out;
  for (const auto& e : entries_) out.insert(e.edge());
  return out;
}

VibrationSchedule VibrationSchedule::with_phase(double phi) const {
  auto entries = entries_;
  for (auto& e : entries) e.phi = phi;
  return VibrationSchedule(std::move(entries), epsilon_);
}

double frequency_multiplier(int k) {
  if (k == 0) return 1.0;
  int found = 0;
  for (int p = 2;; ++p) {
    if (is_prime(p) && ++found == k) return std::sqrt(static_cast<double>(p));
  }
}

double design_amplitude(double m_ij, double m_ji, double omega,
                        double removal) {
  return omega * std::sqrt(2.0 * removal * m_ij / m_ji);
}

VibrationSchedule design_vibrations(const MatrixXd& m,
                                    const std::vector<Edge>& controls,
                                    const DesignOptions& options) {
  if (!(options.omega_base > 0.0)) {
    throw DesignError("omega_base must be positive");
  }
  if (!(options.removal > 0.0)) {
    throw DesignError("removal fraction must be positive");
  }
  const int n = static_cast<int>(m.rows());
  std::vector<std::pair<int, int>> positions;
  for (const auto& edge : controls) {
    const int i = edge.to;
    const int j = edge.from;
    if (i < 0 || i >= n || j < 0 || j >= n || i == j) {
      throw DesignError(entry_name(i, j) + ": not an off-diagonal entry");
    }
    const double m_ij = m(i, j);
    const double m_ji = m(j, i);
    if (m_ij == 0.0 || m_ji == 0.0) {
      throw DesignError(entry_name(i, j) +
                        ": controlled edge must be bidirected");
    }
    if ((m_ij > 0.0) != (m_ji > 0.0)) {
      throw DesignError(entry_name(i, j) +
                        ": m_ij and m_ji have opposite signs");
    }
    positions.emplace_back(i, j);
  }
  std::sort(positions.begin(), positions.end());
  if (std::adjacent_find(positions.begin(), positions.end()) !=
      positions.end()) {
    throw DesignError("control edge listed twice");
  }

  std::vector<ScheduleEntry> entries;
  entries.reserve(positions.size());
  for (std::size_t k = 0; k < positions.size(); ++k) {
    const auto [i, j] = positions[k];
    const double omega =
        options.omega_base * frequency_multiplier(static_cast<int>(k));
    entries.push_back({i, j, design_amplitude(m(i, j), m(j, i), omega,
                                              options.removal),
                       omega, options.phase});
  }
  return VibrationSchedule(std::move(entries), options.epsilon);
}

VibrationSchedule design_vibrations(const MatrixXd& m, const EdgeSet& controls,
                                    const DesignOptions& options) {
  return design_vibrations(
      m, std::vector<Edge>(controls.begin(), controls.end()), options);
}

bool check_sparsity_constraint(const VibrationSchedule& sched,
                               const MatrixXd& m) {
  for (const auto& e : sched.entries()) {
    if (e.row >= m.rows() || e.col >= m.cols()) return false;
    if (m(e.row, e.col) == 0.0) return false;
  }
  return true;
}

}  // namespace vibnet
