#pragma once

// Ladder with density-dependent imitation: a firm leaving the bottom level
// copies level j+1 with probability proportional to its density, and
// leapfrogs to the frontier with a fixed probability.

#include <cstddef>
#include <vector>

#include "qladder/ladder.hpp"

namespace qladder {

class DensityModelConfig {
 public:
  /// m >= 2, a in (0,1), leapfrog in [0,1]. Solvers further require
  /// leapfrog > 0.
  DensityModelConfig(std::size_t m, double a, double leapfrog);

  std::size_t m() const noexcept { return m_; }
  double a() const noexcept { return a_; }
  double leapfrog() const noexcept { return leapfrog_; }

 private:
  std::size_t m_;
  double a_;
  double leapfrog_;
};

/// Stationary truncated power law x_i = q_m x_1 (1 + mu x_1)^{m-i}.
struct StationarySolution {
  DensityVector x;
  double mu = 0.0;  // imitation intensity
  double x1 = 0.0;  // mass on the lowest level
  /// Set when leapfrog == 1 and the uniform limit was returned.
  bool at_boundary = false;
  /// Set for a one-level support (everyone leapfrogs every step); mu and the
  /// power-law relations are meaningless there.
  bool degenerate = false;
};

/// mu = q_m^{-1/(m-1)} - q_m, for leapfrog in (0,1).
double mu_closed_form(std::size_t m, double leapfrog);

/// x_1 = (r - 1) / (r - q_m) with r = q_m^{-1/(m-1)}.
double x1_closed_form(std::size_t m, double leapfrog);

/// Closed-form stationary distribution. leapfrog == 0 throws
/// NoStationarySolutionError; leapfrog == 1 returns the uniform limit with
/// at_boundary set.
StationarySolution solve_stationary_density(const DensityModelConfig& config);

/// Imitation weights q_j = mu_t f^{j+1} (j < m) and q_m = leapfrog, with
/// mu_t = (1 - q_m) / (1 - f^1). Throws IllDefinedModelError when f^1 is
/// within 1e-12 of one.
std::vector<double> density_jump_weights(const DensityVector& f, double leapfrog);

/// One step of the nonlinear map f -> A(f) f.
DensityVector step_density(const DensityVector& f, const DensityModelConfig& config);

/// f^2_t = f^2_0 a^t for the two-level model without leapfrogging.
double decay_trajectory_q0(double f2_initial, double a, int t);

}  // namespace qladder
