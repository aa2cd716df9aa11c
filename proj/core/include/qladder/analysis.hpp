#pragma once

// Analytic predictions for the N-BRW / L-BRW and the estimators that
// confront them with simulated trajectories.

#include <cstdint>
#include <limits>
#include <span>
#include <utility>
#include <vector>

#include "qladder/brw.hpp"

namespace qladder {

/// Minimum of the speed function v(gamma) = (1/gamma) log E[sum_i e^{gamma eps_i}].
struct SpeedProfile {
  double gamma_c = 0.0;
  double v_c = 0.0;
  /// v''(gamma_c), Richardson-extrapolated central difference.
  double v_second = 0.0;
  double a = 0.0;
  double mu = 0.0;
};

/// (1/gamma) log(1 + mu + a (e^gamma - 1)). gamma must be > 0.
double speed_function(double gamma, const BRWParams& params);

/// Same quantity from the four outcomes of one firm (stay, imitated,
/// innovate, innovate and imitated) with their displacement sets.
double speed_function_enumerated(double gamma, const BRWParams& params);

/// Bracket by doubling/halving from gamma = 1, golden-section search, then
/// Newton polish on the stationarity condition v'(gamma) = 0 (golden section
/// on v alone cannot resolve gamma_c below ~sqrt(machine epsilon)).
SpeedProfile find_gamma_c(const BRWParams& params);

/// L0 = log(N) / gamma_c.
double predict_L0(const SpeedProfile& profile, double n_firms);
/// v_N = v_c - pi^2 v''(gamma_c) / (2 L0^2).
double predict_vN(const SpeedProfile& profile, double n_firms);
/// N0 = e^{gamma_c L}.
double predict_N0(const SpeedProfile& profile, double window);
/// v_L = v_c - pi^2 v''(gamma_c) / (2 L^2).
double predict_vL(const SpeedProfile& profile, double window);

/// Bulk front shape A L0 sin(pi z / L0) e^{-gamma_c z} for 0 < z < L0.
double cutoff_shape(double z, double L0, double gamma_c, double amplitude);
/// Density counterpart: amplitude replaced by amplitude (1 - e^{-gamma_c}).
double cutoff_density_shape(double z, double L0, double gamma_c, double amplitude);

struct VelocityEstimate {
  double v_hat = 0.0;
  /// Naive least-squares standard error. Successive positions are strongly
  /// autocorrelated, so this understates the true uncertainty.
  double stderr_naive = 0.0;
  std::size_t points = 0;
};

/// Least-squares slope of y_max against t over steps burn_in..end.
VelocityEstimate estimate_velocity(const TrajectoryRecord& record, std::int64_t burn_in);

/// Snapshot-averaged upper-cumulative profile h(z), z measured from y_min.
struct FrontProfile {
  std::vector<double> h;
  std::size_t snapshots = 0;
  std::size_t replicas = 0;
  /// Mean of y_max - y_min over the snapshots used.
  double mean_support = 0.0;
  /// Mean population over the snapshots used.
  double mean_population = 0.0;
};

/// Uses snapshots with step > burn_in from every record. Throws WindowError
/// with fewer than min_snapshots.
FrontProfile estimate_front_profile(std::span<const TrajectoryRecord> records, std::int64_t burn_in,
                                    std::size_t min_snapshots = 100);

/// Integer z range strictly inside (0.25 L, 0.75 L), L the mean support.
std::pair<int, int> bulk_window(const FrontProfile& profile);

/// Least-squares slope of log h(z) over integer z in [z_lo, z_hi]. The window
/// must lie inside (0.25 L, 0.75 L), hold at least two points, and every
/// h(z) must be at least 10 / mean_population.
double fit_decay_slope(const FrontProfile& profile, int z_lo, int z_hi);

/// Velocity of the deterministic front h(y,t+1) = min[1, (1-a+mu) h(y,t) +
/// a h(y-1,t)] with values below 1/N zeroed after each step, started from a
/// step. The front is the largest y with h >= 1/2; the rate is measured over
/// the last three quarters of max_steps and must agree between the two halves
/// of that window (ConvergenceError otherwise). N = infinity disables the
/// cutoff (values below DBL_MIN still flush to zero).
double cutoff_front_velocity(const BRWParams& params, double n_firms, std::int64_t max_steps = 1 << 21);

struct SupportStats {
  double mean = 0.0;
  double stddev = 0.0;
  std::size_t samples = 0;
};

/// Statistics of y_max - y_min over steps > burn_in.
SupportStats support_statistics(const TrajectoryRecord& record, std::int64_t burn_in);

/// Mean population over steps > burn_in (compensated, fixed order).
double mean_population(const TrajectoryRecord& record, std::int64_t burn_in);

/// Exploratory: maximal runs of steps where y_max - y_min exceeds L0 + threshold.
struct ExcursionReport {
  std::size_t excursions = 0;
  double mean_duration = 0.0;
  double mean_spacing = 0.0;  // mean gap between excursion starts; 0 when fewer than two
  double fraction_of_time = 0.0;
};

ExcursionReport support_excursions(const TrajectoryRecord& record, std::int64_t burn_in, double L0,
                                   double threshold);

}  // namespace qladder
