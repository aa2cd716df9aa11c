#include "qladder/density.hpp"

#include <cmath>
#include <string>

#include "qladder/errors.hpp"
#include "qladder/numeric.hpp"

namespace qladder {

namespace {

constexpr double kBottomHeavyTolerance = 1e-12;

void require_open_leapfrog(double leapfrog, const char* who) {
  if (!(leapfrog > 0.0 && leapfrog < 1.0)) {
    throw ParameterError(std::string(who) + ": leapfrog probability must lie in (0,1)");
  }
}

// r = q_m^{-1/(m-1)}, the common ratio x_i / x_{i+1} of the stationary profile.
double profile_ratio(std::size_t m, double leapfrog) {
  return std::pow(leapfrog, -1.0 / static_cast<double>(m - 1));
}

}  // namespace

DensityModelConfig::DensityModelConfig(std::size_t m, double a, double leapfrog)
    : m_(m), a_(a), leapfrog_(leapfrog) {
  if (m < 2) throw ParameterError("density model needs m >= 2 levels");
  if (!(a > 0.0 && a < 1.0)) throw ParameterError("innovation probability a must lie in (0,1)");
  if (!(leapfrog >= 0.0 && leapfrog <= 1.0)) throw ParameterError("leapfrog probability must lie in [0,1]");
}

double mu_closed_form(std::size_t m, double leapfrog) {
  if (m < 2) throw ParameterError("mu_closed_form: m must be >= 2");
  require_open_leapfrog(leapfrog, "mu_closed_form");
  return profile_ratio(m, leapfrog) - leapfrog;
}

double x1_closed_form(std::size_t m, double leapfrog) {
  if (m < 2) throw ParameterError("x1_closed_form: m must be >= 2");
  require_open_leapfrog(leapfrog, "x1_closed_form");
  // expm1 keeps r - 1 and r - q_m accurate when leapfrog is close to one.
  const double r_minus_one = std::expm1(-std::log(leapfrog) / static_cast<double>(m - 1));
  return r_minus_one / (r_minus_one + (1.0 - leapfrog));
}

StationarySolution solve_stationary_density(const DensityModelConfig& config) {
  const std::size_t m = config.m();
  const double q = config.leapfrog();
  if (q == 0.0) {
    throw NoStationarySolutionError(
        "no stationary solution without leapfrogging (leapfrog probability 0): "
        "every level above the lowest empties over time");
  }
  StationarySolution sol;
  if (q == 1.0) {
    sol.x = DensityVector::uniform(m);
    sol.mu = 0.0;
    sol.x1 = 1.0 / static_cast<double>(m);
    sol.at_boundary = true;
    return sol;
  }
  const double x1 = x1_closed_form(m, q);
  const double mu = (1.0 - q) / (1.0 - x1);
  const double growth = 1.0 + mu * x1;
  std::vector<double> x(m);
  for (std::size_t i = 0; i < m; ++i) {
    // Level i+1 carries exponent m-(i+1).
    x[i] = q * x1 * std::pow(growth, static_cast<double>(m - 1 - i));
  }
  sol.x = DensityVector(std::move(x));
  sol.mu = mu;
  sol.x1 = x1;
  return sol;
}

std::vector<double> density_jump_weights(const DensityVector& f, double leapfrog) {
  const std::size_t m = f.size();
  // 1 - f^1 computed as the mass above the bottom, which is exact in the
  // regime where f^1 is close to one.
  CompensatedSum above;
  for (std::size_t i = 1; i < m; ++i) above.add(f[i]);
  if (above.value() <= kBottomHeavyTolerance) {
    throw IllDefinedModelError("imitation intensity diverges: all mass sits on the lowest level");
  }
  const double mu_t = (1.0 - leapfrog) / above.value();
  std::vector<double> q(m);
  for (std::size_t j = 0; j + 1 < m; ++j) q[j] = mu_t * f[j + 1];
  q[m - 1] = leapfrog;
  return q;
}

DensityVector step_density(const DensityVector& f, const DensityModelConfig& config) {
  if (f.size() != config.m()) {
    throw ParameterError("step_density: density has " + std::to_string(f.size()) + " levels, config has " +
                         std::to_string(config.m()));
  }
  const auto q = density_jump_weights(f, config.leapfrog());
  std::vector<double> out(f.size());
  detail::ladder_step(f.values(), config.a(), q, out);
  return DensityVector(std::move(out));
}

double decay_trajectory_q0(double f2_initial, double a, int t) {
  if (t < 0) throw ParameterError("decay_trajectory_q0: t must be non-negative");
  if (!(f2_initial > 0.0 && f2_initial < 1.0)) throw ParameterError("decay_trajectory_q0: f2_0 must lie in (0,1)");
  if (!(a > 0.0 && a < 1.0)) throw ParameterError("decay_trajectory_q0: a must lie in (0,1)");
  return f2_initial * std::pow(a, t);
}

}  // namespace qladder
