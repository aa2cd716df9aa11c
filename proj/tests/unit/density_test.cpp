#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "qladder/density.hpp"
#include "qladder/errors.hpp"

using namespace qladder;

TEST(MuClosedForm, TabulatedValues) {
  EXPECT_NEAR(mu_closed_form(10, 0.1), 1.1915, 5e-5);
  EXPECT_NEAR(mu_closed_form(10, 0.99), 0.0111, 5e-5);
  EXPECT_LT(mu_closed_form(10, 1.0 - 1e-9), 1e-8);
  EXPECT_THROW(mu_closed_form(10, 0.0), ParameterError);
  EXPECT_THROW(mu_closed_form(10, 1.0), ParameterError);
}

TEST(SolveStationaryDensity, TabulatedValues) {
  const struct {
    double qm, mu, x1;
  } rows[] = {{0.1, 1.1915, 0.2447}, {0.3, 0.8431, 0.1698}, {0.5, 0.5801, 0.1380}, {0.99, 0.0111, 0.1005}};
  for (const auto& row : rows) {
    const auto sol = solve_stationary_density(DensityModelConfig(10, 0.5, row.qm));
    EXPECT_NEAR(sol.mu, row.mu, 5e-5) << row.qm;
    EXPECT_NEAR(sol.x1, row.x1, 5e-5) << row.qm;
    EXPECT_FALSE(sol.at_boundary);
  }
}

TEST(SolveStationaryDensity, MatchesBisectionOnSelfConsistency) {
  for (std::size_t m : {2u, 3u, 10u, 40u}) {
    for (double qm : {0.01, 0.2, 0.5, 0.8, 0.999}) {
      const auto sol = solve_stationary_density(DensityModelConfig(m, 0.4, qm));
      EXPECT_NEAR(sol.x1, oracle::x1_by_bisection(m, qm), 1e-12) << m << " " << qm;
    }
  }
}

TEST(SolveStationaryDensity, Invariants) {
  for (std::size_t m : {2u, 5u, 10u, 30u}) {
    for (double qm = 0.05; qm < 1.0; qm += 0.05) {
      const DensityModelConfig cfg(m, 0.5, qm);
      const auto sol = solve_stationary_density(cfg);
      const double r = std::pow(qm, -1.0 / static_cast<double>(m - 1));
      double total = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        total += sol.x[i];
        EXPECT_NEAR(sol.x[i], qm * sol.x1 * std::pow(1 + sol.mu * sol.x1, static_cast<double>(m - 1 - i)),
                    1e-13);
        if (i + 1 < m) {
          EXPECT_NEAR(sol.x[i] / sol.x[i + 1], r, 1e-10 * r);
        }
      }
      EXPECT_NEAR(total, 1.0, 1e-12);
      EXPECT_NEAR(sol.mu, (1 - qm) / (1 - sol.x1), 1e-12 * sol.mu);
      EXPECT_NEAR(std::pow(1 + sol.mu * sol.x1, static_cast<double>(m - 1)) * qm, 1.0, 1e-12);
      EXPECT_LT(step_density(sol.x, cfg).linf_distance(sol.x), 1e-10);
    }
  }
}

TEST(SolveStationaryDensity, FlattensAsLeapfrogGrows) {
  double prev = 1.0;
  for (double qm = 0.01; qm < 1.0; qm += 0.01) {
    const double x1 = solve_stationary_density(DensityModelConfig(10, 0.5, qm)).x1;
    EXPECT_LT(x1, prev);
    prev = x1;
  }
}

TEST(SolveStationaryDensity, BoundaryCases) {
  EXPECT_THROW(solve_stationary_density(DensityModelConfig(10, 0.5, 0.0)), NoStationarySolutionError);
  const auto uniform = solve_stationary_density(DensityModelConfig(10, 0.5, 1.0));
  EXPECT_TRUE(uniform.at_boundary);
  for (double x : uniform.x) EXPECT_DOUBLE_EQ(x, 0.1);
  const auto near = solve_stationary_density(DensityModelConfig(10, 0.5, 1.0 - 1e-8));
  for (double x : near.x) EXPECT_LT(std::abs(x - 0.1), 1e-6);
}

TEST(StepDensity, TwoLevelDecayWithoutLeapfrog) {
  for (double a : {0.2, 0.5, 0.9}) {
    const auto g = step_density(DensityVector({0.6, 0.4}), DensityModelConfig(2, a, 0.0));
    EXPECT_NEAR(g[1], a * 0.4, 1e-15);
  }
}

TEST(StepDensity, NormalizedOutput) {
  const auto g = step_density(DensityVector::uniform(10), DensityModelConfig(10, 0.5, 0.3));
  double total = 0.0;
  for (double x : g) {
    EXPECT_GE(x, 0.0);
    total += x;
  }
  EXPECT_NEAR(total, 1.0, 1e-12);
}

TEST(StepDensity, AllMassAtBottomIsIllDefined) {
  EXPECT_THROW(step_density(DensityVector::point_mass(3, 0), DensityModelConfig(3, 0.5, 0.3)),
               IllDefinedModelError);
}

TEST(DecayTrajectory, ClosedFormAndIteration) {
  EXPECT_DOUBLE_EQ(decay_trajectory_q0(0.5, 0.5, 3), 0.0625);
  EXPECT_DOUBLE_EQ(decay_trajectory_q0(0.3, 0.7, 0), 0.3);
  EXPECT_LT(decay_trajectory_q0(0.9, 0.5, 2000), 1e-300);
  EXPECT_THROW(decay_trajectory_q0(0.0, 0.5, 1), ParameterError);
  EXPECT_THROW(decay_trajectory_q0(0.5, 0.5, -1), ParameterError);

  const DensityModelConfig cfg(2, 0.5, 0.0);
  DensityVector f({0.5, 0.5});
  for (int t = 1; t <= 3; ++t) f = step_density(f, cfg);
  EXPECT_NEAR(f[1], 0.0625, 1e-15);
}
