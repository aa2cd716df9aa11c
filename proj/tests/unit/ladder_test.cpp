#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "qladder/errors.hpp"
#include "qladder/ladder.hpp"

using namespace qladder;

namespace {

LadderConfig random_config(std::mt19937_64& rng, std::size_t m) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> q(m);
  double s = 0.0;
  for (auto& x : q) s += (x = u(rng));
  for (auto& x : q) x /= s;
  return LadderConfig(0.02 + 0.96 * u(rng), q);
}

}  // namespace

TEST(TransitionMatrix, TwoLevelEntries) {
  const auto A = build_transition(LadderConfig(0.5, {0.5, 0.5}));
  EXPECT_DOUBLE_EQ(A(0, 0), 0.75);
  EXPECT_DOUBLE_EQ(A(0, 1), 0.5);
  EXPECT_DOUBLE_EQ(A(1, 0), 0.25);
  EXPECT_DOUBLE_EQ(A(1, 1), 0.5);
}

TEST(TransitionMatrix, PureLeapfrogPattern) {
  const auto A = build_transition(LadderConfig(0.5, {0.0, 0.0, 1.0}));
  EXPECT_DOUBLE_EQ(A(0, 0), 0.5);
  EXPECT_DOUBLE_EQ(A(1, 0), 0.0);
  EXPECT_DOUBLE_EQ(A(2, 0), 0.5);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_DOUBLE_EQ(A(i, i), 0.5);
  EXPECT_DOUBLE_EQ(A(0, 1), 0.5);
  EXPECT_DOUBLE_EQ(A(1, 2), 0.5);
  EXPECT_DOUBLE_EQ(A(2, 1), 0.0);
}

TEST(TransitionMatrix, MatchesHandWrittenEntriesAndIsColumnStochastic) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const auto cfg = random_config(rng, 2 + trial % 29);
    const auto A = build_transition(cfg);
    const auto ref = oracle::ladder_matrix(cfg.a(), {cfg.q().begin(), cfg.q().end()});
    for (std::size_t c = 0; c < cfg.m(); ++c) {
      EXPECT_NEAR(A.column_sum(c), 1.0, 1e-12);
      for (std::size_t r = 0; r < cfg.m(); ++r) EXPECT_NEAR(A(r, c), ref[r][c], 1e-15);
    }
  }
}

TEST(TransitionMatrix, ApplyEqualsStep) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 50; ++trial) {
    const auto cfg = random_config(rng, 2 + trial % 20);
    const auto f = DensityVector::point_mass(cfg.m(), static_cast<std::size_t>(trial) % cfg.m());
    const auto g = build_transition(cfg).apply(f);
    EXPECT_LT(g.linf_distance(step_exogenous(f, cfg)), 1e-15);
  }
}

TEST(LadderConfig, RejectsInvalidParameters) {
  EXPECT_THROW(LadderConfig(0.0, {0.5, 0.5}), ParameterError);
  EXPECT_THROW(LadderConfig(1.0, {0.5, 0.5}), ParameterError);
  EXPECT_THROW(LadderConfig(0.5, {0.5, 0.4}), ParameterError);
  EXPECT_THROW(LadderConfig(0.5, {1.2, -0.2}), ParameterError);
  EXPECT_THROW(LadderConfig(0.5, {1.0}), ParameterError);
}

TEST(LadderConfig, RenormalizesTinyDriftWithWarning) {
  int warnings = 0;
  auto previous = set_warning_handler([&](std::string_view) { ++warnings; });
  const LadderConfig cfg(0.5, {0.5, 0.5 + 1e-10});
  set_warning_handler(previous);
  EXPECT_EQ(warnings, 1);
  EXPECT_NEAR(cfg.q()[0] + cfg.q()[1], 1.0, 1e-15);
}

TEST(StepExogenous, Examples) {
  const auto uniform = DensityVector::uniform(3);
  EXPECT_LT(step_exogenous(uniform, LadderConfig(0.5, {0, 0, 1})).linf_distance(uniform), 1e-15);

  const auto g = step_exogenous(DensityVector({1.0, 0.0}), LadderConfig(0.5, {0.5, 0.5}));
  EXPECT_DOUBLE_EQ(g[0], 0.75);
  EXPECT_DOUBLE_EQ(g[1], 0.25);

  for (double a : {0.1, 0.5, 0.9}) {
    const auto h = step_exogenous(DensityVector({0.3, 0.7}), LadderConfig(a, {1.0, 0.0}));
    EXPECT_NEAR(h[1], a * 0.7, 1e-15);
  }
}

TEST(StepExogenous, DimensionMismatch) {
  EXPECT_THROW(step_exogenous(DensityVector::uniform(2), LadderConfig(0.5, {0, 0, 1})), ParameterError);
}

TEST(StepExogenous, PreservesNormalization) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const auto cfg = random_config(rng, 2 + trial % 29);
    std::vector<double> f(cfg.m());
    double s = 0.0;
    for (auto& x : f) s += (x = u(rng));
    for (auto& x : f) x /= s;
    const auto g = step_exogenous(DensityVector(f), cfg);
    double total = 0.0;
    for (double x : g) {
      EXPECT_GE(x, 0.0);
      total += x;
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
  }
}

TEST(StationaryExogenous, Examples) {
  const auto f4 = stationary_exogenous(LadderConfig(0.3, {0, 0, 0, 1}));
  for (double x : f4) EXPECT_NEAR(x, 0.25, 1e-15);

  const auto f3 = stationary_exogenous(LadderConfig(0.5, {0.2, 0.3, 0.5}));
  EXPECT_NEAR(f3[0], 1.0 / 2.3, 1e-15);
  EXPECT_NEAR(f3[1], 0.8 / 2.3, 1e-15);
  EXPECT_NEAR(f3[2], 0.5 / 2.3, 1e-15);

  const auto f2 = stationary_exogenous(LadderConfig(0.5, {0.5, 0.5}));
  EXPECT_NEAR(f2[0], 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(f2[1], 1.0 / 3.0, 1e-15);
}

TEST(StationaryExogenous, MatchesDensePowerIterationOracle) {
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 100; ++trial) {
    const auto cfg = random_config(rng, 2 + trial % 29);
    const auto f = stationary_exogenous(cfg);
    const auto A = oracle::ladder_matrix(cfg.a(), {cfg.q().begin(), cfg.q().end()});
    std::vector<double> f0(cfg.m(), 0.0);
    f0[0] = 1.0;
    const auto ref = oracle::power_limit(A, f0);
    EXPECT_LT(oracle::l1({f.begin(), f.end()}, ref), 1e-10);
  }
}

TEST(StationaryExogenous, NonIncreasingAndIndependentOfA) {
  std::mt19937_64 rng(15);
  for (int trial = 0; trial < 100; ++trial) {
    const auto cfg = random_config(rng, 2 + trial % 29);
    const auto f = stationary_exogenous(cfg);
    for (std::size_t i = 0; i + 1 < f.size(); ++i) EXPECT_GE(f[i], f[i + 1]);
    const auto g = stationary_exogenous(LadderConfig(0.5 * cfg.a(), {cfg.q().begin(), cfg.q().end()}));
    EXPECT_EQ(f.linf_distance(g), 0.0);
  }
}

TEST(PowerIterate, FixedPointAndOracleLimit) {
  const LadderConfig cfg(0.5, {0.2, 0.3, 0.5});
  const auto fixed = power_iterate(stationary_exogenous(cfg), cfg, 1e-12, 10);
  EXPECT_LE(fixed.steps, 1u);

  const auto res = power_iterate(DensityVector::point_mass(3, 0), cfg, 1e-12, 100000);
  EXPECT_LT(res.density.l1_distance(stationary_exogenous(cfg)), 1e-10);
}

TEST(PowerIterate, NoLeapfrogEmptiesTheTop) {
  const LadderConfig cfg(0.5, {0.5, 0.5, 0.0});
  const double tol = 1e-13;
  const auto res = power_iterate(DensityVector::uniform(3), cfg, tol, 1000000);
  EXPECT_LE(res.density[2], tol);
}

TEST(PowerIterate, ThrowsWithLastIterate) {
  const LadderConfig cfg(0.5, {0.2, 0.3, 0.5});
  try {
    power_iterate(DensityVector::point_mass(3, 0), cfg, 1e-14, 3);
    FAIL() << "expected ConvergenceError";
  } catch (const ConvergenceError& e) {
    EXPECT_EQ(e.last_iterate().size(), 3u);
  }
}

TEST(SecondEigenvalue, TwoLevelClosedForm) {
  EXPECT_NEAR(second_eigenvalue_modulus(LadderConfig(0.6, {0.3, 0.7})), 0.32, 1e-12);
  EXPECT_NEAR(second_eigenvalue_modulus(LadderConfig(0.5, {0.0, 1.0})), 0.0, 1e-12);
  for (double a : {0.1, 0.4, 0.8}) {
    double prev = -1.0;
    for (double q1 = 0.0; q1 <= 1.0; q1 += 0.05) {
      const double lam = second_eigenvalue_modulus(LadderConfig(a, {q1, 1.0 - q1}));
      EXPECT_NEAR(lam, std::abs(2 * a - 1 + q1 * (1 - a)), 1e-12);
      if (2 * a - 1 >= 0) {
        EXPECT_GT(lam, prev);  // increasing in q1 where the closed form stays positive
      }
      prev = lam;
    }
  }
}

TEST(SecondEigenvalue, MatchesObservedContractionRate) {
  const LadderConfig cfg(0.5, {0.2, 0.3, 0.5});
  const double lam = second_eigenvalue_modulus(cfg);
  EXPECT_GT(lam, 0.0);
  EXPECT_LT(lam, 1.0);
  const auto A = oracle::ladder_matrix(0.5, {0.2, 0.3, 0.5});
  const auto f = stationary_exogenous(cfg);
  const double rate = oracle::contraction_rate(A, {1.0, 0.0, 0.0}, {f.begin(), f.end()}, 5, 25);
  EXPECT_NEAR(rate, lam, 2e-2);
}
