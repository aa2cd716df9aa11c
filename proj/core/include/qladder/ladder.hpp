#pragma once

// Mean-field quality ladder with exogenous imitation weights.
//
// Levels are relabeled every step so that the occupied window is always
// {1, ..., m}. In code, index i of every vector holds level i + 1.

#include <cstddef>
#include <span>
#include <vector>

namespace qladder {

/// Tolerance for "sums to one".
inline constexpr double kNormTolerance = 1e-12;
/// Inputs off by more than kNormTolerance but within this bound are
/// renormalized with a warning; anything worse is rejected.
inline constexpr double kRenormTolerance = 1e-9;

/// Fractions of firms per relabeled level. Non-negative, sums to one.
class DensityVector {
 public:
  DensityVector() = default;
  explicit DensityVector(std::vector<double> fractions);

  static DensityVector uniform(std::size_t m);
  /// All mass on the level with zero-based index `index`.
  static DensityVector point_mass(std::size_t m, std::size_t index);

  std::size_t size() const noexcept { return f_.size(); }
  double operator[](std::size_t i) const { return f_[i]; }
  std::span<const double> values() const noexcept { return f_; }
  auto begin() const noexcept { return f_.begin(); }
  auto end() const noexcept { return f_.end(); }

  double l1_distance(const DensityVector& other) const;
  double linf_distance(const DensityVector& other) const;

 private:
  std::vector<double> f_;
};

/// Ladder of m levels with innovation probability a and jump weights
/// q_1..q_m (q_1..q_{m-1} imitation, q_m leapfrogging to the frontier).
class LadderConfig {
 public:
  LadderConfig(double a, std::vector<double> q);

  std::size_t m() const noexcept { return q_.size(); }
  double a() const noexcept { return a_; }
  std::span<const double> q() const noexcept { return q_; }
  double leapfrog_weight() const noexcept { return q_.back(); }

  /// Q_s = q_s + ... + q_m for s = 1..m (Q_1 = 1).
  std::vector<double> tail_sums() const;

 private:
  double a_;
  std::vector<double> q_;
};

/// Column-stochastic m x m matrix A with f_{t+1} = A f_t.
class TransitionMatrix {
 public:
  explicit TransitionMatrix(std::size_t m) : m_(m), entries_(m * m, 0.0) {}

  std::size_t size() const noexcept { return m_; }
  double operator()(std::size_t row, std::size_t col) const { return entries_[col * m_ + row]; }
  double& operator()(std::size_t row, std::size_t col) { return entries_[col * m_ + row]; }
  /// Column-major storage.
  std::span<const double> data() const noexcept { return entries_; }

  double column_sum(std::size_t col) const;
  DensityVector apply(const DensityVector& f) const;

 private:
  std::size_t m_;
  std::vector<double> entries_;
};

TransitionMatrix build_transition(const LadderConfig& config);

/// One step of f'_i = (1-a) f_{i+1} + a f_i + (1-a) f_1 q_i with f_{m+1} = 0.
DensityVector step_exogenous(const DensityVector& f, const LadderConfig& config);

/// Closed form: f^s = Q_s f^1 with f^1 = 1 / sum_s Q_s.
DensityVector stationary_exogenous(const LadderConfig& config);

struct PowerIterationResult {
  DensityVector density;
  std::size_t steps = 0;
};

/// Iterates step_exogenous until two successive iterates are closer than
/// `tol` in L1. Throws ConvergenceError (carrying the last iterate) when
/// max_steps is exhausted.
PowerIterationResult power_iterate(const DensityVector& f0, const LadderConfig& config, double tol,
                                   std::size_t max_steps);

/// Modulus of the second-largest eigenvalue of A (dense solve).
double second_eigenvalue_modulus(const LadderConfig& config);

namespace detail {

/// Applies the ladder update with jump weights q to f, writing into out.
/// All spans have the same length m. Shared with the density-dependent model.
void ladder_step(std::span<const double> f, double a, std::span<const double> q, std::span<double> out);

/// Validates an (almost) normalized non-negative vector; returns the
/// possibly renormalized copy. `what` names the quantity in messages.
std::vector<double> checked_normalized(std::vector<double> v, const char* what);

}  // namespace detail

}  // namespace qladder
