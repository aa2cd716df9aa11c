#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace qladder {

/// Neumaier-compensated running sum. Summation order is the caller's, so a
/// fixed iteration order gives bit-identical results.
class CompensatedSum {
 public:
  void add(double x) noexcept;
  double value() const noexcept { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

double compensated_sum(std::span<const double> xs) noexcept;

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;  // from residuals, assumes independent errors
  std::size_t n = 0;
};

/// Ordinary least squares y = intercept + slope * x. Requires n >= 2 and
/// non-constant x.
LinearFit least_squares(std::span<const double> x, std::span<const double> y);

struct ScalarMinimum {
  double argmin = 0.0;
  double value = 0.0;
  int iterations = 0;
};

/// Golden-section search on a bracket lo < mid < hi with f(mid) below both
/// ends. Stops when the bracket is narrower than rel_tol * |argmin| (or
/// rel_tol absolutely near zero).
ScalarMinimum golden_section_minimize(const std::function<double(double)>& f, double lo, double mid,
                                      double hi, double rel_tol = 1e-12, int max_iterations = 500);

}  // namespace qladder
