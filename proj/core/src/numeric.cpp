#include "qladder/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qladder/errors.hpp"

namespace qladder {

void CompensatedSum::add(double x) noexcept {
  const double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x)) {
    compensation_ += (sum_ - t) + x;
  } else {
    compensation_ += (x - t) + sum_;
  }
  sum_ = t;
}

double compensated_sum(std::span<const double> xs) noexcept {
  CompensatedSum s;
  for (double x : xs) s.add(x);
  return s.value();
}

LinearFit least_squares(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw ParameterError("least_squares: x and y differ in length");
  }
  const std::size_t n = x.size();
  if (n < 2) {
    throw ParameterError("least_squares: need at least two points");
  }
  const double xbar = compensated_sum(x) / static_cast<double>(n);
  const double ybar = compensated_sum(y) / static_cast<double>(n);
  CompensatedSum sxx;
  CompensatedSum sxy;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - xbar;
    sxx.add(dx * dx);
    sxy.add(dx * (y[i] - ybar));
  }
  if (sxx.value() <= 0.0) {
    throw ParameterError("least_squares: x is constant");
  }
  LinearFit fit;
  fit.n = n;
  fit.slope = sxy.value() / sxx.value();
  fit.intercept = ybar - fit.slope * xbar;
  if (n > 2) {
    CompensatedSum rss;
    for (std::size_t i = 0; i < n; ++i) {
      const double r = y[i] - (fit.intercept + fit.slope * x[i]);
      rss.add(r * r);
    }
    fit.slope_stderr = std::sqrt(rss.value() / static_cast<double>(n - 2) / sxx.value());
  }
  return fit;
}

ScalarMinimum golden_section_minimize(const std::function<double(double)>& f, double lo, double mid,
                                      double hi, double rel_tol, int max_iterations) {
  if (!(lo < mid && mid < hi)) {
    throw ParameterError("golden_section_minimize: bracket must satisfy lo < mid < hi");
  }
  constexpr double kInvPhi = 0.6180339887498949;  // (sqrt(5) - 1) / 2
  double a = lo;
  double b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c);
  double fd = f(d);
  int it = 0;
  while (it < max_iterations) {
    const double scale = std::max(std::abs(0.5 * (a + b)), 1e-300);
    if (b - a <= rel_tol * scale) break;
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
    ++it;
  }
  if (it == max_iterations) {
    throw ConvergenceError("golden_section_minimize: bracket did not shrink within " +
                           std::to_string(max_iterations) + " iterations");
  }
  ScalarMinimum out;
  out.argmin = fc < fd ? c : d;
  out.value = std::min(fc, fd);
  out.iterations = it;
  return out;
}

}  // namespace qladder
