#include "qladder/ladder.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>
#include <string>

#include <Eigen/Dense>

#include "qladder/errors.hpp"
#include "qladder/numeric.hpp"

namespace qladder {

namespace detail {

std::vector<double> checked_normalized(std::vector<double> v, const char* what) {
  if (v.empty()) {
    throw ParameterError(std::string(what) + " is empty");
  }
  for (double x : v) {
    if (!std::isfinite(x) || x < 0.0) {
      throw ParameterError(std::string(what) + " has a negative or non-finite entry");
    }
  }
  const double total = compensated_sum(v);
  const double off = std::abs(total - 1.0);
  if (off <= kNormTolerance) {
    return v;
  }
  if (off <= kRenormTolerance) {
    std::ostringstream msg;
    msg << what << " sums to 1" << (total > 1.0 ? "+" : "-") << off << "; renormalized";
    warn(msg.str());
    for (double& x : v) x /= total;
    return v;
  }
  std::ostringstream msg;
  msg.precision(17);
  msg << what << " must sum to 1 (got " << total << ")";
  throw ParameterError(msg.str());
}

void ladder_step(std::span<const double> f, double a, std::span<const double> q, std::span<double> out) {
  const std::size_t m = f.size();
  const double stuck_bottom = (1.0 - a) * f[0];
  for (std::size_t i = 0; i < m; ++i) {
    const double fall_back = i + 1 < m ? (1.0 - a) * f[i + 1] : 0.0;
    out[i] = fall_back + a * f[i] + stuck_bottom * q[i];
  }
}

}  // namespace detail

DensityVector::DensityVector(std::vector<double> fractions)
    : f_(detail::checked_normalized(std::move(fractions), "density vector")) {}

DensityVector DensityVector::uniform(std::size_t m) {
  if (m == 0) throw ParameterError("uniform density needs m >= 1");
  return DensityVector(std::vector<double>(m, 1.0 / static_cast<double>(m)));
}

DensityVector DensityVector::point_mass(std::size_t m, std::size_t index) {
  if (index >= m) throw ParameterError("point_mass index out of range");
  std::vector<double> v(m, 0.0);
  v[index] = 1.0;
  return DensityVector(std::move(v));
}

double DensityVector::l1_distance(const DensityVector& other) const {
  if (other.size() != size()) throw ParameterError("l1_distance: dimension mismatch");
  CompensatedSum s;
  for (std::size_t i = 0; i < f_.size(); ++i) s.add(std::abs(f_[i] - other.f_[i]));
  return s.value();
}

double DensityVector::linf_distance(const DensityVector& other) const {
  if (other.size() != size()) throw ParameterError("linf_distance: dimension mismatch");
  double d = 0.0;
  for (std::size_t i = 0; i < f_.size(); ++i) d = std::max(d, std::abs(f_[i] - other.f_[i]));
  return d;
}

LadderConfig::LadderConfig(double a, std::vector<double> q) : a_(a) {
  if (!(a > 0.0 && a < 1.0)) {
    throw ParameterError("innovation probability a must lie in (0,1)");
  }
  if (q.size() < 2) {
    throw ParameterError("ladder needs m >= 2 levels");
  }
  q_ = detail::checked_normalized(std::move(q), "jump weights q");
}

std::vector<double> LadderConfig::tail_sums() const {
  std::vector<double> tails(q_.size());
  double acc = 0.0;
  for (std::size_t s = q_.size(); s-- > 0;) {
    acc += q_[s];
    tails[s] = acc;
  }
  // Q_1 is exactly one by definition; pin it against rounding in the running sum.
  tails[0] = 1.0;
  return tails;
}

double TransitionMatrix::column_sum(std::size_t col) const {
  return compensated_sum(std::span<const double>(entries_).subspan(col * m_, m_));
}

DensityVector TransitionMatrix::apply(const DensityVector& f) const {
  if (f.size() != m_) throw ParameterError("TransitionMatrix::apply: dimension mismatch");
  std::vector<double> out(m_, 0.0);
  for (std::size_t col = 0; col < m_; ++col) {
    for (std::size_t row = 0; row < m_; ++row) out[row] += (*this)(row, col) * f[col];
  }
  return DensityVector(std::move(out));
}

TransitionMatrix build_transition(const LadderConfig& config) {
  const std::size_t m = config.m();
  const double a = config.a();
  const auto q = config.q();
  TransitionMatrix A(m);
  for (std::size_t i = 0; i < m; ++i) {
    A(i, i) = a;
    if (i + 1 < m) A(i, i + 1) = 1.0 - a;
    A(i, 0) += q[i] * (1.0 - a);
  }
  return A;
}

DensityVector step_exogenous(const DensityVector& f, const LadderConfig& config) {
  if (f.size() != config.m()) {
    throw ParameterError("step_exogenous: density has " + std::to_string(f.size()) + " levels, config has " +
                         std::to_string(config.m()));
  }
  std::vector<double> out(f.size());
  detail::ladder_step(f.values(), config.a(), config.q(), out);
  return DensityVector(std::move(out));
}

DensityVector stationary_exogenous(const LadderConfig& config) {
  const auto tails = config.tail_sums();
  const double f1 = 1.0 / compensated_sum(tails);
  std::vector<double> f(tails.size());
  std::transform(tails.begin(), tails.end(), f.begin(), [f1](double Q) { return Q * f1; });
  return DensityVector(std::move(f));
}

PowerIterationResult power_iterate(const DensityVector& f0, const LadderConfig& config, double tol,
                                   std::size_t max_steps) {
  if (!(tol > 0.0)) throw ParameterError("power_iterate: tol must be positive");
  if (f0.size() != config.m()) throw ParameterError("power_iterate: dimension mismatch");
  const std::size_t m = config.m();
  std::vector<double> cur(f0.begin(), f0.end());
  std::vector<double> next(m);
  for (std::size_t step = 0; step < max_steps; ++step) {
    detail::ladder_step(cur, config.a(), config.q(), next);
    CompensatedSum diff;
    for (std::size_t i = 0; i < m; ++i) diff.add(std::abs(next[i] - cur[i]));
    if (diff.value() < tol) {
      // The iterate that failed to move counts as the limit; stepping onto it
      // is only counted when it moved at all.
      const std::size_t used = diff.value() == 0.0 ? step : step + 1;
      return {DensityVector(std::move(next)), used};
    }
    std::swap(cur, next);
  }
  throw ConvergenceError("power_iterate: no convergence within " + std::to_string(max_steps) + " steps",
                         std::move(cur));
}

double second_eigenvalue_modulus(const LadderConfig& config) {
  const auto A = build_transition(config);
  const auto m = static_cast<Eigen::Index>(A.size());
  const Eigen::Map<const Eigen::MatrixXd> mat(A.data().data(), m, m);
  Eigen::EigenSolver<Eigen::MatrixXd> solver(mat, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success) {
    throw NumericError("second_eigenvalue_modulus: eigenvalue solver failed");
  }
  std::vector<double> moduli;
  moduli.reserve(static_cast<std::size_t>(m));
  for (Eigen::Index i = 0; i < m; ++i) moduli.push_back(std::abs(solver.eigenvalues()[i]));
  std::sort(moduli.begin(), moduli.end(), std::greater<>());
  return moduli[1];
}

}  // namespace qladder
