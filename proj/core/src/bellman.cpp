#include "qladder/bellman.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "qladder/errors.hpp"
#include "qladder/numeric.hpp"

namespace qladder {

namespace {

constexpr std::size_t kMaxSweeps = 50'000'000;

void require_grid(int m, int j_min) {
  if (j_min > m - 1) {
    throw ParameterError("Bellman grid needs j_min <= m - 1");
  }
}

std::size_t at(int j, int j_min) { return static_cast<std::size_t>(j - j_min); }

// Suffix sums S0(j) = sum_{k>=j} q_k and S1(j) = sum_{k>=j} q_k V(k), indexed by j - j_min.
void suffix_sums(std::span<const double> q, std::span<const double> V, std::vector<double>& s0,
                 std::vector<double>& s1) {
  const std::size_t n = q.size();
  double acc0 = 0.0;
  double acc1 = 0.0;
  for (std::size_t i = n; i-- > 0;) {
    acc0 += q[i];
    acc1 += q[i] * V[i];
    s0[i] = acc0;
    s1[i] = acc1;
  }
}

}  // namespace

EconomicParams::EconomicParams(double a, double lambda, double beta0, double cost)
    : a_(a), lambda_(lambda), beta0_(beta0), cost_(cost) {
  if (!(a > 0.0 && a < 1.0)) throw ParameterError("innovation probability a must lie in (0,1)");
  if (!(lambda > 1.0) || !std::isfinite(lambda)) throw ParameterError("payoff growth lambda must exceed 1");
  if (!(beta0 > 0.0 && beta0 < 1.0)) throw ParameterError("discount factor beta0 must lie in (0,1)");
  if (!(cost >= 0.0) || !std::isfinite(cost)) throw ParameterError("cost C must be finite and >= 0");
  if (!(lambda * beta0 < 1.0)) throw ParameterError("effective discount beta = lambda*beta0 must be < 1");
}

double EconomicParams::payoff(int j, int m) const { return std::pow(lambda_, static_cast<double>(j - m)); }

ValueSolution solve_with_kernel(const EconomicParams& params, int m, int j_min, std::span<const double> kernel,
                                double tol) {
  require_grid(m, j_min);
  if (!(tol > 0.0)) throw ParameterError("Bellman tol must be positive");
  const std::size_t n = at(m, j_min) + 1;
  if (kernel.size() != n) throw ParameterError("jump kernel length does not match the grid");
  const auto q = detail::checked_normalized(std::vector<double>(kernel.begin(), kernel.end()), "jump kernel");

  const double a = params.a();
  const double beta = params.beta();
  const double C = params.cost();

  std::vector<double> p(n);
  for (std::size_t i = 0; i < n; ++i) p[i] = params.payoff(j_min + static_cast<int>(i), m);

  // Continuation values of the two choices, given V (i >= 1 for no-jump).
  auto jump_cont = [&](std::size_t i, std::span<const double> V, std::span<const double> s0,
                       std::span<const double> s1) {
    // At j_min every unit of kernel mass lies at or above j_min, so the
    // "target below own level" term has no weight and V(j_min - 1) is never needed.
    const double stay_weight = i == 0 ? 0.0 : 1.0 - s0[i];
    const double stay_value = i == 0 ? 0.0 : V[i - 1];
    return beta * (s1[i] + stay_weight * stay_value) - C;
  };

  const double stop = tol * (1.0 - beta) / beta;
  std::vector<double> V(n, 0.0);
  std::vector<double> next(n);
  std::vector<double> s0(n);
  std::vector<double> s1(n);
  ValueSolution sol;
  sol.j_min = j_min;
  sol.m = m;
  bool converged = false;
  for (std::size_t sweep = 0; sweep < kMaxSweeps; ++sweep) {
    suffix_sums(q, V, s0, s1);
    double residual = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double lf = jump_cont(i, V, s0, s1);
      const double cont = i == 0 ? lf : std::max(lf, beta * V[i - 1]);
      next[i] = p[i] + beta * a * V[i] + (1.0 - a) * cont;
      residual = std::max(residual, std::abs(next[i] - V[i]));
    }
    std::swap(V, next);
    sol.residuals.push_back(residual);
    if (residual < stop) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    throw ConvergenceError("value iteration did not converge", V);
  }

  suffix_sums(q, V, s0, s1);
  sol.value = V;
  sol.value_lf.resize(n);
  sol.value_nlf.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double base = p[i] + beta * a * V[i];
    sol.value_lf[i] = base + (1.0 - a) * jump_cont(i, V, s0, s1);
    sol.value_nlf[i] = i == 0 ? std::numeric_limits<double>::quiet_NaN() : base + (1.0 - a) * beta * V[i - 1];
  }

  // Monotone value function is an assumption of the model; check it.
  const double slack = 10.0 * tol;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (V[i + 1] < V[i] - slack) {
      std::ostringstream msg;
      msg << "value function decreases between levels " << j_min + static_cast<int>(i) << " and "
          << j_min + static_cast<int>(i) + 1;
      throw ModelViolationError(msg.str());
    }
  }

  // Threshold: largest level with a strictly profitable jump. Ties do not jump.
  int j0 = std::numeric_limits<int>::min();
  for (int j = m; j > j_min; --j) {
    const std::size_t i = at(j, j_min);
    if (sol.value_lf[i] - sol.value_nlf[i] > 0.0) {
      j0 = j;
      break;
    }
  }
  if (j0 == std::numeric_limits<int>::min()) {
    throw GridTooSmallError("no level above j_min = " + std::to_string(j_min) +
                            " chooses to jump; the threshold lies below the grid, lower j_min");
  }
  for (int j = j_min + 1; j <= j0; ++j) {
    const std::size_t i = at(j, j_min);
    if (!(sol.value_lf[i] - sol.value_nlf[i] > 0.0)) {
      throw ModelViolationError("jump/no-jump pattern crosses more than once (level " + std::to_string(j) + ")");
    }
  }
  if (j0 <= j_min + 2) {
    throw GridTooSmallError("threshold j0 = " + std::to_string(j0) + " is within 2 levels of j_min = " +
                            std::to_string(j_min) + "; lower j_min");
  }
  sol.j0 = j0;
  sol.support_size = m - j0 + 1;
  return sol;
}

ValueSolution solve_leapfrog_only(const EconomicParams& params, int m, int j_min, double tol) {
  require_grid(m, j_min);
  std::vector<double> kernel(at(m, j_min) + 1, 0.0);
  kernel.back() = 1.0;
  return solve_with_kernel(params, m, j_min, kernel, tol);
}

bool support_size_invariance_check(const EconomicParams& params, int m1, int m2, int j_min, double tol) {
  const auto s1 = solve_leapfrog_only(params, m1, j_min, tol);
  const auto s2 = solve_leapfrog_only(params, m2, j_min, tol);
  return s1.support_size == s2.support_size;
}

StationarySolution support_density(int support, double a, double leapfrog) {
  if (support < 1) throw ParameterError("support size must be >= 1");
  if (support == 1) {
    StationarySolution sol;
    sol.x = DensityVector(std::vector<double>{1.0});
    sol.mu = 0.0;
    sol.x1 = 1.0;
    sol.degenerate = true;
    return sol;
  }
  return solve_stationary_density(DensityModelConfig(static_cast<std::size_t>(support), a, leapfrog));
}

std::vector<double> imitation_kernel(const StationarySolution& density, int m, int j_min, double leapfrog) {
  require_grid(m, j_min);
  if (!(leapfrog > 0.0 && leapfrog <= 1.0)) throw ParameterError("leapfrog probability must lie in (0,1]");
  const int s = static_cast<int>(density.x.size());
  const int lowest = m - s + 1;
  if (lowest - 1 < j_min) {
    throw GridTooSmallError("support of " + std::to_string(s) + " levels does not fit above j_min = " +
                            std::to_string(j_min));
  }
  std::vector<double> q(at(m, j_min) + 1, 0.0);
  for (int level = lowest; level <= m; ++level) {
    // Target level `level` at time t is level - 1 after relabeling.
    q[at(level - 1, j_min)] += (1.0 - leapfrog) * density.x[static_cast<std::size_t>(level - lowest)];
  }
  q.back() += leapfrog;
  return q;
}

ValueSolution solve_fixed_support(const EconomicParams& params, int m, int j_min, double leapfrog, int support,
                                  double tol) {
  const auto density = support_density(support, params.a(), leapfrog);
  const auto kernel = imitation_kernel(density, m, j_min, leapfrog);
  return solve_with_kernel(params, m, j_min, kernel, tol);
}

CoupledSolution solve_leapfrog_imitation(const EconomicParams& params, int m, int j_min, double leapfrog,
                                         double tol, int max_outer) {
  if (!(leapfrog > 0.0 && leapfrog < 1.0)) {
    throw ParameterError("coupled solver needs leapfrog probability in (0,1)");
  }
  if (max_outer < 1) throw ParameterError("max_outer must be >= 1");
  // Leapfrog-only is the leapfrog -> 1 limit; its support is the starting guess.
  int s = solve_leapfrog_only(params, m, j_min, tol).support_size;
  CoupledSolution out;
  out.visited.push_back(s);
  for (int iter = 0; iter < max_outer; ++iter) {
    auto values = solve_fixed_support(params, m, j_min, leapfrog, s, tol);
    const int next = values.support_size;
    if (next == s) {
      out.values = std::move(values);
      out.density = support_density(s, params.a(), leapfrog);
      return out;
    }
    const auto seen = std::find(out.visited.begin(), out.visited.end(), next);
    if (seen != out.visited.end()) {
      std::vector<int> cycle(seen, out.visited.end());
      std::ostringstream msg;
      msg << "support-size iteration cycles through";
      for (int c : cycle) msg << ' ' << c;
      throw OuterLoopCycleError(msg.str(), std::move(cycle));
    }
    out.visited.push_back(next);
    s = next;
  }
  throw ConvergenceError("support-size iteration did not settle within " + std::to_string(max_outer) +
                         " outer iterations");
}

std::vector<int> self_consistent_supports(const EconomicParams& params, int m, int j_min, double leapfrog,
                                          double tol) {
  require_grid(m, j_min);
  std::vector<int> found;
  for (int s = 1; s <= m - j_min; ++s) {
    try {
      if (solve_fixed_support(params, m, j_min, leapfrog, s, tol).support_size == s) found.push_back(s);
    } catch (const GridTooSmallError&) {
    } catch (const ModelViolationError&) {
    }
  }
  return found;
}

double delta_v(const EconomicParams& params, const ValueSolution& sol, int j) {
  if (j - 1 < sol.j_min || j > sol.m) throw DomainError("delta_v: level outside the grid");
  const double beta = params.beta();
  return (1.0 - params.a()) * (beta * sol.V(sol.m) - params.cost() - beta * sol.V(j - 1));
}

double delta_v(const EconomicParams& params, const ValueSolution& sol, int j, std::span<const double> kernel) {
  if (j - 1 < sol.j_min || j > sol.m) throw DomainError("delta_v: level outside the grid");
  if (kernel.size() != sol.grid_size()) throw ParameterError("delta_v: kernel length does not match the grid");
  const double below = sol.V(j - 1);
  CompensatedSum gain;
  for (int k = j; k <= sol.m; ++k) gain.add(kernel[at(k, sol.j_min)] * (sol.V(k) - below));
  return (1.0 - params.a()) * (params.beta() * gain.value() - params.cost());
}

std::vector<double> policy_long_run_distribution(const ValueSolution& sol, double a, std::vector<double> initial,
                                                 double tol, std::size_t max_steps) {
  const std::size_t n = sol.grid_size();
  if (initial.size() != n) throw ParameterError("initial distribution length does not match the grid");
  if (!(a > 0.0 && a < 1.0)) throw ParameterError("innovation probability a must lie in (0,1)");
  auto f = detail::checked_normalized(std::move(initial), "initial distribution");
  const std::size_t jump_top = at(sol.j0, sol.j_min);
  std::vector<double> next(n);
  for (std::size_t step = 0; step < max_steps; ++step) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      next[i] += a * f[i];  // innovators keep their relabeled level
      if (i <= jump_top) {
        next[n - 1] += (1.0 - a) * f[i];
      } else {
        next[i - 1] += (1.0 - a) * f[i];
      }
    }
    CompensatedSum diff;
    for (std::size_t i = 0; i < n; ++i) diff.add(std::abs(next[i] - f[i]));
    std::swap(f, next);
    if (diff.value() < tol) return f;
  }
  throw ConvergenceError("policy dynamics did not settle", f);
}

}  // namespace qladder
