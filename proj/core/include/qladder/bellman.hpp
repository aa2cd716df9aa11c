#pragma once

// Endogenous support length: firms that fail to innovate choose whether to
// pay a cost C to jump (leapfrog to the frontier, or imitate a level drawn
// from the stationary density). The value function is solved by value
// iteration on a finite grid [j_min, m] in the relabeled frame, m being the
// frontier.
//
// Payoffs are measured relative to the frontier: p_j = lambda^(j - m). With
// that normalization the solution depends on j only through m - j, which is
// what makes the support size independent of m.

#include <optional>
#include <span>
#include <vector>

#include "qladder/density.hpp"

namespace qladder {

class EconomicParams {
 public:
  /// a in (0,1), lambda > 1, beta0 in (0,1), cost >= 0 and lambda*beta0 < 1.
  EconomicParams(double a, double lambda, double beta0, double cost);

  double a() const noexcept { return a_; }
  double lambda() const noexcept { return lambda_; }
  double beta0() const noexcept { return beta0_; }
  double cost() const noexcept { return cost_; }
  /// Effective discount lambda * beta0.
  double beta() const noexcept { return lambda_ * beta0_; }
  /// Normalized payoff at level j when the frontier sits at m.
  double payoff(int j, int m) const;

 private:
  double a_;
  double lambda_;
  double beta0_;
  double cost_;
};

/// Value table on the grid [j_min, m]. Vectors are indexed by j - j_min.
struct ValueSolution {
  int j_min = 0;
  int m = 0;
  std::vector<double> value;
  std::vector<double> value_lf;
  /// NaN at j_min, where jumping is forced and there is no level j_min - 1.
  std::vector<double> value_nlf;
  /// Largest level that jumps.
  int j0 = 0;
  int support_size = 0;
  /// Sup-norm change of every sweep, in order.
  std::vector<double> residuals;

  std::size_t grid_size() const noexcept { return value.size(); }
  double V(int j) const { return value.at(static_cast<std::size_t>(j - j_min)); }
  double V_LF(int j) const { return value_lf.at(static_cast<std::size_t>(j - j_min)); }
  double V_NLF(int j) const { return value_nlf.at(static_cast<std::size_t>(j - j_min)); }
};

inline constexpr double kDefaultBellmanTol = 1e-10;

/// Leapfrog-only model. Throws GridTooSmallError when j0 <= j_min + 2 (or
/// no level jumps), ModelViolationError when V is not monotone or the
/// jump/no-jump pattern has more than one crossing.
ValueSolution solve_leapfrog_only(const EconomicParams& params, int m, int j_min,
                                  double tol = kDefaultBellmanTol);

/// True when the leapfrog-only support size is the same at frontiers m1 and
/// m2 (both solved on grids starting at j_min).
bool support_size_invariance_check(const EconomicParams& params, int m1, int m2, int j_min = 0,
                                   double tol = kDefaultBellmanTol);

/// Jump kernel q_k on [j_min, m] for the stationary density occupying the
/// top `support` levels: q_k = (1 - q_m) f^{k+1} for k < m, q_m = leapfrog.
std::vector<double> imitation_kernel(const StationarySolution& density, int m, int j_min, double leapfrog);

/// Stationary density used for a support of s levels (s == 1 is the
/// degenerate single-level support).
StationarySolution support_density(int support, double a, double leapfrog);

/// Value iteration for an arbitrary jump kernel q (indexed by k - j_min,
/// summing to one over the grid). The leapfrog-only model is q = delta_m.
ValueSolution solve_with_kernel(const EconomicParams& params, int m, int j_min, std::span<const double> kernel,
                                double tol = kDefaultBellmanTol);

/// Inner solve of the coupled model for a fixed guess of the support size.
ValueSolution solve_fixed_support(const EconomicParams& params, int m, int j_min, double leapfrog, int support,
                                  double tol = kDefaultBellmanTol);

struct CoupledSolution {
  ValueSolution values;
  StationarySolution density;
  /// Support sizes visited by the outer loop, starting with the initial guess.
  std::vector<int> visited;
};

/// Self-consistent leapfrog + imitation solution: guess s, take the
/// stationary density on s levels, solve the Bellman system, set
/// s = m - j0 + 1 and repeat until s is stable. Throws OuterLoopCycleError
/// on a cycle and ConvergenceError when max_outer is exhausted.
CoupledSolution solve_leapfrog_imitation(const EconomicParams& params, int m, int j_min, double leapfrog,
                                         double tol = kDefaultBellmanTol, int max_outer = 200);

/// Every s in [1, m - j_min] whose inner solve is valid and reproduces s.
std::vector<int> self_consistent_supports(const EconomicParams& params, int m, int j_min, double leapfrog,
                                          double tol = kDefaultBellmanTol);

/// V_LF(j) - V_NLF(j) for the leapfrog-only model:
/// (1-a) [beta V(m) - C - beta V(j-1)].
double delta_v(const EconomicParams& params, const ValueSolution& sol, int j);

/// V_LF(j) - V_NLF(j) with jump kernel q (indexed by k - j_min):
/// (1-a) (beta sum_{k>=j} q_k [V(k) - V(j-1)] - C).
double delta_v(const EconomicParams& params, const ValueSolution& sol, int j, std::span<const double> kernel);

/// Mean-field dynamics under the solved policy (levels <= j0 jump to the
/// frontier, others fall back one level unless they innovate), iterated from
/// `initial` (on the grid) until successive L1 change < tol.
std::vector<double> policy_long_run_distribution(const ValueSolution& sol, double a, std::vector<double> initial,
                                                 double tol = 1e-15, std::size_t max_steps = 10'000'000);

}  // namespace qladder
