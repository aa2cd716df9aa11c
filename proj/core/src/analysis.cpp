#include "qladder/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include "qladder/errors.hpp"
#include "qladder/numeric.hpp"

namespace qladder {

namespace {

// E[sum_i e^{gamma eps_i}] = 1 + mu + a (e^gamma - 1) and its derivatives in gamma.
struct MomentGenerating {
  double F;
  double dF;
  double d2F;
};

MomentGenerating moment(double gamma, const BRWParams& p) {
  const double e = std::exp(gamma);
  return {1.0 + p.mu() + p.a() * (e - 1.0), p.a() * e, p.a() * e};
}

void require_positive_gamma(double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw ParameterError("speed function needs gamma > 0");
}

constexpr double kPi2 = std::numbers::pi * std::numbers::pi;

}  // namespace

double speed_function(double gamma, const BRWParams& params) {
  require_positive_gamma(gamma);
  return std::log1p(params.mu() + params.a() * std::expm1(gamma)) / gamma;
}

double speed_function_enumerated(double gamma, const BRWParams& params) {
  require_positive_gamma(gamma);
  const double a = params.a();
  const double mu = params.mu();
  struct Outcome {
    double prob;
    std::vector<int> displacements;
  };
  const Outcome outcomes[] = {
      {(1.0 - a) * (1.0 - mu), {0}},
      {(1.0 - a) * mu, {0, 0}},
      {a * (1.0 - mu), {1}},
      {a * mu, {0, 1}},
  };
  double expectation = 0.0;
  for (const auto& o : outcomes) {
    double s = 0.0;
    for (int eps : o.displacements) s += std::exp(gamma * eps);
    expectation += o.prob * s;
  }
  return std::log(expectation) / gamma;
}

SpeedProfile find_gamma_c(const BRWParams& params) {
  auto v = [&params](double g) { return speed_function(g, params); };

  double lo = 0.5;
  double mid = 1.0;
  double hi = 2.0;
  constexpr int kMaxExpansions = 60;
  int expansions = 0;
  while (v(hi) <= v(mid)) {
    if (++expansions > kMaxExpansions) throw NoMinimumError("speed function decreases without bound in gamma");
    lo = mid;
    mid = hi;
    hi *= 2.0;
  }
  while (v(lo) <= v(mid)) {
    if (++expansions > kMaxExpansions) throw NoMinimumError("speed function has no interior minimum near 0");
    hi = mid;
    mid = lo;
    lo *= 0.5;
  }
  const auto golden = golden_section_minimize(v, lo, mid, hi, 1e-12);

  // v'(g) = 0  <=>  s(g) = g F'/F - log F = 0, with s'(g) = g (F'' F - F'^2) / F^2.
  double g = golden.argmin;
  for (int it = 0; it < 50; ++it) {
    const auto m = moment(g, params);
    const double s = g * m.dF / m.F - std::log(m.F);
    const double ds = g * (m.d2F * m.F - m.dF * m.dF) / (m.F * m.F);
    if (!(ds > 0.0)) break;
    const double step = s / ds;
    const double candidate = g - step;
    if (!(candidate > lo && candidate < hi)) break;
    g = candidate;
    if (std::abs(step) <= 1e-15 * g) break;
  }

  const double h = 1e-3 * g;
  auto second_difference = [&](double step) { return (v(g + step) - 2.0 * v(g) + v(g - step)) / (step * step); };
  const double coarse = second_difference(h);
  const double fine = second_difference(0.5 * h);
  if (std::abs(coarse - fine) > 1e-3 * std::abs(fine)) {
    throw NumericError("v''(gamma_c) finite differences disagree between h and h/2");
  }
  const double v_second = (4.0 * fine - coarse) / 3.0;
  if (!(v_second > 0.0)) throw NoMinimumError("v''(gamma_c) is not positive; no strict interior minimum");

  SpeedProfile out;
  out.gamma_c = g;
  out.v_c = v(g);
  out.v_second = v_second;
  out.a = params.a();
  out.mu = params.mu();
  return out;
}

double predict_L0(const SpeedProfile& profile, double n_firms) {
  if (!(n_firms >= 2.0)) throw ParameterError("predict_L0 needs N >= 2");
  return std::log(n_firms) / profile.gamma_c;
}

double predict_vN(const SpeedProfile& profile, double n_firms) {
  if (std::isinf(n_firms)) return profile.v_c;
  const double L0 = predict_L0(profile, n_firms);
  return profile.v_c - kPi2 * profile.v_second / (2.0 * L0 * L0);
}

double predict_N0(const SpeedProfile& profile, double window) {
  if (!(window >= 2.0)) throw ParameterError("predict_N0 needs L >= 2");
  return std::exp(profile.gamma_c * window);
}

double predict_vL(const SpeedProfile& profile, double window) {
  if (!(window >= 2.0)) throw ParameterError("predict_vL needs L >= 2");
  return profile.v_c - kPi2 * profile.v_second / (2.0 * window * window);
}

double cutoff_shape(double z, double L0, double gamma_c, double amplitude) {
  if (!(z > 0.0 && z < L0)) throw DomainError("cutoff shape is only defined for 0 < z < L0");
  return amplitude * L0 * std::sin(std::numbers::pi * z / L0) * std::exp(-gamma_c * z);
}

double cutoff_density_shape(double z, double L0, double gamma_c, double amplitude) {
  return cutoff_shape(z, L0, gamma_c, amplitude * -std::expm1(-gamma_c));
}

VelocityEstimate estimate_velocity(const TrajectoryRecord& record, std::int64_t burn_in) {
  if (burn_in < 0) throw WindowError("burn_in must be >= 0");
  const auto n = static_cast<std::int64_t>(record.y_max.size());
  if (n <= burn_in + 100) {
    throw WindowError("trajectory of " + std::to_string(n) + " points is too short for burn-in " +
                      std::to_string(burn_in) + " (need more than burn_in + 100)");
  }
  std::vector<double> t;
  std::vector<double> y;
  t.reserve(static_cast<std::size_t>(n - burn_in));
  y.reserve(static_cast<std::size_t>(n - burn_in));
  // Positions relative to the first point keep the regression well conditioned.
  const auto y0 = record.y_max[static_cast<std::size_t>(burn_in)];
  for (std::int64_t s = burn_in; s < n; ++s) {
    t.push_back(static_cast<double>(s - burn_in));
    y.push_back(static_cast<double>(record.y_max[static_cast<std::size_t>(s)] - y0));
  }
  const auto fit = least_squares(t, y);
  return {fit.slope, fit.slope_stderr, fit.n};
}

FrontProfile estimate_front_profile(std::span<const TrajectoryRecord> records, std::int64_t burn_in,
                                    std::size_t min_snapshots) {
  std::vector<CompensatedSum> sums;
  CompensatedSum support;
  CompensatedSum population;
  FrontProfile out;
  for (const auto& rec : records) {
    bool used = false;
    for (const auto& snap : rec.snapshots) {
      if (snap.step <= burn_in || snap.counts.empty()) continue;
      const auto h = snap.upper_cumulative();
      if (h.size() > sums.size()) sums.resize(h.size());
      for (std::size_t z = 0; z < h.size(); ++z) sums[z].add(h[z]);
      support.add(static_cast<double>(snap.counts.size() - 1));
      population.add(to_double(snap.total()));
      ++out.snapshots;
      used = true;
    }
    if (used) ++out.replicas;
  }
  if (out.snapshots < min_snapshots) {
    throw WindowError("front profile needs at least " + std::to_string(min_snapshots) +
                      " snapshots past burn-in, got " + std::to_string(out.snapshots));
  }
  const auto count = static_cast<double>(out.snapshots);
  out.h.resize(sums.size());
  for (std::size_t z = 0; z < sums.size(); ++z) out.h[z] = sums[z].value() / count;
  out.mean_support = support.value() / count;
  out.mean_population = population.value() / count;
  return out;
}

std::pair<int, int> bulk_window(const FrontProfile& profile) {
  const double lo = 0.25 * profile.mean_support;
  const double hi = 0.75 * profile.mean_support;
  const int z_lo = static_cast<int>(std::floor(lo)) + 1;
  const int z_hi = static_cast<int>(std::ceil(hi)) - 1;
  if (z_lo > z_hi) {
    throw WindowError("no integer level strictly inside the bulk window of the front");
  }
  return {z_lo, z_hi};
}

double fit_decay_slope(const FrontProfile& profile, int z_lo, int z_hi) {
  const double L = profile.mean_support;
  if (!(z_lo > 0.25 * L) || !(z_hi < 0.75 * L)) {
    std::ostringstream msg;
    msg << "fit window [" << z_lo << ", " << z_hi << "] is not inside (0.25 L, 0.75 L) with L = " << L;
    throw WindowError(msg.str());
  }
  if (z_hi - z_lo < 1) throw WindowError("fit window needs at least two levels");
  if (static_cast<std::size_t>(z_hi) >= profile.h.size()) throw WindowError("fit window exceeds the profile");
  const double floor_h = 10.0 / profile.mean_population;
  std::vector<double> zs;
  std::vector<double> logs;
  for (int z = z_lo; z <= z_hi; ++z) {
    const double h = profile.h[static_cast<std::size_t>(z)];
    if (!(h >= floor_h)) {
      std::ostringstream msg;
      msg << "h(" << z << ") = " << h << " is below 10/N = " << floor_h << " (statistically empty)";
      throw WindowError(msg.str());
    }
    zs.push_back(z);
    logs.push_back(std::log(h));
  }
  return least_squares(zs, logs).slope;
}

double cutoff_front_velocity(const BRWParams& params, double n_firms, std::int64_t max_steps) {
  if (!(n_firms >= 10.0)) throw ParameterError("cutoff front needs N >= 10");
  if (max_steps < 1024) throw ParameterError("cutoff front needs max_steps >= 1024");
  const double cut = std::isinf(n_firms) ? std::numeric_limits<double>::min() : 1.0 / n_firms;
  const double stay = 1.0 - params.a() + params.mu();
  const double a = params.a();

  // h(y) = 1 for y < base; h[i] is h(base + i). Initial condition: step at 0.
  std::int64_t base = 1;
  std::vector<double> h;
  std::vector<double> next;
  auto front = [&] {
    const auto above_half = std::find_if(h.begin(), h.end(), [](double x) { return x < 0.5; }) - h.begin();
    return base - 1 + static_cast<std::int64_t>(above_half);
  };

  const std::int64_t t_start = max_steps / 4;
  const std::int64_t t_mid = t_start + (max_steps - t_start) / 2;
  std::int64_t pos_start = 0;
  std::int64_t pos_mid = 0;
  for (std::int64_t t = 1; t <= max_steps; ++t) {
    next.assign(h.size() + 1, 0.0);
    double prev = 1.0;
    for (std::size_t i = 0; i < next.size(); ++i) {
      const double cur = i < h.size() ? h[i] : 0.0;
      double val = std::min(1.0, stay * cur + a * prev);
      if (val < cut) val = 0.0;
      next[i] = val;
      prev = cur;
    }
    while (!next.empty() && next.back() == 0.0) next.pop_back();
    const auto saturated = std::find_if(next.begin(), next.end(), [](double x) { return x < 1.0; }) - next.begin();
    next.erase(next.begin(), next.begin() + saturated);
    base += saturated;
    std::swap(h, next);
    if (t == t_start) pos_start = front();
    if (t == t_mid) pos_mid = front();
  }
  const std::int64_t pos_end = front();
  const double half_a = static_cast<double>(t_mid - t_start);
  const double half_b = static_cast<double>(max_steps - t_mid);
  const double v_a = static_cast<double>(pos_mid - pos_start) / half_a;
  const double v_b = static_cast<double>(pos_end - pos_mid) / half_b;
  // Integer front positions quantize each half-window rate by 1/length.
  if (std::abs(v_a - v_b) > 1.0 / half_a + 1.0 / half_b + 1e-12) {
    std::ostringstream msg;
    msg << "cutoff front rate not steady: " << v_a << " vs " << v_b << " over the two halves";
    throw ConvergenceError(msg.str());
  }
  return static_cast<double>(pos_end - pos_start) / static_cast<double>(max_steps - t_start);
}

SupportStats support_statistics(const TrajectoryRecord& record, std::int64_t burn_in) {
  if (burn_in < 0) throw WindowError("burn_in must be >= 0");
  const auto n = static_cast<std::int64_t>(record.y_max.size());
  if (n <= burn_in + 1) throw WindowError("trajectory too short for the requested burn-in");
  CompensatedSum sum;
  CompensatedSum sum_sq;
  std::size_t samples = 0;
  for (std::int64_t s = burn_in + 1; s < n; ++s) {
    const auto i = static_cast<std::size_t>(s);
    const double width = static_cast<double>(record.y_max[i] - record.y_min[i]);
    sum.add(width);
    sum_sq.add(width * width);
    ++samples;
  }
  SupportStats out;
  out.samples = samples;
  out.mean = sum.value() / static_cast<double>(samples);
  const double var = sum_sq.value() / static_cast<double>(samples) - out.mean * out.mean;
  out.stddev = std::sqrt(std::max(0.0, var));
  return out;
}

double mean_population(const TrajectoryRecord& record, std::int64_t burn_in) {
  if (burn_in < 0) throw WindowError("burn_in must be >= 0");
  const auto n = static_cast<std::int64_t>(record.total.size());
  if (n <= burn_in + 1) throw WindowError("trajectory too short for the requested burn-in");
  CompensatedSum sum;
  for (std::int64_t s = burn_in + 1; s < n; ++s) sum.add(to_double(record.total[static_cast<std::size_t>(s)]));
  return sum.value() / static_cast<double>(n - burn_in - 1);
}

ExcursionReport support_excursions(const TrajectoryRecord& record, std::int64_t burn_in, double L0,
                                   double threshold) {
  if (burn_in < 0) throw WindowError("burn_in must be >= 0");
  const auto n = static_cast<std::int64_t>(record.y_max.size());
  if (n <= burn_in + 1) throw WindowError("trajectory too short for the requested burn-in");
  ExcursionReport out;
  std::vector<std::int64_t> starts;
  std::int64_t time_above = 0;
  bool inside = false;
  for (std::int64_t s = burn_in + 1; s < n; ++s) {
    const auto i = static_cast<std::size_t>(s);
    const bool above = static_cast<double>(record.y_max[i] - record.y_min[i]) > L0 + threshold;
    if (above) {
      ++time_above;
      if (!inside) starts.push_back(s);
    }
    inside = above;
  }
  out.excursions = starts.size();
  const auto window = static_cast<double>(n - burn_in - 1);
  out.fraction_of_time = static_cast<double>(time_above) / window;
  if (!starts.empty()) out.mean_duration = static_cast<double>(time_above) / static_cast<double>(starts.size());
  if (starts.size() >= 2) {
    out.mean_spacing = static_cast<double>(starts.back() - starts.front()) / static_cast<double>(starts.size() - 1);
  }
  return out;
}

}  // namespace qladder
