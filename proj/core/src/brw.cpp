#include "qladder/brw.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

#include "qladder/errors.hpp"

namespace qladder {

BRWParams::BRWParams(double a, double mu) : a_(a), mu_(mu) {
  if (!(a > 0.0 && a < 1.0)) throw ParameterError("innovation probability a must lie in (0,1)");
  if (!(mu > 0.0 && mu <= 1.0)) throw ParameterError("imitation probability mu must lie in (0,1]");
}

ParticleState::ParticleState(std::int64_t floor, std::vector<Count> counts, std::int64_t time)
    : floor_(floor), time_(time) {
  const auto first = std::find_if(counts.begin(), counts.end(), [](Count c) { return c != 0; });
  if (first == counts.end()) {
    return;  // empty state
  }
  const auto last = std::find_if(counts.rbegin(), counts.rend(), [](Count c) { return c != 0; }).base();
  floor_ += first - counts.begin();
  counts_.assign(first, last);
  for (Count c : counts_) total_ += c;
}

ParticleState ParticleState::point_mass(Count firms, std::int64_t level) {
  if (firms == 0) throw ParameterError("initial state needs at least one firm");
  return ParticleState(level, {firms});
}

Count ParticleState::count_at(std::int64_t level) const noexcept {
  if (empty() || level < y_min() || level > y_max()) return 0;
  return counts_[static_cast<std::size_t>(level - floor_)];
}

ParticleState evolve_step(const ParticleState& state, const BRWParams& params, Rng& rng) {
  if (state.empty()) return state;
  const auto& counts = state.counts();
  std::vector<Count> next(counts.size() + 1, 0);
  for (std::size_t i = 0; i < counts.size(); ++i) {
    const Count n = counts[i];
    if (n == 0) continue;
    const Count innovators = sample_binomial(rng, n, params.a());
    const Count imitated = sample_binomial(rng, n, params.mu());
    next[i] += n - innovators + imitated;
    next[i + 1] += innovators;
  }
  return ParticleState(state.y_min(), std::move(next), state.time() + 1);
}

CullResult cull(const ParticleState& state, const CullPolicy& policy) {
  if (state.empty()) return {state, false};
  if (const auto* keep = std::get_if<KeepTopN>(&policy)) {
    if (keep->n == 0) throw ParameterError("KeepTopN needs N >= 1");
    if (state.total() <= keep->n) {
      return {state, state.total() < keep->n};
    }
    std::vector<Count> counts = state.counts();
    Count excess = state.total() - keep->n;
    for (auto& c : counts) {
      const Count removed = std::min(c, excess);
      c -= removed;
      excess -= removed;
      if (excess == 0) break;
    }
    return {ParticleState(state.y_min(), std::move(counts), state.time()), false};
  }
  const auto& window = std::get<WindowL>(policy);
  if (window.width < 1) throw ParameterError("WindowL needs L >= 1");
  const std::int64_t lowest_kept = state.y_max() - window.width + 1;
  if (state.y_min() >= lowest_kept) return {state, false};
  const auto skip = static_cast<std::size_t>(lowest_kept - state.y_min());
  std::vector<Count> counts(state.counts().begin() + static_cast<std::ptrdiff_t>(skip), state.counts().end());
  return {ParticleState(lowest_kept, std::move(counts), state.time()), false};
}

Count Snapshot::total() const noexcept {
  Count t = 0;
  for (Count c : counts) t += c;
  return t;
}

std::vector<double> Snapshot::upper_cumulative() const {
  std::vector<double> h(counts.size(), 0.0);
  const Count tot = total();
  if (tot == 0) return h;
  Count above = 0;
  for (std::size_t z = counts.size(); z-- > 0;) {
    above += counts[z];
    h[z] = to_double(above) / to_double(tot);
  }
  return h;
}

TrajectoryRecord run(const ParticleState& initial, const BRWParams& params, const CullPolicy& policy,
                     std::int64_t steps, std::uint64_t seed, std::int64_t snapshot_every) {
  if (steps < 1) throw ParameterError("run needs steps >= 1");
  if (snapshot_every < 0) throw ParameterError("snapshot_every must be >= 0");
  if (initial.empty()) throw ParameterError("initial state is empty");
  Rng rng(seed);
  TrajectoryRecord rec;
  rec.seed = seed;
  const auto n = static_cast<std::size_t>(steps) + 1;
  rec.y_max.reserve(n);
  rec.y_min.reserve(n);
  rec.total.reserve(n);
  auto record = [&rec](const ParticleState& s) {
    rec.y_max.push_back(s.y_max());
    rec.y_min.push_back(s.y_min());
    rec.total.push_back(s.total());
  };
  ParticleState state = initial;
  record(state);
  for (std::int64_t t = 1; t <= steps; ++t) {
    state = cull(evolve_step(state, params, rng), policy).state;
    if (state.empty()) {
      throw ExtinctionError("population went extinct at step " + std::to_string(t), t);
    }
    record(state);
    if (snapshot_every > 0 && t % snapshot_every == 0) {
      rec.snapshots.push_back(Snapshot{t, state.y_min(), state.counts()});
    }
  }
  return rec;
}

std::vector<TrajectoryRecord> run_replicas(const ParticleState& initial, const BRWParams& params,
                                           const CullPolicy& policy, std::int64_t steps, std::uint64_t base_seed,
                                           std::size_t replicas, std::int64_t snapshot_every, unsigned threads) {
  std::vector<TrajectoryRecord> out(replicas);
  if (replicas == 0) return out;
  unsigned workers = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, replicas));

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < replicas; i = next++) {
      try {
        out[i] = run(initial, params, policy, steps, replica_seed(base_seed, i), snapshot_every);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace qladder
