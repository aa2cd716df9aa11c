#pragma once

// Finite-firm branching random walk on the integer quality ladder.
//
// Each step every firm independently innovates (moves up one level) with
// probability a and is imitated (gains a copy at its current level) with
// probability mu. A culling phase then removes firms at the bottom: either
// everything but the top N firms (N-BRW) or everything L or more levels
// below the leader (L-BRW).
//
// The state is stored as counts per level above a sliding floor, so memory
// is proportional to the support, not to the number of firms.

#include <cstdint>
#include <variant>
#include <vector>

#include "qladder/random.hpp"

namespace qladder {

class BRWParams {
 public:
  /// a in (0,1), mu in (0,1].
  BRWParams(double a, double mu);

  double a() const noexcept { return a_; }
  double mu() const noexcept { return mu_; }

 private:
  double a_;
  double mu_;
};

/// Keep the N highest firms.
struct KeepTopN {
  Count n;
};

/// Remove every firm at y with y_max - y >= width; survivors occupy
/// {y_max - width + 1, ..., y_max}.
struct WindowL {
  std::int64_t width;
};

using CullPolicy = std::variant<KeepTopN, WindowL>;

class ParticleState {
 public:
  ParticleState() = default;
  /// counts[i] firms at level floor + i. Leading/trailing zero levels are trimmed.
  ParticleState(std::int64_t floor, std::vector<Count> counts, std::int64_t time = 0);

  static ParticleState point_mass(Count firms, std::int64_t level = 0);

  bool empty() const noexcept { return counts_.empty(); }
  std::int64_t y_min() const noexcept { return floor_; }
  std::int64_t y_max() const noexcept { return floor_ + static_cast<std::int64_t>(counts_.size()) - 1; }
  std::int64_t time() const noexcept { return time_; }
  Count total() const noexcept { return total_; }
  const std::vector<Count>& counts() const noexcept { return counts_; }
  Count count_at(std::int64_t level) const noexcept;

 private:
  std::int64_t floor_ = 0;
  std::vector<Count> counts_;
  Count total_ = 0;
  std::int64_t time_ = 0;
};

/// Reproduction phase. Per level with n firms the number of innovators is
/// Binomial(n, a) and the number imitated is Binomial(n, mu), independently;
/// this is the four-outcome multinomial marginalised onto the two levels it
/// touches (innovators land at y+1, every imitation adds a copy at y).
ParticleState evolve_step(const ParticleState& state, const BRWParams& params, Rng& rng);

struct CullResult {
  ParticleState state;
  /// KeepTopN only: the population is still below N and nothing was removed.
  bool below_target = false;
};

CullResult cull(const ParticleState& state, const CullPolicy& policy);

/// Counts relative to y_min at one step.
struct Snapshot {
  std::int64_t step = 0;
  std::int64_t y_min = 0;
  std::vector<Count> counts;

  Count total() const noexcept;
  /// h(z): fraction of firms at least z levels above y_min, z = 0..size-1.
  std::vector<double> upper_cumulative() const;
};

/// Observables per step (index = step, entry 0 is the initial state).
struct TrajectoryRecord {
  std::uint64_t seed = 0;
  std::vector<std::int64_t> y_max;
  std::vector<std::int64_t> y_min;
  std::vector<Count> total;
  std::vector<Snapshot> snapshots;

  std::size_t steps() const noexcept { return y_max.empty() ? 0 : y_max.size() - 1; }
};

/// Alternates evolve_step and cull `steps` times. snapshot_every == 0
/// disables snapshots. Throws ExtinctionError if the population vanishes.
TrajectoryRecord run(const ParticleState& initial, const BRWParams& params, const CullPolicy& policy,
                     std::int64_t steps, std::uint64_t seed, std::int64_t snapshot_every = 0);

/// Independent runs with seeds replica_seed(base_seed, i), executed on up to
/// `threads` workers (0 = hardware concurrency). The result is ordered by
/// replica index and does not depend on the thread count.
std::vector<TrajectoryRecord> run_replicas(const ParticleState& initial, const BRWParams& params,
                                           const CullPolicy& policy, std::int64_t steps, std::uint64_t base_seed,
                                           std::size_t replicas, std::int64_t snapshot_every = 0,
                                           unsigned threads = 0);

}  // namespace qladder
