#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>

namespace qladder {

/// Firm counts. 128 bits so that L-BRW populations of order e^{gamma_c L}
/// (beyond 1e19 for L = 20 at gamma_c ~ 2.5) fit exactly.
__extension__ typedef unsigned __int128 Count;

using Rng = std::mt19937_64;

/// Identifier of the generator algorithm, echoed into every run manifest.
inline constexpr std::string_view kGeneratorId = "std::mt19937_64";

/// Description of replica_seed, echoed into manifests.
inline constexpr std::string_view kSeedMixingId =
    "splitmix64(base_seed + 0x9E3779B97F4A7C15 * (replica_index + 1))";

/// One round of the splitmix64 finalizer.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Seed of replica `index` derived from `base_seed`; replicas are
/// reproducible in isolation.
std::uint64_t replica_seed(std::uint64_t base_seed, std::uint64_t index) noexcept;

/// Counts up to this bound are drawn with std::binomial_distribution. The
/// libstdc++ sampler works in double precision and stalls well before 2^63,
/// so the bound is the largest n a double holds exactly.
inline constexpr Count kExactBinomialLimit = Count{1} << 53;

/// Binomial(n, p) draw. Exact for n <= kExactBinomialLimit. Above that the
/// draw is the rounded normal N(np, np(1-p)) when np(1-p) >= 1e12
/// (Berry-Esseen CDF error below 1e-6), and otherwise a sum of exact
/// binomials over chunks of n (only reached for p below ~1e-4).
Count sample_binomial(Rng& rng, Count n, double p);

std::string to_string(Count value);
double to_double(Count value) noexcept;
/// Parses a non-negative decimal integer; throws ParameterError on junk or overflow.
Count parse_count(std::string_view text);

}  // namespace qladder
