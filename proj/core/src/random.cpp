#include "qladder/random.hpp"

#include <algorithm>
#include <cmath>

#include "qladder/errors.hpp"

namespace qladder {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t replica_seed(std::uint64_t base_seed, std::uint64_t index) noexcept {
  return splitmix64(base_seed + 0x9E3779B97F4A7C15ULL * (index + 1));
}

namespace {

Count exact_binomial(Rng& rng, Count n, double p) {
  std::binomial_distribution<std::int64_t> dist(static_cast<std::int64_t>(n), p);
  return static_cast<Count>(dist(rng));
}

}  // namespace

Count sample_binomial(Rng& rng, Count n, double p) {
  if (n == 0 || p <= 0.0) return 0;
  if (p >= 1.0) return n;
  if (n <= kExactBinomialLimit) return exact_binomial(rng, n, p);

  const double nd = to_double(n);
  const double variance = nd * p * (1.0 - p);
  if (variance >= 1e12) {
    std::normal_distribution<double> z(0.0, 1.0);
    const double draw = std::round(nd * p + std::sqrt(variance) * z(rng));
    const double clamped = std::clamp(draw, 0.0, nd);
    const Count k = static_cast<Count>(clamped);
    return std::min(k, n);
  }
  Count total = 0;
  Count remaining = n;
  while (remaining > 0) {
    const Count chunk = std::min(remaining, kExactBinomialLimit);
    total += exact_binomial(rng, chunk, p);
    remaining -= chunk;
  }
  return total;
}

std::string to_string(Count value) {
  if (value == 0) return "0";
  std::string out;
  while (value > 0) {
    out.push_back(static_cast<char>('0' + static_cast<int>(value % 10)));
    value /= 10;
  }
  std::reverse(out.begin(), out.end());
  return out;
}

double to_double(Count value) noexcept { return static_cast<double>(value); }

Count parse_count(std::string_view text) {
  if (text.empty()) throw ParameterError("empty count");
  constexpr Count kMax = ~Count{0};
  Count v = 0;
  for (char c : text) {
    if (c < '0' || c > '9') throw ParameterError("count is not a non-negative integer: " + std::string(text));
    const auto digit = static_cast<Count>(c - '0');
    if (v > (kMax - digit) / 10) throw ParameterError("count overflows 128 bits: " + std::string(text));
    v = v * 10 + digit;
  }
  return v;
}

}  // namespace qladder
