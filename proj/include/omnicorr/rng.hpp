#pragma once

#include <cmath>
#include <cstdint>

namespace omnicorr {

namespace detail {
inline std::uint64_t mix64(std::uint64_t x) {
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}
}  // namespace detail

// SplitMix64 counter generator. Each (seed, replicate, graph) triple owns an
// independent stream, so parallel sampling replays bit-identically. The std
// distributions are implementation-defined, so all draws go through uniform().
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  /// Derive the stream for (seed, replicate, graph).
  static Rng stream(std::uint64_t seed, std::uint64_t replicate,
                    std::uint64_t graph) {
    std::uint64_t s = detail::mix64(seed + 0x9e3779b97f4a7c15ULL);
    s = detail::mix64(s ^ (0x517cc1b727220a95ULL * (replicate + 1)));
    s = detail::mix64(s ^ (0x2545f4914f6cdd1dULL * (graph + 1)));
    return Rng(s);
  }

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return detail::mix64(state_);
  }

  /// Uniform on [0,1) with 53 bits of precision.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

  /// Integer in [0, n); n is tiny relative to 2^64, so modulo bias is moot.
  std::uint64_t below(std::uint64_t n) { return next_u64() % n; }

  double normal() {
    // Marsaglia polar method.
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    have_spare_ = true;
    return u * f;
  }

 private:
  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace omnicorr
