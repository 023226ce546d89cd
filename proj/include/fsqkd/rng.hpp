#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>

namespace fsqkd {

/// Named substreams. Every consumer of randomness draws from its own stream so
/// that enabling one component (an attack, say) never shifts the draws seen by
/// another.
enum class Stream : std::uint64_t {
  alice_bits = 1,
  bob_choice = 2,
  source = 3,
  eve = 4,
  channel = 5,
  detector = 6,
  optics = 7,
  qber_sample = 8,
  reconcile = 9,
  privacy = 10,
  auth_pool = 11,
  bases = 12,
  misc = 13,
};

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Small counter-derived generator (SplitMix64). Cheap to construct, so each
/// simulation tick gets its own instance and the draw order inside one tick is
/// independent of how ticks are scheduled across threads.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit constexpr Rng(std::uint64_t state = 0) noexcept : state_(state) {}

  /// Generator for (seed, stream, index). Same triple, same sequence.
  static constexpr Rng substream(std::uint64_t seed, Stream stream,
                                 std::uint64_t index = 0) noexcept {
    std::uint64_t s = mix64(seed);
    s = mix64(s ^ (static_cast<std::uint64_t>(stream) * 0xd1b54a32d192ed03ULL));
    s = mix64(s ^ index);
    return Rng(s);
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  constexpr result_type operator()() noexcept {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() noexcept {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
  }

  bool bernoulli(double p) noexcept { return uniform() < p; }

  int bit() noexcept { return static_cast<int>((*this)() >> 63); }

  /// Unbiased integer in [0, n); n must be > 0.
  std::uint64_t below(std::uint64_t n) noexcept {
    const std::uint64_t limit = max() - max() % n;
    std::uint64_t x;
    do {
      x = (*this)();
    } while (x >= limit);
    return x % n;
  }

 private:
  std::uint64_t state_;
};

}  // namespace fsqkd
