#pragma once

#include <cmath>
#include <cstdint>

namespace porogen {

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ULL;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Counter-based PRNG: draw n of stream s is a pure function of
// (seed, s, n). Streams can be split off without sharing mutable state,
// so any consumer can replay its own sequence independently of the
// execution schedule.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0) noexcept
      : key_(mix64(mix64(seed + kGolden) ^ (kStreamMul * (stream + 1)))) {}

  CounterRng derive(std::uint64_t stream) const noexcept {
    CounterRng r(0);
    r.key_ = mix64(key_ ^ (kStreamMul * (stream + 1)));
    r.counter_ = 0;
    return r;
  }

  std::uint64_t next_u64() noexcept {
    return mix64(key_ + kGolden * ++counter_);
  }

  // Uniform in [0, 1), 53-bit resolution.
  double next_double() noexcept { return (next_u64() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, bound); bound > 0.
  std::uint64_t next_below(std::uint64_t bound) noexcept {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * bound) >> 64);
  }

  // Standard normal via Box-Muller; consumes two draws per call.
  double next_normal() noexcept {
    double u1 = ((next_u64() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
    double u2 = (next_u64() >> 11) * 0x1.0p-53;        // [0, 1)
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
  }

 private:
  static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
  static constexpr std::uint64_t kStreamMul = 0xd1b54a32d192ed03ULL;
  static constexpr double kTwoPi = 6.283185307179586;

  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

}  // namespace porogen
