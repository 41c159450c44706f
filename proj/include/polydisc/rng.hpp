#pragma once

#include <cstdint>
#include <limits>
#include <numbers>

namespace polydisc {

/// SplitMix64 finalizer; a bijective 64-bit mixer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Sequential SplitMix64 generator. Satisfies UniformRandomBitGenerator.
class RandomStream {
 public:
  using result_type = std::uint64_t;

  explicit constexpr RandomStream(std::uint64_t state) noexcept : state_(state) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  constexpr result_type operator()() noexcept {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix64(state_);
  }

  /// Uniform on [0, 1) with 53 random bits.
  constexpr double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  constexpr double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

  /// Uniform angle in [0, 2pi).
  double angle() noexcept {
    double a = 2.0 * std::numbers::pi * uniform();
    return a < 2.0 * std::numbers::pi ? a : 0.0;
  }

 private:
  std::uint64_t state_;
};

/// Counter-based family of streams: (seed, purpose, index) -> independent RandomStream.
///
/// Sample i of an experiment always draws from stream(i) regardless of which
/// worker evaluates it, so results do not depend on the degree of parallelism.
class StreamFamily {
 public:
  explicit constexpr StreamFamily(std::uint64_t seed, std::uint64_t purpose = 0) noexcept
      : seed_(seed), purpose_(purpose) {}

  constexpr std::uint64_t seed() const noexcept { return seed_; }

  constexpr RandomStream stream(std::uint64_t index) const noexcept {
    return RandomStream(mix64(mix64(seed_ ^ 0x243f6a8885a308d3ULL) + mix64(purpose_ + 0x13198a2e03707344ULL)) ^
                        mix64(index + 0xa4093822299f31d0ULL));
  }

  /// A family with an independent purpose tag, for a second kind of draw in the same run.
  constexpr StreamFamily derive(std::uint64_t purpose) const noexcept {
    return StreamFamily(seed_, mix64(purpose_ * 0x9e3779b97f4a7c15ULL + purpose + 1));
  }

 private:
  std::uint64_t seed_;
  std::uint64_t purpose_;
};

}  // namespace polydisc
