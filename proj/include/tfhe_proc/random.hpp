#pragma once

// Seeded counter-based randomness. Every draw is a pure function of
// (seed, stream, counter), so independent streams can be derived for
// key material, masks, and noise without sharing state.

#include <cmath>
#include <cstdint>
#include <numbers>

#include "tfhe_proc/field.hpp"

namespace tfhe_proc {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E37'79B9'7F4A'7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58'476D'1CE4'E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D0'49BB'1331'11EBULL;
  return x ^ (x >> 31);
}

class CounterRng {
 public:
  constexpr CounterRng(std::uint64_t seed, std::uint64_t stream)
      : key_(splitmix64(seed ^ splitmix64(stream))) {}

  /// Independent child stream.
  constexpr CounterRng derive(std::uint64_t stream) const {
    return CounterRng(key_, splitmix64(stream + 0x5151'5151ULL));
  }

  constexpr std::uint64_t next_u64() { return splitmix64(key_ ^ splitmix64(counter_++)); }

  constexpr bool next_bit() { return (next_u64() >> 63) != 0; }

  /// Uniform in [0, q) by rejection.
  constexpr FieldElement uniform_field() {
    for (;;) {
      const std::uint64_t v = next_u64();
      if (v < kModulus) return FieldElement(v);
    }
  }

  /// Uniform in (0, 1].
  double next_unit() {
    return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller (one value per call).
  double next_gaussian() {
    const double u1 = next_unit();
    const double u2 = next_unit();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  /// Rounded Gaussian with standard deviation `stddev` (absolute, in Z_q units).
  FieldElement gaussian_field(double stddev) {
    if (stddev <= 0) return FieldElement::zero();
    return FieldElement::from_i64(std::llround(stddev * next_gaussian()));
  }

  constexpr std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace tfhe_proc
