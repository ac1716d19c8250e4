#pragma once

#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>

#include "tfhe_proc/error.hpp"
#include "tfhe_proc/field.hpp"

namespace tfhe_proc {

/// floor(y / q) for any 128-bit y, using q = 2^64 - (2^32 - 1).
constexpr u128 floor_div_q(u128 y) {
  // q < 2^64, so y >> 64 never overshoots; fold the remainder twice.
  u128 quot = y >> 64;
  u128 rem = static_cast<std::uint64_t>(y) + quot * kEpsilon;
  while (rem >= (u128{1} << 64)) {
    const u128 t = rem >> 64;
    quot += t;
    rem = static_cast<std::uint64_t>(rem) + t * kEpsilon;
  }
  while (rem >= kModulus) {
    quot += 1;
    rem -= kModulus;
  }
  return quot;
}

/// round(q / den) for den > 0.
constexpr std::uint64_t round_q_fraction(std::uint64_t den) {
  const u128 q = kModulus;
  return static_cast<std::uint64_t>((2 * q + den) / (2 * u128{den}));
}

/// Scheme parameters. q is fixed to the Solinas prime.
struct TfheParams {
  std::size_t lwe_dimension = 500;   ///< n
  std::size_t polynomial_size = 1024;  ///< N
  std::size_t glwe_dimension = 1;    ///< k
  std::size_t levels = 2;            ///< decomposition depth
  unsigned log_base = 10;            ///< log2 of the decomposition base
  std::uint64_t plaintext_modulus = 16;  ///< p
  double sigma = 0x1.0p-25;          ///< fresh-encryption noise stddev, fraction of q
  double key_sigma = 0x1.0p-25;      ///< noise stddev of bootstrapping/key-switching key material
  std::size_t ks_levels = 4;
  unsigned ks_log_base = 4;

  std::uint64_t delta() const { return round_q_fraction(2 * plaintext_modulus); }
  std::uint64_t e_max() const { return delta() / 2; }
  std::size_t extracted_dimension() const { return glwe_dimension * polynomial_size; }
  double noise_stddev() const { return sigma * static_cast<double>(kModulus); }
  double key_noise_stddev() const { return key_sigma * static_cast<double>(kModulus); }

  void validate() const {
    if (lwe_dimension == 0) throw InvalidArgument("lwe dimension must be positive");
    if (polynomial_size == 0 || !std::has_single_bit(polynomial_size) ||
        polynomial_size > (std::size_t{1} << 31)) {
      throw InvalidArgument("polynomial size must be a power of two");
    }
    if (glwe_dimension == 0) throw InvalidArgument("glwe dimension must be positive");
    if (levels == 0 || log_base == 0 || levels * log_base > 64) {
      throw InvalidArgument("decomposition must satisfy levels * log_base <= 64");
    }
    if (ks_levels == 0 || ks_log_base == 0 || ks_levels * ks_log_base > 64) {
      throw InvalidArgument("key-switch decomposition must satisfy levels * log_base <= 64");
    }
    if (plaintext_modulus < 2 || !std::has_single_bit(plaintext_modulus)) {
      throw InvalidArgument("plaintext modulus must be a power of two >= 2");
    }
    if (plaintext_modulus > polynomial_size) {
      throw InvalidArgument("plaintext modulus must not exceed the polynomial size");
    }
    if (!(sigma >= 0) || !(key_sigma >= 0)) throw InvalidArgument("noise must be non-negative");
  }

  friend bool operator==(const TfheParams&, const TfheParams&) = default;
};

/// n=500, N=1024, k=1, l=2, log2(beta)=10.
inline TfheParams standard_params() { return TfheParams{}; }

/// n=800, N=16384, k=1, l=5, log2(beta)=6.
inline TfheParams large_params() {
  TfheParams p;
  p.lwe_dimension = 800;
  p.polynomial_size = 16384;
  p.glwe_dimension = 1;
  p.levels = 5;
  p.log_base = 6;
  return p;
}

/// Plaintext slot of a phase: round(phase / delta) mod 2p, ties up.
inline std::uint64_t decode_slot(FieldElement phase, std::uint64_t delta, std::uint64_t p) {
  const u128 num = static_cast<u128>(phase.value()) + delta / 2;
  return static_cast<std::uint64_t>(num / delta) % (2 * p);
}

inline std::uint64_t decode_slot(FieldElement phase, const TfheParams& params) {
  return decode_slot(phase, params.delta(), params.plaintext_modulus);
}

/// Message in [0, p); throws PaddingOverflow when the slot is in the upper half.
inline std::uint64_t decode(FieldElement phase, const TfheParams& params) {
  const std::uint64_t slot = decode_slot(phase, params);
  if (slot >= params.plaintext_modulus) throw PaddingOverflow();
  return slot;
}

inline FieldElement encode(std::uint64_t m, const TfheParams& params) {
  if (m >= params.plaintext_modulus) {
    throw InvalidArgument("message " + std::to_string(m) + " outside [0, p)");
  }
  return FieldElement::from_u64(m) * FieldElement(params.delta());
}

}  // namespace tfhe_proc
