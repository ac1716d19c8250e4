#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "tfhe_proc/error.hpp"
#include "tfhe_proc/field.hpp"
#include "tfhe_proc/params.hpp"
#include "tfhe_proc/random.hpp"

namespace tfhe_proc {

/// Binary LWE key.
struct LweSecretKey {
  std::vector<std::uint8_t> bits;

  std::size_t size() const { return bits.size(); }
  friend bool operator==(const LweSecretKey&, const LweSecretKey&) = default;
};

struct LweCiphertext {
  std::vector<FieldElement> mask;
  FieldElement body;

  LweCiphertext() = default;
  explicit LweCiphertext(std::size_t n) : mask(n) {}

  std::size_t dimension() const { return mask.size(); }
  friend bool operator==(const LweCiphertext&, const LweCiphertext&) = default;
};

inline LweSecretKey sample_lwe_key(std::size_t n, CounterRng& rng) {
  LweSecretKey key;
  key.bits.resize(n);
  for (auto& b : key.bits) b = rng.next_bit() ? 1 : 0;
  return key;
}

/// <a, sk> for a binary key.
inline FieldElement binary_dot(const std::vector<FieldElement>& a, const LweSecretKey& key) {
  if (a.size() != key.size()) throw InvalidArgument("mask length does not match key length");
  FieldElement acc;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (key.bits[i]) acc += a[i];
  }
  return acc;
}

/// (a, <a, sk> + m_scaled + e) with e a rounded Gaussian of stddev `stddev` (absolute).
inline LweCiphertext lwe_encrypt_with(FieldElement m_scaled, const LweSecretKey& key, double stddev,
                                      CounterRng& rng) {
  LweCiphertext ct(key.size());
  for (auto& a : ct.mask) a = rng.uniform_field();
  ct.body = binary_dot(ct.mask, key) + m_scaled + rng.gaussian_field(stddev);
  return ct;
}

/// `sigma` is the noise stddev as a fraction of q.
inline LweCiphertext lwe_encrypt(FieldElement m_scaled, const LweSecretKey& key, double sigma,
                                 std::uint64_t seed) {
  CounterRng rng(seed, 0x1e0);
  return lwe_encrypt_with(m_scaled, key, sigma * static_cast<double>(kModulus), rng);
}

/// Phase b - <a, sk>.
inline FieldElement lwe_decrypt(const LweCiphertext& ct, const LweSecretKey& key) {
  return ct.body - binary_dot(ct.mask, key);
}

inline LweCiphertext lwe_trivial(FieldElement m_scaled, std::size_t n) {
  LweCiphertext ct(n);
  ct.body = m_scaled;
  return ct;
}

inline LweCiphertext lwe_add(const LweCiphertext& x, const LweCiphertext& y) {
  if (x.dimension() != y.dimension()) throw InvalidArgument("lwe_add: dimension mismatch");
  LweCiphertext out(x.dimension());
  for (std::size_t i = 0; i < x.dimension(); ++i) out.mask[i] = x.mask[i] + y.mask[i];
  out.body = x.body + y.body;
  return out;
}

inline LweCiphertext lwe_sub(const LweCiphertext& x, const LweCiphertext& y) {
  if (x.dimension() != y.dimension()) throw InvalidArgument("lwe_sub: dimension mismatch");
  LweCiphertext out(x.dimension());
  for (std::size_t i = 0; i < x.dimension(); ++i) out.mask[i] = x.mask[i] - y.mask[i];
  out.body = x.body - y.body;
  return out;
}

/// Negative scalars are passed as their residue, e.g. q - 1 for -1.
inline LweCiphertext lwe_scalar_mul(const LweCiphertext& x, FieldElement s) {
  LweCiphertext out(x.dimension());
  for (std::size_t i = 0; i < x.dimension(); ++i) out.mask[i] = x.mask[i] * s;
  out.body = x.body * s;
  return out;
}

/// s * x + y, the MulAdd datapath with accumulation bypassed.
inline LweCiphertext lwe_muladd(const LweCiphertext& x, FieldElement s, const LweCiphertext& y) {
  return lwe_add(lwe_scalar_mul(x, s), y);
}

/// Centered error of the phase against an expected scaled message (test instrumentation).
inline std::int64_t noise_of(const LweCiphertext& ct, const LweSecretKey& key, FieldElement expected) {
  return (lwe_decrypt(ct, key) - expected).centered();
}

}  // namespace tfhe_proc
