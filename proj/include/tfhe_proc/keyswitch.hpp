#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "tfhe_proc/decomposition.hpp"
#include "tfhe_proc/error.hpp"
#include "tfhe_proc/field.hpp"
#include "tfhe_proc/lwe.hpp"
#include "tfhe_proc/params.hpp"
#include "tfhe_proc/random.hpp"

namespace tfhe_proc {

/// kN Lev ciphertexts under the small key. Row (i, j) at index i * levels + j
/// encrypts -Sk'_i * round(q / beta^(j+1)) when `negated` is set.
struct KeySwitchKey {
  std::size_t input_dimension = 0;
  std::size_t output_dimension = 0;
  unsigned log_base = 0;
  std::size_t levels = 0;
  bool negated = true;
  std::vector<LweCiphertext> rows;

  const LweCiphertext& row(std::size_t i, std::size_t j) const { return rows[i * levels + j]; }
};

inline KeySwitchKey generate_key_switch_key(const LweSecretKey& from, const LweSecretKey& to,
                                            const TfheParams& params, CounterRng& rng) {
  const Decomposer dec = keyswitch_decomposer(params);
  KeySwitchKey ksk;
  ksk.input_dimension = from.size();
  ksk.output_dimension = to.size();
  ksk.log_base = dec.log_base();
  ksk.levels = dec.levels();
  ksk.rows.reserve(from.size() * dec.levels());
  const double stddev = params.key_noise_stddev();
  for (std::size_t i = 0; i < from.size(); ++i) {
    for (std::size_t j = 1; j <= dec.levels(); ++j) {
      const FieldElement m = from.bits[i] ? fe_neg(dec.gadget(j)) : FieldElement::zero();
      ksk.rows.push_back(lwe_encrypt_with(m, to, stddev, rng));
    }
  }
  return ksk;
}

/// (0, b) + sum_ij Decomp(a_i)_j * KSK_ij, one accumulation with no sign switch.
inline LweCiphertext key_switch(const LweCiphertext& ct, const KeySwitchKey& ksk) {
  if (!ksk.negated) throw InvalidArgument("key switching expects a negated key");
  if (ct.dimension() != ksk.input_dimension) {
    throw InvalidArgument("ciphertext dimension does not match key-switching key");
  }
  const Decomposer dec(ksk.log_base, ksk.levels);
  const std::size_t n = ksk.output_dimension;
  LweCiphertext out(n);
  out.body = ct.body;
  std::vector<std::int64_t> digits(ksk.levels);
  for (std::size_t i = 0; i < ct.dimension(); ++i) {
    dec.decompose_into(ct.mask[i], digits.data());
    for (std::size_t j = 0; j < ksk.levels; ++j) {
      if (digits[j] == 0) continue;
      const FieldElement d = FieldElement::from_i64(digits[j]);
      const LweCiphertext& r = ksk.row(i, j);
      for (std::size_t t = 0; t < n; ++t) out.mask[t] += d * r.mask[t];
      out.body += d * r.body;
    }
  }
  return out;
}

}  // namespace tfhe_proc
