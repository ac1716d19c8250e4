#pragma once

#include <cstdint>
#include <tuple>
#include <utility>

#include "tfhe_proc/bootstrap.hpp"
#include "tfhe_proc/decomposition.hpp"
#include "tfhe_proc/error.hpp"
#include "tfhe_proc/field.hpp"
#include "tfhe_proc/glwe.hpp"
#include "tfhe_proc/keyswitch.hpp"
#include "tfhe_proc/lwe.hpp"
#include "tfhe_proc/ntt.hpp"
#include "tfhe_proc/params.hpp"
#include "tfhe_proc/random.hpp"

namespace tfhe_proc {

// RNG stream ids used by key generation.
inline constexpr std::uint64_t kStreamLweKey = 1;
inline constexpr std::uint64_t kStreamGlweKey = 2;
inline constexpr std::uint64_t kStreamBsk = 3;
inline constexpr std::uint64_t kStreamKsk = 4;

inline std::pair<LweSecretKey, GlweSecretKey> keygen(const TfheParams& params, std::uint64_t seed) {
  params.validate();
  CounterRng lwe_rng(seed, kStreamLweKey);
  CounterRng glwe_rng(seed, kStreamGlweKey);
  return {sample_lwe_key(params.lwe_dimension, lwe_rng),
          sample_glwe_key(params.glwe_dimension, params.polynomial_size, glwe_rng)};
}

/// Secret keys plus the evaluation keys derived from them.
struct KeySet {
  TfheParams params;
  LweSecretKey lwe;
  GlweSecretKey glwe;
  BootstrapKey bsk;
  KeySwitchKey ksk;

  LweSecretKey extracted() const { return flatten_key(glwe); }
};

inline KeySet generate_keys(const TfheParams& params, std::uint64_t seed) {
  KeySet ks;
  ks.params = params;
  std::tie(ks.lwe, ks.glwe) = keygen(params, seed);
  CounterRng bsk_rng(seed, kStreamBsk);
  ks.bsk = generate_bootstrap_key(ks.lwe, ks.glwe, params, bsk_rng);
  CounterRng ksk_rng(seed, kStreamKsk);
  ks.ksk = generate_key_switch_key(flatten_key(ks.glwe), ks.lwe, params, ksk_rng);
  return ks;
}

/// Encrypts message m in [0, p) with the parameter set's fresh noise.
inline LweCiphertext encrypt_message(std::uint64_t m, const KeySet& keys, CounterRng& rng) {
  return lwe_encrypt_with(encode(m, keys.params), keys.lwe, keys.params.noise_stddev(), rng);
}

inline std::uint64_t decrypt_message(const LweCiphertext& ct, const LweSecretKey& key, const TfheParams& params) {
  return decode(lwe_decrypt(ct, key), params);
}

}  // namespace tfhe_proc
