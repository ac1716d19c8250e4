#pragma once

// End-to-end bootstrapping suite shared by the acceptance and supplementary runs.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "tfhe_proc/tfhe.hpp"

namespace pbs_suite {

using namespace tfhe_proc;

struct LutResult {
  std::string name;
  std::uint64_t trials = 0;
  std::uint64_t failures = 0;
  double noise_log2_std = 0;  ///< log2 stddev of the key-switched output error
};

struct Result {
  std::vector<LutResult> luts;
  double seconds = 0;

  std::uint64_t failures() const {
    std::uint64_t f = 0;
    for (const auto& l : luts) f += l.failures;
    return f;
  }
  std::uint64_t trials() const {
    std::uint64_t t = 0;
    for (const auto& l : luts) t += l.trials;
    return t;
  }
};

inline std::vector<std::pair<std::string, std::vector<std::uint64_t>>> tables(std::uint64_t p) {
  std::vector<std::uint64_t> id(p), neg(p), thr(p);
  for (std::uint64_t m = 0; m < p; ++m) {
    id[m] = m;
    neg[m] = p - 1 - m;
    thr[m] = m >= p / 2 ? 1 : 0;
  }
  return {{"identity", id}, {"negation", neg}, {"threshold", thr}};
}

/// decode(key_switch(pbs(encrypt(m)))) against the table, `trials` times per m.
inline Result run(const TfheParams& params, std::uint64_t trials, std::uint64_t seed, bool verbose) {
  const auto t0 = std::chrono::steady_clock::now();
  const KeySet keys = generate_keys(params, seed);
  const Decomposer dec = bootstrap_decomposer(params);
  CounterRng rng(seed, 0x5017E);
  Result out;
  for (const auto& [name, table] : tables(params.plaintext_modulus)) {
    const GlweCiphertext lut = build_lut(table, params);
    LutResult r{name, 0, 0, 0};
    double sum_sq = 0;
    for (std::uint64_t m = 0; m < params.plaintext_modulus; ++m) {
      for (std::uint64_t t = 0; t < trials; ++t) {
        const LweCiphertext ct = encrypt_message(m, keys, rng);
        const LweCiphertext ks = key_switch(pbs(ct, lut, keys.bsk, dec), keys.ksk);
        const FieldElement phase = lwe_decrypt(ks, keys.lwe);
        ++r.trials;
        if (decode_slot(phase, params) != table[m]) ++r.failures;
        const double e = static_cast<double>((phase - encode(table[m], params)).centered());
        sum_sq += e * e;
      }
    }
    r.noise_log2_std = 0.5 * std::log2(sum_sq / static_cast<double>(r.trials));
    if (verbose) {
      std::printf("    %-9s %5llu trials, %4llu failures, output noise std 2^%.2f (e_max 2^%.2f)\n", name.c_str(),
                  static_cast<unsigned long long>(r.trials), static_cast<unsigned long long>(r.failures),
                  r.noise_log2_std, std::log2(static_cast<double>(params.e_max())));
      std::fflush(stdout);
    }
    out.luts.push_back(r);
  }
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

}  // namespace pbs_suite
