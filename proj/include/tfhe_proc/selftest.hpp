#pragma once

// Oracle checks shared by the selftest command and the test suites.

#include <array>
#include <chrono>
#include <cstdint>
#include <functional>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "tfhe_proc/bootstrap.hpp"
#include "tfhe_proc/decomposition.hpp"
#include "tfhe_proc/field.hpp"
#include "tfhe_proc/isa.hpp"
#include "tfhe_proc/ntt.hpp"
#include "tfhe_proc/random.hpp"
#include "tfhe_proc/tfhe.hpp"

namespace tfhe_proc::selftest {

struct CheckResult {
  bool ok = true;
  std::uint64_t cases = 0;
  std::uint64_t failures = 0;
  std::string detail;

  void fail(const std::string& what) {
    ++failures;
    if (ok) detail = what;
    ok = false;
  }

  void merge(const CheckResult& other) {
    cases += other.cases;
    failures += other.failures;
    if (ok && !other.ok) detail = other.detail;
    ok = ok && other.ok;
  }
};

inline u128 random_u128(CounterRng& rng) {
  return (static_cast<u128>(rng.next_u64()) << 64) | rng.next_u64();
}

inline std::vector<u128> reduction_edge_set() {
  const u128 q = kModulus;
  return {0, q, q - 1, (u128{1} << 64) - 1, ~u128{0}, q * q, u128{1} << 64, u128{1} << 96,
          (q - 1) * (q - 1), (u128{1} << 96) - 1, q << 64};
}

/// reduce128 against the compiler's 128-bit remainder.
inline CheckResult check_reduction(std::uint64_t count, std::uint64_t seed) {
  CheckResult r;
  auto one = [&](u128 v) {
    ++r.cases;
    const std::uint64_t got = reduce128(WideProduct{v}).value();
    const auto want = static_cast<std::uint64_t>(v % kModulus);
    if (got != want) {
      std::ostringstream os;
      os << "v = 0x" << std::hex << static_cast<std::uint64_t>(v >> 64) << std::setw(16) << std::setfill('0')
         << static_cast<std::uint64_t>(v) << ": got " << std::dec << got << ", want " << want;
      r.fail(os.str());
    }
  };
  for (u128 v : reduction_edge_set()) one(v);
  CounterRng rng(seed, 0xA1);
  for (std::uint64_t i = 0; i < count; ++i) one(random_u128(rng));
  return r;
}

inline PolyCoeffs random_poly(std::size_t n, CounterRng& rng) {
  PolyCoeffs p(n);
  for (auto& c : p.coeffs) c = rng.uniform_field();
  return p;
}

/// Transform-based product against the schoolbook oracle. With `corrupt` the
/// check runs on a private twiddle table with one entry damaged.
inline CheckResult check_ntt(const std::vector<std::size_t>& sizes, std::size_t pairs, std::uint64_t seed,
                             bool corrupt = false) {
  CheckResult r;
  CounterRng rng(seed, 0xB2);
  for (std::size_t n : sizes) {
    TwiddleTable tw(n);
    if (corrupt && n > 1) tw.corrupt_for_testing(1);
    for (std::size_t i = 0; i < pairs; ++i) {
      ++r.cases;
      const PolyCoeffs a = random_poly(n, rng);
      const PolyCoeffs b = random_poly(n, rng);
      const PolyCoeffs fast = inverse_ntt(pointwise_mul(forward_ntt(a, tw), forward_ntt(b, tw)), tw);
      if (fast != schoolbook_negacyclic_mul(a, b)) r.fail("N = " + std::to_string(n) + ", pair " + std::to_string(i));
    }
  }
  return r;
}

/// Digit and reconstruction bounds on random residues.
inline CheckResult check_decomposition(unsigned log_base, std::size_t levels, std::uint64_t count,
                                       std::uint64_t seed) {
  CheckResult r;
  const Decomposer dec(log_base, levels);
  const auto half = static_cast<std::int64_t>(dec.base() / 2);
  const std::uint64_t bound = dec.precision();
  CounterRng rng(seed, 0xC3);
  std::vector<std::int64_t> digits(levels);
  for (std::uint64_t i = 0; i < count; ++i) {
    ++r.cases;
    const FieldElement x = i < 4 ? FieldElement(std::array<std::uint64_t, 4>{0, 1, kModulus - 1, kModulus / 2}[i])
                                 : rng.uniform_field();
    dec.decompose_into(x, digits.data());
    FieldElement acc;
    bool digit_ok = true;
    for (std::size_t j = 0; j < levels; ++j) {
      if (digits[j] < -half || digits[j] >= half) digit_ok = false;
      acc += FieldElement::from_i64(digits[j]) * dec.gadget(j + 1);
    }
    const std::int64_t err = (x - acc).centered();
    const std::uint64_t mag = err < 0 ? static_cast<std::uint64_t>(-err) : static_cast<std::uint64_t>(err);
    if (!digit_ok || mag > bound) {
      r.fail("x = " + std::to_string(x.value()) + (digit_ok ? ": reconstruction error " + std::to_string(err)
                                                            : ": digit out of range"));
    }
  }
  return r;
}

/// Toy parameters for the noiseless blind-rotation oracle.
inline TfheParams toy_params(std::size_t n_lwe, std::size_t n_poly) {
  TfheParams p = standard_params();
  p.lwe_dimension = n_lwe;
  p.polynomial_size = n_poly;
  p.plaintext_modulus = 4;
  p.sigma = 0;
  p.key_sigma = 0;
  return p;
}

/// Blind rotation with noiseless keys, exhaustive over all 2^n LWE keys, for
/// `trials` random (ciphertext, F) pairs per key. The decoded accumulator must
/// equal F * X^(<a~, sk> - b~) slot for slot.
inline CheckResult check_blind_rotation(std::size_t n_lwe, std::size_t n_poly, std::size_t trials,
                                        std::uint64_t seed) {
  CheckResult r;
  const TfheParams params = toy_params(n_lwe, n_poly);
  const Decomposer dec = bootstrap_decomposer(params);
  const std::uint64_t slots = 2 * params.plaintext_modulus;
  const FieldElement delta(params.delta());
  CounterRng rng(seed, 0xD4);
  const GlweSecretKey glwe = sample_glwe_key(params.glwe_dimension, n_poly, rng);
  const GlweKeyNtt glwe_ntt(glwe);
  for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << n_lwe); ++bits) {
    LweSecretKey sk;
    for (std::size_t i = 0; i < n_lwe; ++i) sk.bits.push_back((bits >> i) & 1);
    CounterRng key_rng = rng.derive(bits);
    const BootstrapKey bsk = generate_bootstrap_key(sk, glwe, params, key_rng);
    for (std::size_t t = 0; t < trials; ++t) {
      ++r.cases;
      LweCiphertext ct(n_lwe);
      for (auto& a : ct.mask) a = rng.uniform_field();
      ct.body = rng.uniform_field();
      std::vector<std::uint64_t> f_slots(n_poly);
      PolyCoeffs f(n_poly);
      for (std::size_t j = 0; j < n_poly; ++j) {
        f_slots[j] = rng.next_u64() % slots;
        f[j] = FieldElement(f_slots[j]) * delta;
      }
      const PolyCoeffs phase = glwe_decrypt(blind_rotate(glwe_trivial(f, params.glwe_dimension), ct, bsk, dec), glwe_ntt);

      // Plaintext simulation on slots.
      const std::size_t n2 = 2 * n_poly;
      std::size_t e = n2 - modswitch_2n(ct.body, n_poly);
      for (std::size_t i = 0; i < n_lwe; ++i) {
        if (sk.bits[i]) e += modswitch_2n(ct.mask[i], n_poly);
      }
      e %= n2;
      for (std::size_t j = 0; j < n_poly; ++j) {
        const std::size_t dst = (j + e) % n2;
        std::uint64_t want = f_slots[j];
        if (dst >= n_poly) want = (slots - want) % slots;
        const std::uint64_t got = decode_slot(phase[dst % n_poly], params.delta(), params.plaintext_modulus);
        if (got != want) {
          r.fail("key " + std::to_string(bits) + ", trial " + std::to_string(t) + ", coefficient " +
                 std::to_string(dst % n_poly));
          break;
        }
      }
    }
  }
  return r;
}

inline Instruction random_instruction(CounterRng& rng, std::size_t n) {
  Instruction ins;
  ins.opcode = static_cast<Opcode>(rng.next_u64() % 3);
  ins.src = rng.next_u64();
  ins.aux = rng.next_u64();
  ins.dst = rng.next_u64();
  if (ins.opcode == Opcode::Pbs) ins.extract_idx = rng.next_u64() % n;
  if (ins.opcode == Opcode::MulAdd) ins.imm = rng.next_u64();
  return ins;
}

inline CheckResult check_instruction_roundtrip(std::uint64_t count, std::size_t n, std::uint64_t seed) {
  CheckResult r;
  CounterRng rng(seed, 0xE5);
  for (std::uint64_t i = 0; i < count; ++i) {
    ++r.cases;
    const Instruction ins = random_instruction(rng, n);
    const auto bytes = encode_instruction(ins, n);
    if (bytes.size() != instruction_bytes(ins, n) || decode_instruction(bytes, n) != ins) {
      r.fail("instruction " + std::to_string(i));
    }
  }
  return r;
}

struct SuiteResult {
  std::string name;
  CheckResult result;
  double seconds = 0;
};

struct Options {
  bool corrupt_twiddle = false;
  std::uint64_t seed = 1;
};

inline SuiteResult timed(const std::string& name, const std::function<CheckResult()>& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  SuiteResult s{name, {}, 0};
  try {
    s.result = fn();
  } catch (const std::exception& e) {
    s.result.fail(std::string("exception: ") + e.what());
  }
  s.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return s;
}

/// The suites behind the `selftest` command, sized to finish in seconds.
inline std::vector<SuiteResult> run_all(const Options& opt) {
  std::vector<SuiteResult> out;
  out.push_back(timed("reduction", [&] { return check_reduction(200000, opt.seed); }));
  out.push_back(timed("ntt_vs_schoolbook",
                      [&] { return check_ntt({8, 64, 256, 1024}, 4, opt.seed, opt.corrupt_twiddle); }));
  out.push_back(timed("decomposition", [&] {
    CheckResult a = check_decomposition(10, 2, 100000, opt.seed);
    a.merge(check_decomposition(6, 5, 100000, opt.seed));
    return a;
  }));
  out.push_back(timed("blind_rotation_noiseless", [&] { return check_blind_rotation(2, 16, 4, opt.seed); }));
  out.push_back(timed("instruction_roundtrip", [&] {
    CheckResult a = check_instruction_roundtrip(1000, 1024, opt.seed);
    a.merge(check_instruction_roundtrip(1000, 16384, opt.seed));
    return a;
  }));
  return out;
}

}  // namespace tfhe_proc::selftest
