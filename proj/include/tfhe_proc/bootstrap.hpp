#pragma once

// External product, CMUX, blind rotation, LUT construction, sample extraction,
// and programmable bootstrapping.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "tfhe_proc/decomposition.hpp"
#include "tfhe_proc/error.hpp"
#include "tfhe_proc/field.hpp"
#include "tfhe_proc/glwe.hpp"
#include "tfhe_proc/lwe.hpp"
#include "tfhe_proc/ntt.hpp"
#include "tfhe_proc/params.hpp"
#include "tfhe_proc/random.hpp"

namespace tfhe_proc {

/// n GGSW encryptions of the LWE key bits under the GLWE key, transform domain.
struct BootstrapKey {
  std::vector<GgswNtt> elements;

  std::size_t size() const { return elements.size(); }
};

/// Sum of a list of transform-domain polynomials by pairwise reduction, the
/// way the hardware accumulation tree combines the (k+1)*l products.
inline void adder_tree(std::vector<PolyNtt>& terms) {
  for (std::size_t width = terms.size(); width > 1;) {
    const std::size_t half = (width + 1) / 2;
    for (std::size_t i = 0; i + half < width; ++i) {
      auto& dst = terms[i].values;
      const auto& src = terms[i + half].values;
      for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += src[j];
    }
    width = half;
  }
}

inline std::size_t adder_tree_depth(std::size_t terms) {
  std::size_t depth = 0;
  while ((std::size_t{1} << depth) < terms) ++depth;
  return depth;
}

inline GlweCiphertext external_product(const GlweCiphertext& c, const GgswNtt& g, const Decomposer& dec) {
  const std::size_t k = c.glwe_dimension();
  const std::size_t n = c.polynomial_size();
  const std::size_t levels = dec.levels();
  if (g.glwe_dimension() != k || g.levels() != levels) {
    throw InvalidArgument("external product: GGSW shape does not match ciphertext");
  }
  const auto tw = twiddles_for(n);

  // Digit polynomials, index (component * levels + level), transformed in place.
  std::vector<PolyNtt> digits((k + 1) * levels, PolyNtt(n));
  std::vector<std::int64_t> buf(levels);
  for (std::size_t comp = 0; comp <= k; ++comp) {
    const PolyCoeffs& src = c.component(comp);
    for (std::size_t i = 0; i < n; ++i) {
      dec.decompose_into(src[i], buf.data());
      for (std::size_t j = 0; j < levels; ++j) {
        digits[comp * levels + j][i] = FieldElement::from_i64(buf[j]);
      }
    }
  }
  for (auto& d : digits) detail::forward_in_place(d.values, *tw);

  GlweCiphertext out(k, n);
  std::vector<PolyNtt> terms(digits.size(), PolyNtt(n));
  for (std::size_t o = 0; o <= k; ++o) {
    for (std::size_t comp = 0; comp <= k; ++comp) {
      for (std::size_t j = 0; j < levels; ++j) {
        const std::size_t t = comp * levels + j;
        const auto& key = g.rows[comp][j].components[o].values;
        const auto& d = digits[t].values;
        auto& dst = terms[t].values;
        for (std::size_t i = 0; i < n; ++i) dst[i] = d[i] * key[i];
      }
    }
    adder_tree(terms);
    out.component(o).coeffs = std::move(terms[0].values);
    detail::inverse_in_place_unscaled(out.component(o).coeffs, *tw);
    terms[0] = PolyNtt(n);
  }
  return out;
}

/// Selects c1 when G encrypts 1 and c0 when it encrypts 0.
inline GlweCiphertext cmux(const GgswNtt& g, const GlweCiphertext& c0, const GlweCiphertext& c1,
                           const Decomposer& dec) {
  return glwe_add(c0, external_product(glwe_sub(c1, c0), g, dec));
}

/// f * X^t mod (X^N + 1), t in [0, 2N).
inline PolyCoeffs monomial_rotate(const PolyCoeffs& f, std::size_t t) {
  const std::size_t n = f.size();
  if (t >= 2 * n) throw InvalidArgument("rotation exponent outside [0, 2N)");
  PolyCoeffs out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t dst = i + t;
    // Each pass over X^N flips the sign.
    const bool negate = ((dst / n) & 1) != 0;
    out[dst % n] = negate ? fe_neg(f[i]) : f[i];
  }
  return out;
}

inline GlweCiphertext glwe_rotate(const GlweCiphertext& c, std::size_t t) {
  GlweCiphertext out(c.glwe_dimension(), c.polynomial_size());
  for (std::size_t i = 0; i <= c.glwe_dimension(); ++i) out.component(i) = monomial_rotate(c.component(i), t);
  return out;
}

/// round(x * 2N / q) mod 2N.
inline std::size_t modswitch_2n(FieldElement x, std::size_t n) {
  const u128 num = static_cast<u128>(x.value()) * (2 * n) + (kModulus - 1) / 2;
  return static_cast<std::size_t>(floor_div_q(num) % (2 * n));
}

/// acc' = acc ext bsk_i; returns rotate(acc', a~) + acc - acc'.
inline GlweCiphertext blind_rotate_step(const GlweCiphertext& acc, FieldElement a, const GgswNtt& bsk_i,
                                        const Decomposer& dec) {
  const std::size_t t = modswitch_2n(a, acc.polynomial_size());
  if (t == 0) return acc;
  const GlweCiphertext prod = external_product(acc, bsk_i, dec);
  GlweCiphertext out(acc.glwe_dimension(), acc.polynomial_size());
  for (std::size_t c = 0; c <= acc.glwe_dimension(); ++c) {
    const PolyCoeffs rotated = monomial_rotate(prod.component(c), t);
    auto& dst = out.component(c);
    const auto& a0 = acc.component(c);
    const auto& p0 = prod.component(c);
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = rotated[i] + a0[i] - p0[i];
  }
  return out;
}

inline GlweCiphertext blind_rotate(const GlweCiphertext& lut, const LweCiphertext& ct, const BootstrapKey& bsk,
                                   const Decomposer& dec) {
  if (ct.dimension() != bsk.size()) throw InvalidArgument("ciphertext dimension does not match bootstrapping key");
  const std::size_t n2 = 2 * lut.polynomial_size();
  const std::size_t b = modswitch_2n(ct.body, lut.polynomial_size());
  GlweCiphertext acc = glwe_rotate(lut, (n2 - b) % n2);
  for (std::size_t i = 0; i < ct.dimension(); ++i) {
    acc = blind_rotate_step(acc, ct.mask[i], bsk.elements[i], dec);
  }
  return acc;
}

/// Redundant LUT polynomial. Window m covers the w = N/p coefficients centred
/// on m*w; the lower half of window 0 wraps to the top of the polynomial with
/// its sign flipped, so a phase slightly below zero still selects table[0].
inline PolyCoeffs lut_polynomial(std::span<const std::uint64_t> table, const TfheParams& params) {
  const std::uint64_t p = params.plaintext_modulus;
  const std::size_t n = params.polynomial_size;
  if (table.size() != p) throw InvalidArgument("lookup table must have exactly p entries");
  const FieldElement delta(params.delta());
  const std::size_t w = n / p;
  PolyCoeffs f(n);
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t m = (j + w / 2) / w;
    if (m < p) {
      f[j] = FieldElement::from_u64(table[m] % (2 * p)) * delta;
    } else {
      f[j] = fe_neg(FieldElement::from_u64(table[0] % (2 * p)) * delta);
    }
  }
  return f;
}

/// Trivial GLWE accumulator holding the LUT polynomial.
inline GlweCiphertext build_lut(std::span<const std::uint64_t> table, const TfheParams& params) {
  return glwe_trivial(lut_polynomial(table, params), params.glwe_dimension);
}

/// LWE encryption of coefficient h of C under the flattened GLWE key.
inline LweCiphertext sample_extract(const GlweCiphertext& c, std::size_t h) {
  const std::size_t n = c.polynomial_size();
  const std::size_t k = c.glwe_dimension();
  if (h >= n) throw InvalidArgument("extract index outside [0, N)");
  LweCiphertext out(k * n);
  for (std::size_t i = 0; i < k; ++i) {
    const PolyCoeffs& a = c.mask[i];
    for (std::size_t j = 0; j <= h; ++j) out.mask[i * n + j] = a[h - j];
    for (std::size_t j = h + 1; j < n; ++j) out.mask[i * n + j] = fe_neg(a[n + h - j]);
  }
  out.body = c.body[h];
  return out;
}

inline LweCiphertext pbs(const LweCiphertext& ct, const GlweCiphertext& lut, const BootstrapKey& bsk,
                         const Decomposer& dec, std::size_t h = 0) {
  return sample_extract(blind_rotate(lut, ct, bsk, dec), h);
}

inline LweCiphertext pbs(const LweCiphertext& ct, const GlweCiphertext& lut, const BootstrapKey& bsk,
                         const TfheParams& params, std::size_t h = 0) {
  return pbs(ct, lut, bsk, bootstrap_decomposer(params), h);
}

/// Element i is a GGSW of sk_i under the GLWE key, converted to the transform domain.
inline BootstrapKey generate_bootstrap_key(const LweSecretKey& sk, const GlweSecretKey& glwe_key,
                                           const TfheParams& params, CounterRng& rng) {
  const Decomposer dec = bootstrap_decomposer(params);
  const GlweKeyNtt key(glwe_key);
  BootstrapKey bsk;
  bsk.elements.reserve(sk.size());
  for (std::size_t i = 0; i < sk.size(); ++i) {
    const GgswCiphertext g = ggsw_encrypt_with(FieldElement(sk.bits[i]), key, params.glwe_dimension,
                                               params.polynomial_size, dec, params.key_noise_stddev(), rng);
    bsk.elements.push_back(ggsw_to_ntt(g));
  }
  return bsk;
}

}  // namespace tfhe_proc
