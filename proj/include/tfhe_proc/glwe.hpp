#pragma once

// GLWE, GLev, and GGSW ciphertexts over R_q = Z_q[X]/(X^N + 1).

#include <cstddef>
#include <cstdint>
#include <vector>

#include "tfhe_proc/decomposition.hpp"
#include "tfhe_proc/error.hpp"
#include "tfhe_proc/field.hpp"
#include "tfhe_proc/lwe.hpp"
#include "tfhe_proc/ntt.hpp"
#include "tfhe_proc/params.hpp"
#include "tfhe_proc/random.hpp"

namespace tfhe_proc {

/// k binary polynomials of degree < N.
struct GlweSecretKey {
  std::size_t polynomial_size = 0;
  std::vector<std::vector<std::uint8_t>> polys;

  std::size_t glwe_dimension() const { return polys.size(); }

  PolyCoeffs as_poly(std::size_t i) const {
    PolyCoeffs p(polynomial_size);
    for (std::size_t j = 0; j < polynomial_size; ++j) p[j] = FieldElement(polys[i][j]);
    return p;
  }

  friend bool operator==(const GlweSecretKey&, const GlweSecretKey&) = default;
};

/// Concatenated coefficient vectors: bit iN + j is coefficient j of polynomial i.
inline LweSecretKey flatten_key(const GlweSecretKey& sk) {
  LweSecretKey out;
  out.bits.reserve(sk.glwe_dimension() * sk.polynomial_size);
  for (const auto& poly : sk.polys) out.bits.insert(out.bits.end(), poly.begin(), poly.end());
  return out;
}

inline GlweSecretKey sample_glwe_key(std::size_t k, std::size_t n, CounterRng& rng) {
  GlweSecretKey key;
  key.polynomial_size = n;
  key.polys.assign(k, std::vector<std::uint8_t>(n));
  for (auto& poly : key.polys) {
    for (auto& b : poly) b = rng.next_bit() ? 1 : 0;
  }
  return key;
}

struct GlweCiphertext {
  std::vector<PolyCoeffs> mask;
  PolyCoeffs body;

  GlweCiphertext() = default;
  GlweCiphertext(std::size_t k, std::size_t n) : mask(k, PolyCoeffs(n)), body(n) {}

  std::size_t glwe_dimension() const { return mask.size(); }
  std::size_t polynomial_size() const { return body.size(); }
  /// Component i of (mask_0, ..., mask_{k-1}, body).
  PolyCoeffs& component(std::size_t i) { return i < mask.size() ? mask[i] : body; }
  const PolyCoeffs& component(std::size_t i) const { return i < mask.size() ? mask[i] : body; }

  friend bool operator==(const GlweCiphertext&, const GlweCiphertext&) = default;
};

/// One GLWE ciphertext per gadget level, level j scaled by round(q / beta^j).
struct GlevCiphertext {
  std::vector<GlweCiphertext> levels;
};

/// (k+1) GLev rows: row i < k carries -m * s_i, row k carries m.
struct GgswCiphertext {
  std::vector<GlevCiphertext> rows;
};

struct GlweNtt {
  std::vector<PolyNtt> components;  ///< k masks then the body
};

/// GGSW with every polynomial in the transform domain, pre-scaled by N^-1.
struct GgswNtt {
  std::vector<std::vector<GlweNtt>> rows;  ///< rows[i][j]: component i, level j

  std::size_t glwe_dimension() const { return rows.empty() ? 0 : rows.size() - 1; }
  std::size_t levels() const { return rows.empty() ? 0 : rows.front().size(); }
};

inline void check_same_shape(const GlweCiphertext& x, const GlweCiphertext& y) {
  if (x.glwe_dimension() != y.glwe_dimension() || x.polynomial_size() != y.polynomial_size()) {
    throw InvalidArgument("GLWE shape mismatch");
  }
}

inline PolyCoeffs poly_add(const PolyCoeffs& x, const PolyCoeffs& y) {
  PolyCoeffs out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] + y[i];
  return out;
}

inline PolyCoeffs poly_sub(const PolyCoeffs& x, const PolyCoeffs& y) {
  PolyCoeffs out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] - y[i];
  return out;
}

inline GlweCiphertext glwe_add(const GlweCiphertext& x, const GlweCiphertext& y) {
  check_same_shape(x, y);
  GlweCiphertext out(x.glwe_dimension(), x.polynomial_size());
  for (std::size_t i = 0; i <= x.glwe_dimension(); ++i) {
    out.component(i) = poly_add(x.component(i), y.component(i));
  }
  return out;
}

inline GlweCiphertext glwe_sub(const GlweCiphertext& x, const GlweCiphertext& y) {
  check_same_shape(x, y);
  GlweCiphertext out(x.glwe_dimension(), x.polynomial_size());
  for (std::size_t i = 0; i <= x.glwe_dimension(); ++i) {
    out.component(i) = poly_sub(x.component(i), y.component(i));
  }
  return out;
}

/// Zero mask, body = message. Decrypts to `message` under any key.
inline GlweCiphertext glwe_trivial(const PolyCoeffs& message, std::size_t k) {
  GlweCiphertext ct(k, message.size());
  ct.body = message;
  return ct;
}

/// Secret key polynomials held in the transform domain for fast products.
class GlweKeyNtt {
 public:
  explicit GlweKeyNtt(const GlweSecretKey& key) : tw_(twiddles_for(key.polynomial_size)) {
    for (std::size_t i = 0; i < key.glwe_dimension(); ++i) {
      polys_.push_back(forward_ntt(key.as_poly(i), *tw_));
    }
  }

  /// sum_i mask_i * s_i
  PolyCoeffs mask_product(const std::vector<PolyCoeffs>& mask) const {
    if (mask.size() != polys_.size()) throw InvalidArgument("GLWE dimension does not match key");
    const std::size_t n = tw_->size();
    PolyNtt acc(n);
    for (std::size_t i = 0; i < mask.size(); ++i) {
      if (mask[i].size() != n) throw InvalidArgument("polynomial size does not match key");
      const PolyNtt a = forward_ntt(mask[i], *tw_);
      for (std::size_t j = 0; j < n; ++j) acc[j] += a[j] * polys_[i][j];
    }
    return inverse_ntt(acc, *tw_);
  }

 private:
  std::shared_ptr<const TwiddleTable> tw_;
  std::vector<PolyNtt> polys_;
};

/// Mask uniform, body = <mask, S> + message + e with coefficient noise stddev `stddev`.
inline GlweCiphertext glwe_encrypt_with(const PolyCoeffs& message, const GlweKeyNtt& key,
                                        std::size_t k, double stddev, CounterRng& rng) {
  const std::size_t n = message.size();
  GlweCiphertext ct(k, n);
  for (auto& poly : ct.mask) {
    for (auto& c : poly.coeffs) c = rng.uniform_field();
  }
  ct.body = key.mask_product(ct.mask);
  for (std::size_t j = 0; j < n; ++j) ct.body[j] += message[j] + rng.gaussian_field(stddev);
  return ct;
}

/// `sigma` is the noise stddev as a fraction of q.
inline GlweCiphertext glwe_encrypt(const PolyCoeffs& message, const GlweSecretKey& key, double sigma,
                                   std::uint64_t seed) {
  CounterRng rng(seed, 0x61e);
  return glwe_encrypt_with(message, GlweKeyNtt(key), key.glwe_dimension(),
                           sigma * static_cast<double>(kModulus), rng);
}

/// Phase polynomial body - <mask, S>.
inline PolyCoeffs glwe_decrypt(const GlweCiphertext& ct, const GlweKeyNtt& key) {
  return poly_sub(ct.body, key.mask_product(ct.mask));
}

inline PolyCoeffs glwe_decrypt(const GlweCiphertext& ct, const GlweSecretKey& key) {
  return glwe_decrypt(ct, GlweKeyNtt(key));
}

/// GGSW encryption of a scalar message m: GLWE encryptions of zero with m * g_j
/// added to component i of row (i, j).
inline GgswCiphertext ggsw_encrypt_with(FieldElement m, const GlweKeyNtt& key, std::size_t k,
                                        std::size_t n, const Decomposer& dec, double stddev,
                                        CounterRng& rng) {
  GgswCiphertext g;
  g.rows.resize(k + 1);
  const PolyCoeffs zero(n);
  for (std::size_t i = 0; i <= k; ++i) {
    g.rows[i].levels.reserve(dec.levels());
    for (std::size_t j = 1; j <= dec.levels(); ++j) {
      GlweCiphertext ct = glwe_encrypt_with(zero, key, k, stddev, rng);
      ct.component(i)[0] += m * dec.gadget(j);
      g.rows[i].levels.push_back(std::move(ct));
    }
  }
  return g;
}

/// Transform-domain form with the inverse transform's N^-1 folded in.
inline GgswNtt ggsw_to_ntt(const GgswCiphertext& g) {
  GgswNtt out;
  if (g.rows.empty()) return out;
  const std::size_t n = g.rows[0].levels.at(0).polynomial_size();
  const auto tw = twiddles_for(n);
  const FieldElement n_inv = tw->n_inverse();
  out.rows.resize(g.rows.size());
  for (std::size_t i = 0; i < g.rows.size(); ++i) {
    for (const auto& level : g.rows[i].levels) {
      GlweNtt row;
      for (std::size_t c = 0; c <= level.glwe_dimension(); ++c) {
        PolyNtt v = forward_ntt(level.component(c), *tw);
        for (auto& x : v.values) x *= n_inv;
        row.components.push_back(std::move(v));
      }
      out.rows[i].push_back(std::move(row));
    }
  }
  return out;
}

}  // namespace tfhe_proc
