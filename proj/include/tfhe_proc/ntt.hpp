#pragma once

// Negacyclic NTT over Z_q.
//
// The forward transform uses Cooley-Tukey butterflies on normal-ordered
// input and produces bit-reversed output: values[bitrev(k)] = p(psi^(2k+1)).
// The inverse uses Gentleman-Sande butterflies with inverted twiddles on
// bit-reversed input, returning normal order after a final N^-1 scale.

#include <bit>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <utility>
#include <vector>

#include "tfhe_proc/error.hpp"
#include "tfhe_proc/field.hpp"

namespace tfhe_proc {

/// Coefficient-domain polynomial, index = degree.
struct PolyCoeffs {
  std::vector<FieldElement> coeffs;

  PolyCoeffs() = default;
  explicit PolyCoeffs(std::size_t n) : coeffs(n) {}
  explicit PolyCoeffs(std::vector<FieldElement> c) : coeffs(std::move(c)) {}

  std::size_t size() const { return coeffs.size(); }
  FieldElement& operator[](std::size_t i) { return coeffs[i]; }
  FieldElement operator[](std::size_t i) const { return coeffs[i]; }
  friend bool operator==(const PolyCoeffs&, const PolyCoeffs&) = default;
};

/// NTT-domain polynomial, bit-reversed evaluation order.
struct PolyNtt {
  std::vector<FieldElement> values;

  PolyNtt() = default;
  explicit PolyNtt(std::size_t n) : values(n) {}
  explicit PolyNtt(std::vector<FieldElement> v) : values(std::move(v)) {}

  std::size_t size() const { return values.size(); }
  FieldElement& operator[](std::size_t i) { return values[i]; }
  FieldElement operator[](std::size_t i) const { return values[i]; }
  friend bool operator==(const PolyNtt&, const PolyNtt&) = default;
};

/// Transform size N and streaming throughput T (coefficients per cycle).
struct NttConfig {
  std::size_t n = 0;
  std::size_t throughput = 2;

  void validate() const {
    if (n == 0 || !std::has_single_bit(n) || n > (std::size_t{1} << 31)) {
      throw InvalidArgument("transform size must be a power of two dividing (q-1)/2");
    }
    if (throughput == 0 || !std::has_single_bit(throughput)) {
      throw InvalidArgument("throughput must be a power of two");
    }
    if (throughput > n) throw InvalidArgument("throughput must not exceed the transform size");
  }
};

inline std::size_t bit_reverse(std::size_t x, unsigned bits) {
  std::size_t r = 0;
  for (unsigned i = 0; i < bits; ++i) {
    r = (r << 1) | (x & 1);
    x >>= 1;
  }
  return r;
}

/// Twiddles in butterfly-consumption order: entry m + i is used by block i
/// of the stage with m blocks. Entry 0 is unused.
class TwiddleTable {
 public:
  explicit TwiddleTable(std::size_t n) : n_(n), log_n_(static_cast<unsigned>(std::countr_zero(n))) {
    psi_ = primitive_root_2n(n);
    const FieldElement psi_inv = fe_inv(psi_);
    forward_.resize(n);
    inverse_.resize(n);
    FieldElement p = FieldElement::one();
    FieldElement pi = FieldElement::one();
    std::vector<FieldElement> pow(n), pow_inv(n);
    for (std::size_t i = 0; i < n; ++i) {
      pow[i] = p;
      pow_inv[i] = pi;
      p *= psi_;
      pi *= psi_inv;
    }
    for (std::size_t i = 0; i < n; ++i) {
      forward_[i] = pow[bit_reverse(i, log_n_)];
      inverse_[i] = pow_inv[bit_reverse(i, log_n_)];
    }
    n_inv_ = fe_inv(FieldElement(n));
  }

  std::size_t size() const { return n_; }
  unsigned log_size() const { return log_n_; }
  FieldElement psi() const { return psi_; }
  FieldElement omega() const { return psi_ * psi_; }
  FieldElement n_inverse() const { return n_inv_; }
  std::span<const FieldElement> forward() const { return forward_; }
  std::span<const FieldElement> inverse() const { return inverse_; }

  /// Twiddles of forward stage `s` (2^s blocks).
  std::span<const FieldElement> forward_stage(unsigned s) const {
    const std::size_t m = std::size_t{1} << s;
    return std::span(forward_).subspan(m, m);
  }
  std::span<const FieldElement> inverse_stage(unsigned s) const {
    const std::size_t m = std::size_t{1} << s;
    return std::span(inverse_).subspan(m, m);
  }

  /// Test hook: flips one forward twiddle so transforms silently go wrong.
  void corrupt_for_testing(std::size_t index) {
    forward_.at(index) += FieldElement::one();
  }

 private:
  std::size_t n_;
  unsigned log_n_;
  FieldElement psi_;
  FieldElement n_inv_;
  std::vector<FieldElement> forward_;
  std::vector<FieldElement> inverse_;
};

/// Shared immutable table per transform size.
inline std::shared_ptr<const TwiddleTable> twiddles_for(std::size_t n) {
  static std::mutex mu;
  static std::map<std::size_t, std::shared_ptr<const TwiddleTable>> cache;
  std::lock_guard lock(mu);
  auto& slot = cache[n];
  if (!slot) slot = std::make_shared<const TwiddleTable>(n);
  return slot;
}

/// (a0 + w*a1, a0 - w*a1)
inline std::pair<FieldElement, FieldElement> ct_butterfly(FieldElement a0, FieldElement a1,
                                                          FieldElement w) {
  const FieldElement t = a1 * w;
  return {a0 + t, a0 - t};
}

/// (a0 + a1, (a0 - a1)*w_inv)
inline std::pair<FieldElement, FieldElement> gs_butterfly(FieldElement a0, FieldElement a1,
                                                          FieldElement w_inv) {
  return {a0 + a1, (a0 - a1) * w_inv};
}

namespace detail {

inline void forward_in_place(std::span<FieldElement> a, const TwiddleTable& tw) {
  const std::size_t n = a.size();
  const auto fwd = tw.forward();
  std::size_t t = n;
  for (std::size_t m = 1; m < n; m <<= 1) {
    t >>= 1;
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t j1 = 2 * i * t;
      const FieldElement w = fwd[m + i];
      for (std::size_t j = j1; j < j1 + t; ++j) {
        auto [x, y] = ct_butterfly(a[j], a[j + t], w);
        a[j] = x;
        a[j + t] = y;
      }
    }
  }
}

inline void inverse_in_place_unscaled(std::span<FieldElement> a, const TwiddleTable& tw) {
  const std::size_t n = a.size();
  const auto inv = tw.inverse();
  std::size_t t = 1;
  for (std::size_t m = n; m > 1; m >>= 1) {
    const std::size_t h = m >> 1;
    std::size_t j1 = 0;
    for (std::size_t i = 0; i < h; ++i) {
      const FieldElement w = inv[h + i];
      for (std::size_t j = j1; j < j1 + t; ++j) {
        auto [x, y] = gs_butterfly(a[j], a[j + t], w);
        a[j] = x;
        a[j + t] = y;
      }
      j1 += 2 * t;
    }
    t <<= 1;
  }
}

inline void check_table(std::size_t len, const TwiddleTable& tw) {
  if (len != tw.size()) throw InvalidArgument("polynomial length does not match transform size");
}

}  // namespace detail

inline PolyNtt forward_ntt(const PolyCoeffs& p, const TwiddleTable& tw) {
  detail::check_table(p.size(), tw);
  PolyNtt out(p.coeffs);
  detail::forward_in_place(out.values, tw);
  return out;
}

/// Inverse transform without the final N^-1 scale.
inline PolyCoeffs inverse_ntt_unscaled(const PolyNtt& v, const TwiddleTable& tw) {
  detail::check_table(v.size(), tw);
  PolyCoeffs out(v.values);
  detail::inverse_in_place_unscaled(out.coeffs, tw);
  return out;
}

inline PolyCoeffs inverse_ntt(const PolyNtt& v, const TwiddleTable& tw) {
  PolyCoeffs out = inverse_ntt_unscaled(v, tw);
  const FieldElement s = tw.n_inverse();
  for (auto& c : out.coeffs) c *= s;
  return out;
}

inline PolyNtt forward_ntt(const PolyCoeffs& p, const NttConfig& cfg) {
  cfg.validate();
  if (p.size() != cfg.n) throw InvalidArgument("polynomial length does not match transform size");
  return forward_ntt(p, *twiddles_for(cfg.n));
}

inline PolyCoeffs inverse_ntt(const PolyNtt& v, const NttConfig& cfg) {
  cfg.validate();
  if (v.size() != cfg.n) throw InvalidArgument("polynomial length does not match transform size");
  return inverse_ntt(v, *twiddles_for(cfg.n));
}

inline PolyNtt pointwise_mul(const PolyNtt& a, const PolyNtt& b) {
  if (a.size() != b.size()) throw InvalidArgument("pointwise_mul: length mismatch");
  PolyNtt out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
  return out;
}

/// a * b mod (X^N + 1) through the transform domain.
inline PolyCoeffs negacyclic_mul(const PolyCoeffs& a, const PolyCoeffs& b) {
  if (a.size() != b.size()) throw InvalidArgument("negacyclic_mul: length mismatch");
  const auto tw = twiddles_for(a.size());
  return inverse_ntt(pointwise_mul(forward_ntt(a, *tw), forward_ntt(b, *tw)), *tw);
}

/// Direct O(N^2) convolution folded with c_i - c_{N+i}.
inline PolyCoeffs schoolbook_negacyclic_mul(const PolyCoeffs& a, const PolyCoeffs& b) {
  if (a.size() != b.size()) throw InvalidArgument("schoolbook_negacyclic_mul: length mismatch");
  const std::size_t n = a.size();
  std::vector<FieldElement> full(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) full[i + j] += a[i] * b[j];
  }
  PolyCoeffs out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = full[i] - full[n + i];
  return out;
}

// ---------------------------------------------------------------------------
// Streaming hardware model

/// Per-stage register depth in cycles, calibrated once against the published
/// 1024-point, T = 2 latency.
inline constexpr std::uint64_t kStageRegisterDepth = 19;

struct StageInfo {
  unsigned index = 0;
  bool parallel = false;              ///< final fully parallel T-point stage
  std::size_t butterflies = 0;        ///< butterflies in the stage's BF-block (T/2)
  std::size_t sub_transform = 0;      ///< points per independent sub-transform
  std::size_t buffer_words = 0;       ///< output buffer, 3/4 * N / 2^i for streamed stages
  std::uint64_t start_delay = 0;      ///< cycles before the first output leaves the stage
  std::uint64_t register_depth = 0;
};

struct StageModel {
  NttConfig config;
  std::vector<StageInfo> stages;
  std::uint64_t interval_cycles = 0;  ///< steady-state cycles per transform, N/T
  std::uint64_t fill_cycles = 0;      ///< first input to first output
  std::uint64_t latency_cycles = 0;   ///< reported latency (equals fill_cycles)
  std::uint64_t drain_cycles = 0;     ///< first input to last output, interval + fill
  std::size_t buffer_words = 0;

  std::size_t streamed_stages() const { return stages.empty() ? 0 : stages.size() - 1; }
};

inline StageModel stage_schedule(const NttConfig& cfg, std::uint64_t register_depth = kStageRegisterDepth) {
  cfg.validate();
  StageModel m;
  m.config = cfg;
  const std::size_t ratio = cfg.n / cfg.throughput;
  const unsigned streamed = static_cast<unsigned>(std::countr_zero(ratio));
  for (unsigned i = 0; i < streamed; ++i) {
    StageInfo s;
    s.index = i;
    s.butterflies = cfg.throughput / 2;
    s.sub_transform = cfg.n >> i;
    s.buffer_words = 3 * (cfg.n >> i) / 4;
    // A butterfly needs its partner from the second half of the sub-transform.
    s.start_delay = (cfg.n >> (i + 1)) / cfg.throughput;
    s.register_depth = register_depth;
    m.stages.push_back(s);
  }
  StageInfo last;
  last.index = streamed;
  last.parallel = true;
  last.butterflies = cfg.throughput / 2 * static_cast<std::size_t>(std::countr_zero(cfg.throughput));
  last.sub_transform = cfg.throughput;
  last.register_depth = register_depth;
  m.stages.push_back(last);

  m.interval_cycles = ratio;
  for (const auto& s : m.stages) {
    m.fill_cycles += s.start_delay + s.register_depth;
    m.buffer_words += s.buffer_words;
  }
  m.latency_cycles = m.fill_cycles;
  m.drain_cycles = m.interval_cycles + m.fill_cycles;
  return m;
}

struct NttCycleReport {
  std::uint64_t interval_cycles = 0;
  std::uint64_t latency_cycles = 0;
  double ntts_per_ms = 0.0;
  double latency_us = 0.0;
};

inline NttCycleReport ntt_cycle_model(const NttConfig& cfg, double frequency_hz) {
  if (!(frequency_hz > 0)) throw InvalidArgument("frequency must be positive");
  const StageModel m = stage_schedule(cfg);
  NttCycleReport r;
  r.interval_cycles = m.interval_cycles;
  r.latency_cycles = m.latency_cycles;
  r.ntts_per_ms = frequency_hz / static_cast<double>(m.interval_cycles) / 1000.0;
  r.latency_us = static_cast<double>(m.latency_cycles) / frequency_hz * 1e6;
  return r;
}

}  // namespace tfhe_proc
