#pragma once

// Signed gadget decomposition in base beta = 2^log_base with `levels` digits.
//
// A residue x is first rounded to r = round(x * beta^levels / q), dropping the
// low-order precision, then split into balanced digits in [-beta/2, beta/2)
// with carry propagation from the least significant digit upwards. The carry
// out of the top digit wraps, since beta^levels * q/beta^levels = q = 0.
// Digit j (1-based) pairs with the gadget value round(q / beta^j).

#include <cstddef>
#include <cstdint>
#include <vector>

#include "tfhe_proc/error.hpp"
#include "tfhe_proc/field.hpp"
#include "tfhe_proc/ntt.hpp"
#include "tfhe_proc/params.hpp"

namespace tfhe_proc {

class Decomposer {
 public:
  Decomposer(unsigned log_base, std::size_t levels) : log_base_(log_base), levels_(levels) {
    if (log_base == 0 || levels == 0 || log_base * levels > 64) {
      throw InvalidArgument("decomposition must satisfy levels * log_base <= 64");
    }
    gadget_.reserve(levels);
    for (std::size_t j = 1; j <= levels; ++j) gadget_.push_back(FieldElement(gadget_value(j)));
  }

  unsigned log_base() const { return log_base_; }
  std::size_t levels() const { return levels_; }
  std::uint64_t base() const { return std::uint64_t{1} << log_base_; }

  /// round(q / beta^j), 1-based level.
  std::uint64_t gadget_value(std::size_t j) const {
    const unsigned shift = static_cast<unsigned>(j) * log_base_;
    const u128 q = kModulus;
    const u128 num = (q << 1) + (u128{1} << shift);
    return static_cast<std::uint64_t>((num >> shift) >> 1);
  }
  FieldElement gadget(std::size_t j) const { return gadget_[j - 1]; }

  /// Worst-case reconstruction distance, round(q / (2 beta^levels)).
  std::uint64_t precision() const {
    const unsigned shift = static_cast<unsigned>(levels_) * log_base_ + 1;
    const u128 q = kModulus;
    return static_cast<std::uint64_t>(((q << 1) + (u128{1} << shift)) >> (shift + 1));
  }

  /// Writes `levels` signed digits of x, most significant first, into out.
  void decompose_into(FieldElement x, std::int64_t* out) const {
    const unsigned total = static_cast<unsigned>(levels_) * log_base_;
    u128 r = floor_div_q((static_cast<u128>(x.value()) << total) + (kModulus - 1) / 2);
    const std::uint64_t mask = base() - 1;
    const std::int64_t half = static_cast<std::int64_t>(base() / 2);
    for (std::size_t j = levels_; j-- > 0;) {
      std::int64_t d = static_cast<std::int64_t>(static_cast<std::uint64_t>(r) & mask);
      r >>= log_base_;
      if (d >= half) {
        d -= static_cast<std::int64_t>(base());
        r += 1;
      }
      out[j] = d;
    }
  }

  std::vector<std::int64_t> decompose_signed(FieldElement x) const {
    std::vector<std::int64_t> digits(levels_);
    decompose_into(x, digits.data());
    return digits;
  }

  /// Digits as canonical residues (negative d stored as q + d).
  std::vector<FieldElement> decompose(FieldElement x) const {
    std::vector<std::int64_t> s = decompose_signed(x);
    std::vector<FieldElement> digits;
    digits.reserve(levels_);
    for (std::int64_t d : s) digits.push_back(FieldElement::from_i64(d));
    return digits;
  }

  /// One polynomial per level, most significant first.
  std::vector<PolyCoeffs> decompose(const PolyCoeffs& p) const {
    std::vector<PolyCoeffs> out(levels_, PolyCoeffs(p.size()));
    std::vector<std::int64_t> digits(levels_);
    for (std::size_t i = 0; i < p.size(); ++i) {
      decompose_into(p[i], digits.data());
      for (std::size_t j = 0; j < levels_; ++j) out[j][i] = FieldElement::from_i64(digits[j]);
    }
    return out;
  }

  FieldElement recompose(const std::vector<FieldElement>& digits) const {
    FieldElement acc;
    for (std::size_t j = 0; j < levels_; ++j) acc += digits[j] * gadget_[j];
    return acc;
  }

 private:
  unsigned log_base_;
  std::size_t levels_;
  std::vector<FieldElement> gadget_;
};

inline Decomposer bootstrap_decomposer(const TfheParams& p) { return Decomposer(p.log_base, p.levels); }
inline Decomposer keyswitch_decomposer(const TfheParams& p) {
  return Decomposer(p.ks_log_base, p.ks_levels);
}

}  // namespace tfhe_proc
