#pragma once

// Arithmetic in Z_q for the Solinas prime q = 2^64 - 2^32 + 1.
//
// Products are reduced with the limb identity 2^96 = -1, 2^64 = 2^32 - 1
// (mod q): a 128-bit value v = a*2^96 + b*2^64 + c*2^32 + d folds to
// (b + c)*2^32 + (d - a - b), followed by conditional corrections.

#include <array>
#include <bit>
#include <cstdint>
#include <ostream>

#include "tfhe_proc/error.hpp"

namespace tfhe_proc {

using u128 = unsigned __int128;

inline constexpr std::uint64_t kModulus = 0xFFFF'FFFF'0000'0001ULL;
/// 2^64 mod q.
inline constexpr std::uint64_t kEpsilon = 0xFFFF'FFFFULL;

/// Canonical residue in [0, q).
class FieldElement {
 public:
  constexpr FieldElement() = default;
  /// `v` must already be canonical; use `from_u64` for arbitrary input.
  constexpr explicit FieldElement(std::uint64_t v) : value_(v) {}

  static constexpr FieldElement from_u64(std::uint64_t v) {
    return FieldElement(v >= kModulus ? v - kModulus : v);
  }
  /// Two's-complement style embedding of a small signed integer.
  static constexpr FieldElement from_i64(std::int64_t v) {
    if (v >= 0) return from_u64(static_cast<std::uint64_t>(v));
    std::uint64_t mag = static_cast<std::uint64_t>(-(v + 1)) + 1;
    mag = mag >= kModulus ? mag - kModulus : mag;
    return FieldElement(mag == 0 ? 0 : kModulus - mag);
  }

  static constexpr FieldElement zero() { return FieldElement(0); }
  static constexpr FieldElement one() { return FieldElement(1); }

  constexpr std::uint64_t value() const { return value_; }
  constexpr bool is_zero() const { return value_ == 0; }

  /// Centered representative in (-q/2, q/2].
  constexpr std::int64_t centered() const {
    return value_ > kModulus / 2 ? -static_cast<std::int64_t>(kModulus - value_)
                                 : static_cast<std::int64_t>(value_);
  }

  friend constexpr bool operator==(FieldElement, FieldElement) = default;

 private:
  std::uint64_t value_ = 0;
};

inline std::ostream& operator<<(std::ostream& os, FieldElement x) { return os << x.value(); }

/// 128-bit intermediate product; limbs a, b, c, d from most to least significant.
struct WideProduct {
  u128 value = 0;

  constexpr std::uint32_t limb_a() const { return static_cast<std::uint32_t>(value >> 96); }
  constexpr std::uint32_t limb_b() const { return static_cast<std::uint32_t>(value >> 64); }
  constexpr std::uint32_t limb_c() const { return static_cast<std::uint32_t>(value >> 32); }
  constexpr std::uint32_t limb_d() const { return static_cast<std::uint32_t>(value); }

  friend constexpr bool operator==(WideProduct, WideProduct) = default;
};

// Simple reduction: one conditional subtraction of q. Written with masks
// instead of branches; the carry pattern is data dependent.
constexpr FieldElement fe_add(FieldElement x, FieldElement y) {
  std::uint64_t s = 0;
  const bool carry = __builtin_add_overflow(x.value(), y.value(), &s);
  // A carry past 2^64 is worth 2^64 - q = kEpsilon.
  s += kEpsilon & (0 - static_cast<std::uint64_t>(carry));
  return FieldElement(s >= kModulus ? s - kModulus : s);
}

// Simple reduction: one conditional addition of q.
constexpr FieldElement fe_sub(FieldElement x, FieldElement y) {
  std::uint64_t d = 0;
  const bool borrow = __builtin_sub_overflow(x.value(), y.value(), &d);
  return FieldElement(d + (kModulus & (0 - static_cast<std::uint64_t>(borrow))));
}

constexpr FieldElement fe_neg(FieldElement x) {
  return FieldElement(x.is_zero() ? 0 : kModulus - x.value());
}

/// Division-free Solinas reduction of a 128-bit value.
constexpr FieldElement reduce128(WideProduct v) {
  const std::uint64_t a = v.limb_a();
  const std::uint64_t b = v.limb_b();
  const std::uint64_t c = v.limb_c();
  const std::uint64_t d = v.limb_d();

  // (b + c) * 2^32: b + c < 2^33, so split off the bit that reaches 2^64.
  const std::uint64_t bc = b + c;
  const std::uint64_t bc_hi = bc >> 32;

  // Disjoint bit ranges, so this is a concatenation.
  std::uint64_t pos = (bc << 32) | d;
  // The 2^64 bit folds back as 2^32 - 1, and so does a carry out of that add.
  const bool carry = __builtin_add_overflow(pos, kEpsilon & (0 - bc_hi), &pos);
  pos += kEpsilon & (0 - static_cast<std::uint64_t>(carry));

  // Subtract a + b (< 2^33); a borrow below zero is a wrap by 2^64 = 2^32 - 1.
  std::uint64_t r = 0;
  const bool borrow = __builtin_sub_overflow(pos, a + b, &r);
  r -= kEpsilon & (0 - static_cast<std::uint64_t>(borrow));

  return FieldElement(r >= kModulus ? r - kModulus : r);
}

constexpr WideProduct wide_mul(FieldElement x, FieldElement y) {
  return WideProduct{static_cast<u128>(x.value()) * y.value()};
}

namespace detail {

// Karatsuba on operands of at most `bits` bits, recursing `depth` times.
constexpr u128 karatsuba(std::uint64_t x, std::uint64_t y, unsigned bits, unsigned depth) {
  if (depth == 0) return static_cast<u128>(x) * y;
  const unsigned half = bits / 2;
  const std::uint64_t mask = (std::uint64_t{1} << half) - 1;
  const std::uint64_t x1 = x >> half, x0 = x & mask;
  const std::uint64_t y1 = y >> half, y0 = y & mask;
  const u128 hi = karatsuba(x1, y1, bits - half, depth - 1);
  const u128 lo = karatsuba(x0, y0, half, depth - 1);
  // (x0 + x1) and (y0 + y1) carry one extra bit into the middle product.
  const u128 mid = karatsuba(x0 + x1, y0 + y1, bits - half + 1, depth - 1) - hi - lo;
  return (hi << (2 * half)) + (mid << half) + lo;
}

}  // namespace detail

/// Exact 128-bit product built from three half-width products per level, two levels deep.
constexpr WideProduct karatsuba_mul(FieldElement x, FieldElement y) {
  return WideProduct{detail::karatsuba(x.value(), y.value(), 64, 2)};
}

constexpr FieldElement fe_mul(FieldElement x, FieldElement y) { return reduce128(wide_mul(x, y)); }

constexpr FieldElement fe_pow(FieldElement x, std::uint64_t e) {
  FieldElement result = FieldElement::one();
  while (e != 0) {
    if (e & 1) result = fe_mul(result, x);
    x = fe_mul(x, x);
    e >>= 1;
  }
  return result;
}

inline FieldElement fe_inv(FieldElement x) {
  if (x.is_zero()) throw InvalidArgument("non-invertible zero");
  return fe_pow(x, kModulus - 2);
}

constexpr FieldElement operator+(FieldElement x, FieldElement y) { return fe_add(x, y); }
constexpr FieldElement operator-(FieldElement x, FieldElement y) { return fe_sub(x, y); }
constexpr FieldElement operator-(FieldElement x) { return fe_neg(x); }
constexpr FieldElement operator*(FieldElement x, FieldElement y) { return fe_mul(x, y); }
constexpr FieldElement& operator+=(FieldElement& x, FieldElement y) { return x = fe_add(x, y); }
constexpr FieldElement& operator-=(FieldElement& x, FieldElement y) { return x = fe_sub(x, y); }
constexpr FieldElement& operator*=(FieldElement& x, FieldElement y) { return x = fe_mul(x, y); }

/// Fixed generator of Z_q^*.
inline constexpr std::uint64_t kGenerator = 7;

/// Prime factors of q - 1 = 2^32 * 3 * 5 * 17 * 257 * 65537.
inline constexpr std::array<std::uint64_t, 6> kGroupOrderFactors = {2, 3, 5, 17, 257, 65537};

/// True when g^((q-1)/f) != 1 for every prime factor f of q - 1.
constexpr bool is_generator(FieldElement g) {
  for (std::uint64_t f : kGroupOrderFactors) {
    if (fe_pow(g, (kModulus - 1) / f) == FieldElement::one()) return false;
  }
  return true;
}

static_assert(is_generator(FieldElement(kGenerator)));

/// psi = g^((q-1)/(2N)), a primitive 2N-th root of unity (psi^N = -1).
inline FieldElement primitive_root_2n(std::uint64_t n) {
  if (n == 0 || !std::has_single_bit(n) || n > (std::uint64_t{1} << 31)) {
    throw InvalidArgument("unsupported transform size");
  }
  return fe_pow(FieldElement(kGenerator), (kModulus - 1) / (2 * n));
}

}  // namespace tfhe_proc
