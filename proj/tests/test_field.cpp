#include <gtest/gtest.h>

#include "tfhe_proc/field.hpp"
#include "tfhe_proc/random.hpp"
#include "tfhe_proc/selftest.hpp"

using namespace tfhe_proc;

namespace {

constexpr std::uint64_t q = kModulus;
constexpr int kRandomPairs = 1'000'000;

FieldElement fe(std::uint64_t v) { return FieldElement(v); }

}  // namespace

TEST(FieldAdd, Examples) {
  EXPECT_EQ(fe_add(fe(0), fe(0)).value(), 0u);
  EXPECT_EQ(fe_add(fe(q - 1), fe(1)).value(), 0u);
  EXPECT_EQ(fe_add(fe(q - 1), fe(q - 1)).value(), q - 2);
}

TEST(FieldSub, Examples) {
  EXPECT_EQ(fe_sub(fe(5), fe(5)).value(), 0u);
  EXPECT_EQ(fe_sub(fe(0), fe(1)).value(), q - 1);
  EXPECT_EQ(fe_sub(fe(0), fe(q - 1)).value(), 1u);
}

TEST(FieldAddSub, RandomAgainstWideOracle) {
  CounterRng rng(11, 1);
  for (int i = 0; i < kRandomPairs; ++i) {
    const FieldElement x = rng.uniform_field(), y = rng.uniform_field();
    const u128 sum = static_cast<u128>(x.value()) + y.value();
    ASSERT_EQ(fe_add(x, y).value(), static_cast<std::uint64_t>(sum % q));
    const u128 diff = static_cast<u128>(x.value()) + q - y.value();
    ASSERT_EQ(fe_sub(x, y).value(), static_cast<std::uint64_t>(diff % q));
  }
}

TEST(Reduce128, PowerIdentities) {
  EXPECT_EQ(reduce128(WideProduct{u128{1} << 64}).value(), (std::uint64_t{1} << 32) - 1);
  EXPECT_EQ(reduce128(WideProduct{u128{1} << 96}).value(), q - 1);
}

TEST(Reduce128, EdgeSetAndRandom) {
  const auto r = selftest::check_reduction(kRandomPairs, 7);
  EXPECT_TRUE(r.ok) << r.detail;
  EXPECT_EQ(r.cases, kRandomPairs + selftest::reduction_edge_set().size());
}

TEST(Reduce128, CarryHeavyPatterns) {
  // Limb patterns that exercise both fold-back paths.
  for (std::uint64_t a : {0ull, 1ull, 0xFFFF'FFFFull}) {
    for (std::uint64_t b : {0ull, 1ull, 0xFFFF'FFFFull}) {
      for (std::uint64_t c : {0ull, 1ull, 0xFFFF'FFFEull, 0xFFFF'FFFFull}) {
        for (std::uint64_t d : {0ull, 1ull, 0xFFFF'FFFFull}) {
          const u128 v = (u128{a} << 96) | (u128{b} << 64) | (u128{c} << 32) | d;
          ASSERT_EQ(reduce128(WideProduct{v}).value(), static_cast<std::uint64_t>(v % q));
        }
      }
    }
  }
}

TEST(FieldMul, Examples) {
  CounterRng rng(3, 3);
  const FieldElement y = rng.uniform_field();
  EXPECT_EQ(fe_mul(FieldElement::one(), y), y);
  EXPECT_EQ(fe_mul(fe(std::uint64_t{1} << 32), fe(std::uint64_t{1} << 32)).value(), (std::uint64_t{1} << 32) - 1);
}

TEST(FieldMul, RandomAgainstWideOracle) {
  CounterRng rng(12, 2);
  for (int i = 0; i < kRandomPairs; ++i) {
    const FieldElement x = rng.uniform_field(), y = rng.uniform_field();
    ASSERT_EQ(fe_mul(x, y).value(), static_cast<std::uint64_t>(static_cast<u128>(x.value()) * y.value() % q));
  }
}

TEST(Karatsuba, Examples) {
  EXPECT_EQ(karatsuba_mul(fe(0), fe(12345)).value, 0u);
  const FieldElement x = fe((std::uint64_t{1} << 32) + 1);
  EXPECT_EQ(karatsuba_mul(x, x).value, (u128{1} << 64) + (u128{1} << 33) + 1);
  EXPECT_EQ(karatsuba_mul(fe(q - 1), fe(q - 1)).value, static_cast<u128>(q - 1) * (q - 1));
}

TEST(Karatsuba, RandomAgainstDirectProduct) {
  CounterRng rng(13, 4);
  for (int i = 0; i < kRandomPairs; ++i) {
    const FieldElement x = rng.uniform_field(), y = rng.uniform_field();
    ASSERT_EQ(karatsuba_mul(x, y), wide_mul(x, y));
  }
}

TEST(FieldPow, Examples) {
  CounterRng rng(4, 5);
  const FieldElement x = rng.uniform_field();
  EXPECT_EQ(fe_pow(x, 0), FieldElement::one());
  EXPECT_EQ(fe_pow(fe(7), q - 1), FieldElement::one());
  EXPECT_EQ(fe_pow(x, 2), fe_mul(x, x));
}

TEST(FieldInv, Examples) {
  EXPECT_EQ(fe_inv(fe(1)).value(), 1u);
  EXPECT_EQ(fe_inv(fe(q - 1)).value(), q - 1);
  EXPECT_THROW(fe_inv(fe(0)), InvalidArgument);
  CounterRng rng(5, 6);
  for (int i = 0; i < 1000; ++i) {
    FieldElement x = rng.uniform_field();
    if (x.is_zero()) x = fe(1);
    ASSERT_EQ(fe_mul(x, fe_inv(x)), FieldElement::one());
  }
}

TEST(PrimitiveRoot, Generator) {
  // Every prime factor of q - 1 must leave 7^((q-1)/f) != 1.
  u128 product = 1;
  for (std::uint64_t f : kGroupOrderFactors) {
    EXPECT_NE(fe_pow(fe(kGenerator), (q - 1) / f), FieldElement::one()) << "f = " << f;
  }
  product = (u128{1} << 32) * 3 * 5 * 17 * 257 * 65537;
  EXPECT_EQ(product, u128{q - 1});
}

TEST(PrimitiveRoot, DefiningProperty) {
  EXPECT_EQ(primitive_root_2n(1).value(), q - 1);
  for (std::uint64_t n = 1; n <= (std::uint64_t{1} << 31); n <<= 1) {
    const FieldElement psi = primitive_root_2n(n);
    ASSERT_EQ(fe_pow(psi, n).value(), q - 1) << "N = " << n;
  }
}

TEST(FieldElement, SignedEmbedding) {
  EXPECT_EQ(FieldElement::from_i64(-1).value(), q - 1);
  EXPECT_EQ(FieldElement::from_i64(5).value(), 5u);
  EXPECT_EQ(FieldElement::from_i64(-1).centered(), -1);
  EXPECT_EQ(FieldElement::from_u64(q).value(), 0u);
  EXPECT_EQ(FieldElement::from_i64(INT64_MIN).value(), static_cast<std::uint64_t>((u128{q} - (u128{1} << 63)) % q));
}
