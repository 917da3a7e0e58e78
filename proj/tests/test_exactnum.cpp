#include <random>

#include <gtest/gtest.h>

#include "hsl/exactnum.hpp"
#include "hsl/json_io.hpp"

using namespace hsl;

TEST(GaussInt, Conj) {
  EXPECT_EQ(gi_conj(GaussInt(0, 0)), GaussInt(0, 0));
  EXPECT_EQ(gi_conj(GaussInt(1, 1)), GaussInt(1, -1));
  EXPECT_EQ(gi_conj(GaussInt(-3, 7)), GaussInt(-3, -7));
}

TEST(GaussInt, Norm) {
  EXPECT_EQ(gi_norm(GaussInt(0, 0)), 0);
  EXPECT_EQ(gi_norm(GaussInt(1, 1)), 2);
  EXPECT_EQ(gi_norm(GaussInt(-3, 4)), 25);
}

TEST(GaussInt, CanonicalOrderIsLexicographic) {
  EXPECT_LT(GaussInt(-1, 5), GaussInt(0, -5));
  EXPECT_LT(GaussInt(0, -5), GaussInt(0, 1));
  EXPECT_EQ(GaussInt(2, 3) <=> GaussInt(2, 3), std::strong_ordering::equal);
}

TEST(GaussInt, PowAndUnits) {
  const GaussInt i(0, 1);
  EXPECT_EQ(pow(i, 4), GaussInt(1));
  EXPECT_EQ(pow(GaussInt(1, 1), 2), GaussInt(0, 2));
  EXPECT_EQ(pow(GaussInt(0), 0), GaussInt(1));
  for (unsigned k = 0; k < 8; ++k) EXPECT_EQ(times_unit(GaussInt(3, -2), k), GaussInt(3, -2) * pow(i, k));
}

TEST(GaussInt, BigValuesDoNotOverflow) {
  const GaussInt z(BigInt(1) << 70, BigInt(3));
  const GaussInt w = z * z * z * z;
  EXPECT_EQ(w.re, pow(BigInt(1) << 70, 4) - 6 * pow(BigInt(1) << 70, 2) * 9 + 81);
}

TEST(GaussInt, FixedWidthThrowsInsteadOfWrapping) {
  const GaussInt64 big(std::int64_t{1} << 40, 0);
  EXPECT_THROW(big * big, OverflowError);
  EXPECT_THROW(gauss_cast<std::int64_t>(GaussInt(BigInt(1) << 64, 0)), OverflowError);
  const GaussInt128 wide = gauss_cast<int128>(big) * gauss_cast<int128>(big);
  EXPECT_EQ(gauss_cast<BigInt>(wide), GaussInt(BigInt(1) << 80, 0));
}

TEST(GaussRat, Reduce) {
  const GaussRat a = gr_reduce(GaussInt(2, 4), 2);
  EXPECT_EQ(a.num(), GaussInt(1, 2));
  EXPECT_EQ(a.den(), 1);
  const GaussRat b = gr_reduce(GaussInt(3, 0), -6);
  EXPECT_EQ(b.num(), GaussInt(-1, 0));
  EXPECT_EQ(b.den(), 2);
  const GaussRat c = gr_reduce(GaussInt(0, 0), 5);
  EXPECT_EQ(c.num(), GaussInt(0, 0));
  EXPECT_EQ(c.den(), 1);
  EXPECT_THROW(gr_reduce(GaussInt(1, 1), 0), ZeroDenominator);
}

TEST(GaussRat, Division) {
  const GaussRat q = GaussRat(GaussInt(1)) / GaussRat(GaussInt(1, 1));
  EXPECT_EQ(q, GaussRat(GaussInt(1, -1), 2));
  EXPECT_EQ(q * GaussRat(GaussInt(1, 1)), GaussRat(GaussInt(1)));
  EXPECT_THROW(GaussRat(GaussInt(1)) / GaussRat(), ZeroDenominator);
  EXPECT_EQ(to_string(GaussRat(GaussInt(3, 1), 4)), "(3,1)/4");
}

TEST(Accumulator, SpillsPastInt128) {
  BigAccumulator acc;
  const int128 top = (int128(1) << 126);
  for (int k = 0; k < 8; ++k) acc.add(top);
  EXPECT_EQ(acc.value(), BigInt(8) * (BigInt(1) << 126));
  acc.add(-top);
  EXPECT_EQ(acc.value(), BigInt(7) * (BigInt(1) << 126));

  GaussAccumulator g;
  g.add(GaussInt128(top, -top));
  g.add(GaussInt128(top, -top));
  g.add(GaussInt(BigInt(1), BigInt(1)));
  EXPECT_EQ(g.value(), GaussInt((BigInt(1) << 127) + 1, -(BigInt(1) << 127) + 1));
}

TEST(Json, GaussIntAsDecimalPair) {
  const GaussInt z(BigInt("123456789012345678901234567890"), BigInt(-7));
  const Json j = to_json(z);
  EXPECT_EQ(j.dump(), R"(["123456789012345678901234567890","-7"])");
  EXPECT_EQ(gauss_from_json(j), z);
}

class ExactnumProperties : public ::testing::Test {
 protected:
  std::mt19937_64 rng{20240611};
  GaussInt random_gauss(std::int64_t bound) {
    std::uniform_int_distribution<std::int64_t> d(-bound, bound);
    return {BigInt(d(rng)), BigInt(d(rng))};
  }
};

TEST_F(ExactnumProperties, ConjIsInvolution) {
  for (int k = 0; k < 200; ++k) {
    const GaussInt z = random_gauss(1'000'000'000);
    EXPECT_EQ(gi_conj(gi_conj(z)), z);
  }
}

TEST_F(ExactnumProperties, NormIsMultiplicative) {
  for (int k = 0; k < 200; ++k) {
    const GaussInt z = random_gauss(1'000'000'000);
    const GaussInt w = random_gauss(1'000'000'000);
    EXPECT_EQ(gi_norm(z * w), gi_norm(z) * gi_norm(w));
  }
}

TEST_F(ExactnumProperties, RationalsAgreeWithIntegers) {
  for (int k = 0; k < 200; ++k) {
    const GaussInt z = random_gauss(100000);
    const GaussInt w = random_gauss(100000);
    EXPECT_EQ(GaussRat(z) + GaussRat(w), GaussRat(z + w));
    EXPECT_EQ(GaussRat(z) * GaussRat(w), GaussRat(z * w));
    EXPECT_EQ(conj(GaussRat(z)), GaussRat(gi_conj(z)));
    EXPECT_TRUE((GaussRat(z) + GaussRat(w)).is_integral());
  }
}

TEST_F(ExactnumProperties, FixedWidthMatchesBig) {
  for (int k = 0; k < 200; ++k) {
    const GaussInt z = random_gauss(1'000'000);
    const GaussInt w = random_gauss(1'000'000);
    const auto z64 = gauss_cast<std::int64_t>(z);
    const auto w64 = gauss_cast<std::int64_t>(w);
    EXPECT_EQ(gauss_cast<BigInt>(z64 * w64 - w64), z * w - w);
  }
}
