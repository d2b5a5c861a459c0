#include "spectral_sdp/rational.hpp"

#include <cstdint>
#include <limits>

#include <gtest/gtest.h>

#include "spectral_sdp/errors.hpp"

namespace spectral_sdp {
namespace {

TEST(Rational, NormalisesSignAndGcd) {
  const Rational r(6, -4);
  EXPECT_EQ(r.num(), -3);
  EXPECT_EQ(r.den(), 2);
  EXPECT_EQ(Rational(0, 5), Rational(0));
  EXPECT_THROW(Rational(1, 0), InvalidInput);
}

TEST(Rational, ParsesExactStrings) {
  EXPECT_EQ(Rational::parse("3/2"), Rational(3, 2));
  EXPECT_EQ(Rational::parse("-1/3"), Rational(-1, 3));
  EXPECT_EQ(Rational::parse("7"), Rational(7));
  EXPECT_EQ(Rational::parse("10/4").to_string(), "5/2");
  EXPECT_EQ(Rational(4).to_string(), "4/1");
}

TEST(Rational, RejectsFloatsAndGarbage) {
  for (const char* bad : {"1.5", "1e3", "", "/2", "3/", "a/b", "1/0", "1//2", " 1/2"}) {
    EXPECT_THROW(Rational::parse(bad), InvalidInput) << bad;
  }
}

TEST(Rational, Arithmetic) {
  const Rational a(1, 3);
  const Rational b(3, 2);
  EXPECT_EQ(a + b, Rational(11, 6));
  EXPECT_EQ(a - b, Rational(-7, 6));
  EXPECT_EQ(a * b, Rational(1, 2));
  EXPECT_EQ(a / b, Rational(2, 9));
  EXPECT_LT(a, b);
  EXPECT_GT(Rational(-1, 2), Rational(-2, 3));
  EXPECT_EQ(Rational(-7, 2).floor(), -4);
  EXPECT_EQ(Rational(7, 2).floor(), 3);
  EXPECT_THROW(a / Rational(0), InvalidInput);
}

TEST(Rational, LcmOfRates) {
  EXPECT_EQ(rational_lcm(Rational(1), Rational(3, 2)), Rational(3));
  EXPECT_EQ(rational_lcm(Rational(2), Rational(3)), Rational(6));
  EXPECT_EQ(rational_lcm(Rational(1, 2), Rational(1, 3)), Rational(1));
  EXPECT_EQ(rational_lcm(Rational(5, 6), Rational(5, 6)), Rational(5, 6));
}

TEST(Rational, OverflowIsACapacityError) {
  const std::int64_t big = std::numeric_limits<std::int64_t>::max() / 2;
  EXPECT_THROW(checked_mul(big, 3), CapacityError);
  EXPECT_THROW(checked_add(big * 2, big), CapacityError);
  EXPECT_THROW(Rational(big, 1) * Rational(3), CapacityError);
  EXPECT_THROW(checked_lcm(999999937LL * 999999929LL, 1000000007LL), CapacityError);
  EXPECT_EQ(checked_gcd(12, -18), 6);
}

}  // namespace
}  // namespace spectral_sdp
