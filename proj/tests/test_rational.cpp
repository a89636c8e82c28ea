#include "afmpi/rational.hpp"

#include <gtest/gtest.h>

#include <limits>
#include <stdexcept>

using afmpi::Rational;

TEST(Rational, NormalisesSignAndLowestTerms) {
    const Rational r{6, -8};
    EXPECT_EQ(r.num(), -3);
    EXPECT_EQ(r.den(), 4);
    EXPECT_EQ(Rational(0, 5).den(), 1);
    EXPECT_THROW(Rational(1, 0), std::domain_error);
}

TEST(Rational, ArithmeticIsExact) {
    EXPECT_EQ(Rational(1, 8) + Rational(1, 4), Rational(3, 8));
    EXPECT_EQ(Rational(1, 3) - Rational(1, 2), Rational(-1, 6));
    EXPECT_EQ(Rational(2, 3) * Rational(9, 4), Rational(3, 2));
    EXPECT_EQ(Rational(1, 4) / Rational(3, 4), Rational(1, 3));
    EXPECT_THROW(Rational(1) / Rational(0), std::domain_error);

    Rational sum;
    for (int i = 0; i < 120; ++i) {
        sum += Rational(1, 120);
    }
    EXPECT_EQ(sum, Rational(1));
}

TEST(Rational, OrderingUsesCrossMultiplication) {
    EXPECT_LT(Rational(3, 10), Rational(3, 8));
    EXPECT_GE(Rational(36, 120), Rational(3, 10));
    EXPECT_FALSE(Rational(35, 120) >= Rational(3, 10));
    const Rational big{std::numeric_limits<std::int64_t>::max() - 1, std::numeric_limits<std::int64_t>::max()};
    EXPECT_LT(big, Rational(1));
}

TEST(Rational, OverflowIsReportedNotWrapped) {
    const Rational huge{std::numeric_limits<std::int64_t>::max()};
    EXPECT_THROW(huge + huge, std::overflow_error);
}

TEST(Rational, ParseForms) {
    EXPECT_EQ(Rational::parse("3/10"), Rational(3, 10));
    EXPECT_EQ(Rational::parse(" 0.3 "), Rational(3, 10));
    EXPECT_EQ(Rational::parse("1"), Rational(1));
    EXPECT_EQ(Rational::parse("-0.25"), Rational(-1, 4));
    EXPECT_EQ(Rational::parse(".5"), Rational(1, 2));
    EXPECT_THROW(Rational::parse("abc"), std::invalid_argument);
    EXPECT_THROW(Rational::parse("0.3x"), std::invalid_argument);
    EXPECT_THROW(Rational::parse(""), std::invalid_argument);
}

TEST(Rational, StrForm) {
    EXPECT_EQ(Rational(3, 10).str(), "3/10");
    EXPECT_EQ(Rational(4, 2).str(), "2");
    EXPECT_EQ(Rational(-1, 3).str(), "-1/3");
}

TEST(Rational, DecimalRoundsHalfAwayFromZero) {
    EXPECT_EQ(afmpi::to_decimal(Rational(1, 3), 6), "0.333333");
    EXPECT_EQ(afmpi::to_decimal(Rational(2, 3), 6), "0.666667");
    EXPECT_EQ(afmpi::to_decimal(Rational(1, 8), 2), "0.13");
    EXPECT_EQ(afmpi::to_decimal(Rational(-1, 8), 2), "-0.13");
    EXPECT_EQ(afmpi::to_decimal(Rational(1, 2000), 3), "0.001");
    EXPECT_EQ(afmpi::to_decimal(Rational(-1, 3000), 3), "0.000");
    EXPECT_EQ(afmpi::to_decimal(Rational(1), 0), "1");
    // 0.0065 must not be rounded through a double
    EXPECT_EQ(afmpi::to_decimal(Rational(65, 10000), 3), "0.007");
}
