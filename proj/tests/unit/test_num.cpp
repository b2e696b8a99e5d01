#include "cat0/num.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace cat0;

TEST(Num, RationalArithmeticStaysExact)
{
    Num a = Num::ratio(1, 3);
    Num b = Num::ratio(1, 6);
    Num s = a + b;
    ASSERT_TRUE(s.rational());
    EXPECT_EQ(s.as_rational(), Rational(1, 2));
    EXPECT_EQ((a * b).as_rational(), Rational(1, 18));
    EXPECT_EQ((a / b).as_rational(), Rational(2));
}

TEST(Num, SqrtOfPerfectSquareIsRational)
{
    Num r = sqrt(Num::ratio(9, 4));
    ASSERT_TRUE(r.rational());
    EXPECT_EQ(r.as_rational(), Rational(3, 2));
}

TEST(Num, QuadraticFieldArithmetic)
{
    Num r = sqrt(Num(7));
    ASSERT_TRUE(r.exact());
    EXPECT_FALSE(r.rational());
    Num sq = r * r;
    ASSERT_TRUE(sq.rational());
    EXPECT_EQ(sq.as_rational(), Rational(7));
    // (3 + sqrt 7) / (3 - sqrt 7) = 8 + 3 sqrt 7
    Num q = (Num(3) + r) / (Num(3) - r);
    ASSERT_TRUE(q.exact());
    EXPECT_EQ(q.quad().a, Rational(8));
    EXPECT_EQ(q.quad().b, Rational(3));
    EXPECT_NEAR(q.value(), 8 + 3 * std::sqrt(7.0), 1e-12);
}

TEST(Num, ExactSignOfQuadratic)
{
    // 8 - 3 sqrt 7 = 0.0627... > 0; 8 - 3.03 sqrt 7 < 0.
    Num r = sqrt(Num(7));
    EXPECT_EQ((Num(8) - Num(3) * r).sign(), 1);
    EXPECT_EQ((Num(8) - Num(Rational(303, 100)) * r).sign(), -1);
    EXPECT_TRUE(Num(3) * r > Num(7));
    EXPECT_TRUE(Num(3) * r == r + r + r);
}

TEST(Num, MixedFieldsDegradeToDouble)
{
    Num x = sqrt(Num(2)) + sqrt(Num(3));
    EXPECT_FALSE(x.exact());
    EXPECT_NEAR(x.value(), std::sqrt(2.0) + std::sqrt(3.0), 1e-15);
}

TEST(Num, ExactZeroDivisionThrows) { EXPECT_THROW(Num(1) / Num(0), std::domain_error); }

TEST(Num, ParseForms)
{
    EXPECT_EQ(parse_rational("3/4"), Rational(3, 4));
    EXPECT_EQ(parse_rational("-12"), Rational(-12));
    EXPECT_EQ(parse_rational("7.25"), Rational(29, 4));
    EXPECT_EQ(parse_rational("1e-3"), Rational(1, 1000));
    EXPECT_THROW(parse_rational("1/0"), std::invalid_argument);
    Num f = Num::parse("0.1", false);
    EXPECT_FALSE(f.exact());
}

TEST(Num, ExactDoubleRoundTrips)
{
    for (double v : {0.0, 1.5, -3.25, 0.1, 1e-300, 12345.678}) {
        Num n = Num::exact_double(v);
        ASSERT_TRUE(n.rational());
        EXPECT_EQ(n.as_rational().convert_to<double>(), v);
    }
}

TEST(Num, FloorOfRationals)
{
    EXPECT_EQ(floor(Rational(7, 2)), 3);
    EXPECT_EQ(floor(Rational(-7, 2)), -4);
    EXPECT_EQ(floor(Rational(-4)), -4);
}
