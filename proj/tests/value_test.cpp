#include <gtest/gtest.h>

#include "qmlab/error.hpp"
#include "qmlab/value.hpp"

namespace qmlab {
namespace {

TEST(Rational, ParseAndFormat) {
  EXPECT_EQ(parse_rational("1/3"), Rational(1, 3));
  EXPECT_EQ(parse_rational("-2/4"), Rational(-1, 2));
  EXPECT_EQ(parse_rational("5"), Rational(5));
  EXPECT_EQ(to_string(Rational(0)), "0/1");
  EXPECT_EQ(to_string(Rational(-3, 6)), "-1/2");
  for (const char* bad : {"1/0", "", "1/", "a/2", "1/2x", "1.5"}) {
    try {
      parse_rational(bad);
      FAIL() << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::ParseError);
    }
  }
}

TEST(ExtendedValue, InfinityArithmetic) {
  const ExtendedValue inf = ExtendedValue::pos_inf();
  EXPECT_EQ(inf + ExtendedValue(Rational(5)), inf);
  EXPECT_EQ(-inf, ExtendedValue::neg_inf());
  EXPECT_THROW(inf + ExtendedValue::neg_inf(), Error);
  EXPECT_EQ(Rational(0) * inf, ExtendedValue(0));
  EXPECT_EQ(Rational(-2) * inf, ExtendedValue::neg_inf());
  EXPECT_LT(ExtendedValue::neg_inf(), ExtendedValue(Rational(-100)));
  EXPECT_LT(ExtendedValue(Rational(1, 3)), ExtendedValue(Rational(1, 2)));
  EXPECT_EQ(to_string(inf), "inf");
  EXPECT_EQ(to_string(ExtendedValue(Rational(1, 2))), "1/2");
  EXPECT_EQ(parse_extended("-inf"), ExtendedValue::neg_inf());
  EXPECT_THROW(inf.finite(), Error);
}

}  // namespace
}  // namespace qmlab
