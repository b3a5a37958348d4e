#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

#include <boost/rational.hpp>

namespace qmlab {

/// Compare against Rational values, not bare integers: mixed == recurses under C++20 rewriting.
using Rational = boost::rational<std::int64_t>;

/// Parses "p/q" or "p". A zero denominator or trailing garbage is a ParseError.
Rational parse_rational(std::string_view text);

/// Always prints the denominator: 1/2, 3/1, 0/1.
std::string to_string(const Rational& r);

Rational abs(const Rational& r);

/// An exact rational or one of the two infinities.
///
/// Arithmetic never produces inf + (-inf); that combination throws InfConflict.
/// Multiplying an infinity by zero yields zero (the measure-theory convention).
class ExtendedValue {
 public:
  enum class Kind : std::uint8_t { Finite, PosInf, NegInf };

  ExtendedValue() = default;
  ExtendedValue(Rational r) : value_(r) {}  // NOLINT(google-explicit-constructor)
  ExtendedValue(std::int64_t n) : value_(n) {}  // NOLINT(google-explicit-constructor)

  static ExtendedValue pos_inf() { return ExtendedValue(Kind::PosInf); }
  static ExtendedValue neg_inf() { return ExtendedValue(Kind::NegInf); }

  Kind kind() const { return kind_; }
  bool is_finite() const { return kind_ == Kind::Finite; }
  bool is_pos_inf() const { return kind_ == Kind::PosInf; }
  bool is_neg_inf() const { return kind_ == Kind::NegInf; }

  /// Throws Precondition for an infinite value.
  const Rational& finite() const;

  ExtendedValue operator-() const;
  ExtendedValue& operator+=(const ExtendedValue& rhs);
  ExtendedValue& operator-=(const ExtendedValue& rhs) { return *this += -rhs; }

  friend ExtendedValue operator+(ExtendedValue lhs, const ExtendedValue& rhs) { return lhs += rhs; }
  friend ExtendedValue operator-(ExtendedValue lhs, const ExtendedValue& rhs) { return lhs -= rhs; }
  friend ExtendedValue operator*(const Rational& c, const ExtendedValue& v);

  friend bool operator==(const ExtendedValue& a, const ExtendedValue& b) {
    return a.kind_ == b.kind_ && (a.kind_ != Kind::Finite || a.value_ == b.value_);
  }
  friend std::strong_ordering operator<=>(const ExtendedValue& a, const ExtendedValue& b);

 private:
  explicit ExtendedValue(Kind k) : kind_(k) {}

  Kind kind_ = Kind::Finite;
  Rational value_{0};
};

ExtendedValue abs(const ExtendedValue& v);

/// `p/q`, `inf` or `-inf`.
std::string to_string(const ExtendedValue& v);
ExtendedValue parse_extended(std::string_view text);

}  // namespace qmlab
