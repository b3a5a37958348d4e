#include "qmlab/value.hpp"

#include <charconv>

#include "qmlab/error.hpp"

namespace qmlab {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::Precondition: return "PRECONDITION";
    case ErrorCode::CoverViolation: return "COVER_VIOLATION";
    case ErrorCode::AssignmentDepthExceeded: return "ASSIGNMENT_DEPTH_EXCEEDED";
    case ErrorCode::DyadicPoint: return "DYADIC_POINT";
    case ErrorCode::InfConflict: return "INF_CONFLICT";
    case ErrorCode::InfiniteTotal: return "INFINITE_TOTAL";
    case ErrorCode::NegativeValue: return "NEGATIVE_VALUE";
    case ErrorCode::SearchBudgetExceeded: return "SEARCH_BUDGET_EXCEEDED";
    case ErrorCode::VariationUnstable: return "VARIATION_UNSTABLE";
    case ErrorCode::ParseError: return "PARSE_ERROR";
    case ErrorCode::UnknownFunction: return "UNKNOWN_FUNCTION";
  }
  return "UNKNOWN";
}

namespace {

std::int64_t parse_int(std::string_view text, std::string_view whole) {
  std::int64_t out = 0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (!text.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last || first == last) {
    throw Error(ErrorCode::ParseError, "malformed rational '" + std::string(whole) + "'");
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  text = trim(text);
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) return Rational(parse_int(text, text));
  const std::int64_t num = parse_int(trim(text.substr(0, slash)), text);
  const std::int64_t den = parse_int(trim(text.substr(slash + 1)), text);
  if (den == 0) {
    throw Error(ErrorCode::ParseError, "zero denominator in '" + std::string(text) + "'");
  }
  return Rational(num, den);
}

std::string to_string(const Rational& r) {
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

Rational abs(const Rational& r) { return r.numerator() < 0 ? -r : r; }

const Rational& ExtendedValue::finite() const {
  if (kind_ != Kind::Finite) throw Error(ErrorCode::Precondition, "value is infinite");
  return value_;
}

ExtendedValue ExtendedValue::operator-() const {
  switch (kind_) {
    case Kind::PosInf: return neg_inf();
    case Kind::NegInf: return pos_inf();
    case Kind::Finite: break;
  }
  return ExtendedValue(-value_);
}

ExtendedValue& ExtendedValue::operator+=(const ExtendedValue& rhs) {
  if (kind_ == Kind::Finite && rhs.kind_ == Kind::Finite) {
    value_ += rhs.value_;
    return *this;
  }
  if (kind_ != Kind::Finite && rhs.kind_ != Kind::Finite && kind_ != rhs.kind_) {
    throw Error(ErrorCode::InfConflict, "inf + (-inf)");
  }
  if (kind_ == Kind::Finite) {
    kind_ = rhs.kind_;
    value_ = 0;
  }
  return *this;
}

ExtendedValue operator*(const Rational& c, const ExtendedValue& v) {
  if (v.is_finite()) return ExtendedValue(c * v.value_);
  if (c.numerator() == 0) return ExtendedValue(0);
  return (c.numerator() > 0) == v.is_pos_inf() ? ExtendedValue::pos_inf() : ExtendedValue::neg_inf();
}

std::strong_ordering operator<=>(const ExtendedValue& a, const ExtendedValue& b) {
  auto rank = [](ExtendedValue::Kind k) {
    return k == ExtendedValue::Kind::NegInf ? 0 : k == ExtendedValue::Kind::Finite ? 1 : 2;
  };
  if (a.kind_ != b.kind_) return rank(a.kind_) <=> rank(b.kind_);
  if (a.kind_ != ExtendedValue::Kind::Finite) return std::strong_ordering::equal;
  if (a.value_ < b.value_) return std::strong_ordering::less;
  if (b.value_ < a.value_) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

ExtendedValue abs(const ExtendedValue& v) { return v < ExtendedValue(0) ? -v : v; }

std::string to_string(const ExtendedValue& v) {
  if (v.is_pos_inf()) return "inf";
  if (v.is_neg_inf()) return "-inf";
  return to_string(v.finite());
}

ExtendedValue parse_extended(std::string_view text) {
  text = trim(text);
  if (text == "inf" || text == "+inf") return ExtendedValue::pos_inf();
  if (text == "-inf") return ExtendedValue::neg_inf();
  return ExtendedValue(parse_rational(text));
}

}  // namespace qmlab
