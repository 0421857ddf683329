#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <string_view>

#include <boost/multiprecision/gmp.hpp>

#include "lap/error.hpp"

namespace lap {

using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                               boost::multiprecision::et_off>;
using BigInt = boost::multiprecision::number<boost::multiprecision::gmp_int,
                                             boost::multiprecision::et_off>;

enum class Arithmetic { Exact, Float };

// Parses "3", "-1/2", "0.25", "1.5e-3" or "3/4" exactly.
Rational parse_rational(std::string_view text);
// Exact value of a finite double, through its shortest round-trip decimal.
Rational rational_from_double(double value);
std::string format_rational(const Rational& value);
std::string format_double(double value);

template <class T>
struct Scalar;

template <>
struct Scalar<Rational> {
  static constexpr bool exact = true;
  static constexpr const char* name = "exact";

  static bool eq(const Rational& a, const Rational& b) { return a == b; }
  static bool le(const Rational& a, const Rational& b) { return a <= b; }
  static bool lt(const Rational& a, const Rational& b) { return a < b; }
  static Rational parse(std::string_view s) { return parse_rational(s); }
  static Rational from_double(double v) { return rational_from_double(v); }
  static std::string str(const Rational& v) { return format_rational(v); }
  static double to_double(const Rational& v) { return v.convert_to<double>(); }
  static bool is_finite(const Rational&) { return true; }
};

// Float mode compares with a 1e-9 tolerance scaled by magnitude.
template <>
struct Scalar<double> {
  static constexpr bool exact = false;
  static constexpr const char* name = "float";
  static constexpr double tolerance = 1e-9;

  static double slack(double a, double b) {
    return tolerance * std::max({1.0, std::abs(a), std::abs(b)});
  }
  static bool eq(double a, double b) { return std::abs(a - b) <= slack(a, b); }
  static bool le(double a, double b) { return a <= b + slack(a, b); }
  static bool lt(double a, double b) { return a < b - slack(a, b); }
  static double parse(std::string_view s) { return parse_rational(s).convert_to<double>(); }
  static double from_double(double v) { return v; }
  static std::string str(double v) { return format_double(v); }
  static double to_double(double v) { return v; }
  static bool is_finite(double v) { return std::isfinite(v); }
};

template <class T>
T pow_int(T base, unsigned exponent) {
  T result(1);
  while (exponent > 0) {
    if (exponent & 1u) result *= base;
    base *= base;
    exponent >>= 1;
  }
  return result;
}

template <class To, class From>
To convert_scalar(const From& v) {
  if constexpr (std::is_same_v<To, From>) {
    return v;
  } else if constexpr (std::is_same_v<To, double>) {
    return Scalar<From>::to_double(v);
  } else {
    return Scalar<To>::from_double(Scalar<From>::to_double(v));
  }
}

}  // namespace lap
