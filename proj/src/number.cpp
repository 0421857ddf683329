#include "lap/number.hpp"

#include <charconv>
#include <cctype>

namespace lap {
namespace {

Rational parse_decimal(std::string_view s, std::string_view whole) {
  if (s.empty()) throw InvalidInput("empty number in '" + std::string(whole) + "'");
  bool negative = false;
  std::size_t i = 0;
  if (s[i] == '+' || s[i] == '-') {
    negative = s[i] == '-';
    ++i;
  }
  std::string digits;
  long exponent = 0;
  bool seen_digit = false, seen_point = false;
  for (; i < s.size(); ++i) {
    char c = s[i];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      digits.push_back(c);
      seen_digit = true;
      if (seen_point) --exponent;
    } else if (c == '.' && !seen_point) {
      seen_point = true;
    } else {
      break;
    }
  }
  if (!seen_digit) throw InvalidInput("not a number: '" + std::string(whole) + "'");
  if (i < s.size()) {
    if (s[i] != 'e' && s[i] != 'E')
      throw InvalidInput("not a number: '" + std::string(whole) + "'");
    ++i;
    long e = 0;
    std::string_view rest = s.substr(i);
    if (!rest.empty() && rest.front() == '+') rest.remove_prefix(1);
    auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), e);
    if (ec != std::errc() || ptr != rest.data() + rest.size() || rest.empty())
      throw InvalidInput("bad exponent in '" + std::string(whole) + "'");
    if (e > 4000 || e < -4000) throw InvalidInput("exponent out of range in '" + std::string(whole) + "'");
    exponent += e;
  }
  // gmp reads a leading zero as octal
  auto nz = digits.find_first_not_of('0');
  digits = nz == std::string::npos ? "0" : digits.substr(nz);
  BigInt mantissa(digits);
  Rational value(mantissa);
  if (exponent > 0) value *= Rational(pow_int(BigInt(10), static_cast<unsigned>(exponent)));
  if (exponent < 0) value /= Rational(pow_int(BigInt(10), static_cast<unsigned>(-exponent)));
  return negative ? Rational(-value) : value;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  auto slash = text.find('/');
  if (slash == std::string_view::npos) return parse_decimal(text, text);
  Rational num = parse_decimal(text.substr(0, slash), text);
  Rational den = parse_decimal(text.substr(slash + 1), text);
  if (den == 0) throw InvalidInput("zero denominator in '" + std::string(text) + "'");
  return num / den;
}

Rational rational_from_double(double value) {
  if (!std::isfinite(value)) throw InvalidInput("non-finite number");
  return parse_rational(format_double(value));
}

std::string format_rational(const Rational& value) {
  if (denominator(value) == 1) return numerator(value).str();
  return numerator(value).str() + "/" + denominator(value).str();
}

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc()) return std::to_string(value);
  return std::string(buf, ptr);
}

}  // namespace lap
