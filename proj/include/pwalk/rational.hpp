#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cctype>
#include <optional>
#include <string>
#include <string_view>

namespace pwalk {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline double to_double(const Rational& r) { return r.convert_to<double>(); }
inline double to_double(double v) { return v; }

inline std::string to_string(const Rational& r) {
  using boost::multiprecision::denominator;
  using boost::multiprecision::numerator;
  if (denominator(r) == 1) return numerator(r).str();
  return numerator(r).str() + "/" + denominator(r).str();
}

namespace detail {

inline std::optional<BigInt> parse_integer(std::string_view s) {
  if (s.empty()) return std::nullopt;
  bool neg = false;
  if (s.front() == '+' || s.front() == '-') {
    neg = s.front() == '-';
    s.remove_prefix(1);
  }
  if (s.empty()) return std::nullopt;
  BigInt v = 0;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
    v = v * 10 + (c - '0');
  }
  return neg ? BigInt(-v) : v;
}

}  // namespace detail

/// Exact value of a decimal ("0.3", "-2.5e-3") or fraction ("1/4") literal.
inline std::optional<Rational> parse_exact(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  if (s.empty()) return std::nullopt;

  if (const auto slash = s.find('/'); slash != std::string_view::npos) {
    auto num = parse_exact(s.substr(0, slash));
    auto den = parse_exact(s.substr(slash + 1));
    if (!num || !den || *den == 0) return std::nullopt;
    return *num / *den;
  }

  std::string_view mantissa = s;
  long long exponent = 0;
  if (const auto e = s.find_first_of("eE"); e != std::string_view::npos) {
    mantissa = s.substr(0, e);
    const auto exp = detail::parse_integer(s.substr(e + 1));
    if (!exp || abs(*exp) > 4000) return std::nullopt;
    exponent = exp->convert_to<long long>();
  }

  bool neg = false;
  if (!mantissa.empty() && (mantissa.front() == '+' || mantissa.front() == '-')) {
    neg = mantissa.front() == '-';
    mantissa.remove_prefix(1);
  }
  std::string digits;
  bool seen_dot = false;
  bool seen_digit = false;
  for (char c : mantissa) {
    if (c == '.') {
      if (seen_dot) return std::nullopt;
      seen_dot = true;
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      digits.push_back(c);
      seen_digit = true;
      if (seen_dot) --exponent;
    } else {
      return std::nullopt;
    }
  }
  if (!seen_digit) return std::nullopt;

  Rational value = *detail::parse_integer(digits);
  const BigInt scale = boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(exponent < 0 ? -exponent : exponent));
  value = exponent < 0 ? Rational(value / scale) : Rational(value * scale);
  return neg ? Rational(-value) : value;
}

}  // namespace pwalk
