#pragma once

// Exact j-invariants. Values are kept in lowest terms with a positive
// denominator, which is what boost's cpp_rational guarantees.

#include <boost/multiprecision/cpp_int.hpp>

#include <cctype>
#include <string>
#include <string_view>

#include "modcurve/error.hpp"

namespace modcurve {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

// Parses "num", "num/den" or "-num/den". Throws ParseError.
inline Rational parse_rational(std::string_view text) {
  std::size_t pos = 0;
  while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  auto read_int = [&](bool allow_sign) {
    const std::size_t start = pos;
    if (allow_sign && pos < text.size() && (text[pos] == '-' || text[pos] == '+')) ++pos;
    const std::size_t digits = pos;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
    if (pos == digits) throw ParseError("expected digits", pos);
    return BigInt(std::string(text.substr(start, pos - start)));
  };
  BigInt num = read_int(true);
  BigInt den = 1;
  if (pos < text.size() && text[pos] == '/') {
    ++pos;
    const std::size_t den_pos = pos;
    den = read_int(false);
    if (den == 0) throw ParseError("zero denominator", den_pos);
  }
  while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  if (pos != text.size()) throw ParseError("trailing characters in rational", pos);
  return Rational(num, den);
}

// "num/den", always with an explicit denominator.
inline std::string format_rational(const Rational& q) {
  return numerator(q).str() + "/" + denominator(q).str();
}

// "num" when integral, otherwise "num/den".
inline std::string display_rational(const Rational& q) {
  if (denominator(q) == 1) return numerator(q).str();
  return format_rational(q);
}

}  // namespace modcurve
