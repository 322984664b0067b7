#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>
#include <string_view>

namespace towerlab {

// Arbitrary-precision exact rational. Every measure, defect and ratio in the
// library is one of these; nothing is ever rounded.
using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

inline Rational make_rational(std::int64_t num, std::int64_t den = 1) {
  return Rational(BigInt(num), BigInt(den));
}

// Accepts "3", "-3/4", "0.125", "1e-2" is not accepted (no exponents).
Rational parse_rational(std::string_view text);

// "p/q" in lowest terms, or "p" when q == 1.
std::string to_string(const Rational& r);

inline Rational abs(const Rational& r) { return r < 0 ? Rational(-r) : r; }

}  // namespace towerlab
