#include "towerlab/rational.hpp"

#include "towerlab/errors.hpp"

#include <cctype>

namespace towerlab {

Rational parse_rational(std::string_view text) {
  auto fail = [&] { return InvalidInput("malformed rational: '" + std::string(text) + "'"); };
  if (text.empty()) throw fail();
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    Rational num = parse_rational(text.substr(0, slash));
    Rational den = parse_rational(text.substr(slash + 1));
    if (den == 0) throw InvalidInput("zero denominator in '" + std::string(text) + "'");
    return num / den;
  }
  bool negative = false;
  std::size_t i = 0;
  if (text[0] == '-' || text[0] == '+') {
    negative = text[0] == '-';
    ++i;
  }
  BigInt num = 0;
  BigInt den = 1;
  bool seen_digit = false;
  bool after_point = false;
  for (; i < text.size(); ++i) {
    char c = text[i];
    if (c == '.') {
      if (after_point) throw fail();
      after_point = true;
      continue;
    }
    if (!std::isdigit(static_cast<unsigned char>(c))) throw fail();
    seen_digit = true;
    num = num * 10 + (c - '0');
    if (after_point) den *= 10;
  }
  if (!seen_digit) throw fail();
  Rational r(num, den);
  return negative ? Rational(-r) : r;
}

std::string to_string(const Rational& r) {
  const BigInt& num = boost::multiprecision::numerator(r);
  const BigInt& den = boost::multiprecision::denominator(r);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

}  // namespace towerlab
