#include "branchlab/rational.hpp"

#include <stdexcept>

namespace branchlab {

std::string to_string(const Rational& q) {
  const Integer den = denominator_of(q);
  if (den == 1) return numerator_of(q).str();
  return numerator_of(q).str() + "/" + den.str();
}

namespace {

Integer parse_integer(const std::string& text) {
  if (text.empty()) throw std::invalid_argument("empty integer");
  std::size_t start = (text[0] == '-' || text[0] == '+') ? 1 : 0;
  if (start == text.size()) throw std::invalid_argument("bad integer '" + text + "'");
  for (std::size_t i = start; i < text.size(); ++i) {
    if (text[i] < '0' || text[i] > '9') throw std::invalid_argument("bad integer '" + text + "'");
  }
  Integer value(text.substr(start));
  return text[0] == '-' ? Integer(-value) : value;
}

}  // namespace

Rational parse_rational(const std::string& text) {
  if (auto slash = text.find('/'); slash != std::string::npos) {
    Integer num = parse_integer(text.substr(0, slash));
    Integer den = parse_integer(text.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("zero denominator in '" + text + "'");
    return Rational(num, den);
  }
  if (auto dot = text.find('.'); dot != std::string::npos) {
    std::string whole = text.substr(0, dot);
    std::string frac = text.substr(dot + 1);
    if (whole.empty() || whole == "-" || whole == "+") whole += "0";
    if (frac.empty()) return Rational(parse_integer(whole));
    if (frac[0] == '-' || frac[0] == '+') throw std::invalid_argument("bad decimal '" + text + "'");
    bool negative = whole[0] == '-';
    Integer scale = power(10, static_cast<unsigned>(frac.size()));
    Integer w = parse_integer(whole);
    if (w < 0) w = -w;
    Rational q(w * scale + parse_integer(frac), scale);
    return negative ? Rational(-q) : q;
  }
  return Rational(parse_integer(text));
}

Integer power(unsigned base, unsigned exponent) {
  Integer result = 1;
  for (unsigned i = 0; i < exponent; ++i) result *= base;
  return result;
}

}  // namespace branchlab
