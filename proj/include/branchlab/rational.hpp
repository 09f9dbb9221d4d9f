#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>

namespace branchlab {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline Integer numerator_of(const Rational& q) { return boost::multiprecision::numerator(q); }
inline Integer denominator_of(const Rational& q) { return boost::multiprecision::denominator(q); }

// "p/q" (or "p" when the denominator is 1).
std::string to_string(const Rational& q);

// Accepts "p/q", "p" or a finite decimal like "0.125". Throws std::invalid_argument.
Rational parse_rational(const std::string& text);

// d^k as an exact integer.
Integer power(unsigned base, unsigned exponent);

}  // namespace branchlab
