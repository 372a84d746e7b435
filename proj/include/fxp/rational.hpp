#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <string>
#include <string_view>

namespace fxp {

using BigInt = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

// Parses "p", "p/q" or "-p/q" (arbitrary precision). Throws ParseError on
// anything else, including q = 0.
Rat parse_rational(std::string_view text);

// Canonical fraction rendering: "p/q" with q > 0, or plain "p" when q = 1.
std::string to_fraction(const Rat& value);

// 6-significant-digit decimal, for human-readable output only.
std::string to_decimal(const Rat& value);

inline Rat rat_abs(const Rat& value) { return value < 0 ? Rat(-value) : value; }

BigInt factorial(unsigned n);

}  // namespace fxp
