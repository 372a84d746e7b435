#include "fxp/rational.hpp"

#include <cctype>
#include <cstdio>

#include "fxp/errors.hpp"

namespace fxp {

namespace {

bool is_integer_literal(std::string_view s) {
  if (!s.empty() && (s.front() == '+' || s.front() == '-')) s.remove_prefix(1);
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

}  // namespace

Rat parse_rational(std::string_view text) {
  const auto slash = text.find('/');
  std::string_view num_text = text.substr(0, slash);
  std::string_view den_text =
      slash == std::string_view::npos ? std::string_view("1") : text.substr(slash + 1);
  if (!is_integer_literal(num_text) || !is_integer_literal(den_text)) {
    throw ParseError("not a rational literal: \"" + std::string(text) + "\"");
  }
  BigInt num{std::string(num_text)};
  BigInt den{std::string(den_text)};
  if (den == 0) {
    throw ParseError("zero denominator in rational literal: \"" + std::string(text) + "\"");
  }
  if (den < 0) {
    num = -num;
    den = -den;
  }
  return Rat(num, den);
}

std::string to_fraction(const Rat& value) {
  const BigInt den = denominator(value);
  if (den == 1) return numerator(value).str();
  return numerator(value).str() + "/" + den.str();
}

std::string to_decimal(const Rat& value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", value.convert_to<double>());
  return buf;
}

BigInt factorial(unsigned n) {
  BigInt result = 1;
  for (unsigned k = 2; k <= n; ++k) result *= k;
  return result;
}

}  // namespace fxp
