#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>
#include <string_view>

namespace cdc {

using BigInt = boost::multiprecision::number<boost::multiprecision::cpp_int_backend<>, boost::multiprecision::et_off>;

// Always stored in lowest terms with a positive denominator.
using Rational = boost::multiprecision::number<boost::multiprecision::cpp_rational_backend, boost::multiprecision::et_off>;

inline Rational make_rational(std::int64_t num, std::int64_t den = 1) {
  if (den < 0) return Rational(-BigInt(num), -BigInt(den));
  return Rational(BigInt(num), BigInt(den));
}

inline BigInt numerator_of(const Rational& r) { return boost::multiprecision::numerator(r); }
inline BigInt denominator_of(const Rational& r) { return boost::multiprecision::denominator(r); }

BigInt floor(const Rational& r);
BigInt ceil(const Rational& r);
bool is_integer(const Rational& r);

/// Parses "p/q", an integer, or a finite decimal ("0.125", "-3.5e2") into an exact rational.
/// Throws std::invalid_argument on malformed input or a zero denominator.
Rational parse_rational(std::string_view text);

/// "p/q", or "p" when the denominator is 1.
std::string to_string(const Rational& r);

double to_double(const Rational& r);

std::int64_t to_int64(const BigInt& v);

}  // namespace cdc
