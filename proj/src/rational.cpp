#include "cdc/rational.hpp"

#include <cctype>
#include <limits>
#include <stdexcept>

namespace cdc {

BigInt floor(const Rational& r) {
  BigInt num = numerator_of(r);
  BigInt den = denominator_of(r);
  BigInt q = num / den;  // truncates toward zero
  if (num < 0 && q * den != num) {
    --q;
  }
  return q;
}

BigInt ceil(const Rational& r) { return -floor(-r); }

bool is_integer(const Rational& r) { return denominator_of(r) == 1; }

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

// Boost reads a leading 0 as an octal prefix, so strip zeros first.
BigInt from_digits(std::string_view s) {
  while (s.size() > 1 && s.front() == '0') s.remove_prefix(1);
  return BigInt{std::string(s)};
}

BigInt parse_integer(std::string_view s, std::string_view whole) {
  bool negative = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  if (!all_digits(s)) {
    throw std::invalid_argument("not a number: '" + std::string(whole) + "'");
  }
  BigInt v = from_digits(s);
  return negative ? BigInt(-v) : v;
}

BigInt pow10(long e) {
  BigInt v = 1;
  for (long i = 0; i < e; ++i) v *= 10;
  return v;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (text.empty()) {
    throw std::invalid_argument("empty number");
  }

  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    BigInt num = parse_integer(text.substr(0, slash), text);
    BigInt den = parse_integer(text.substr(slash + 1), text);
    if (den == 0) {
      throw std::invalid_argument("zero denominator: '" + std::string(text) + "'");
    }
    if (den < 0) {
      num = -num;
      den = -den;
    }
    return Rational(num, den);
  }

  std::string_view mantissa = text;
  long exponent = 0;
  if (auto e = text.find_first_of("eE"); e != std::string_view::npos) {
    mantissa = text.substr(0, e);
    BigInt ev = parse_integer(text.substr(e + 1), text);
    if (ev > 4096 || ev < -4096) {
      throw std::invalid_argument("exponent out of range: '" + std::string(text) + "'");
    }
    exponent = ev.convert_to<long>();
  }

  bool negative = false;
  if (!mantissa.empty() && (mantissa.front() == '-' || mantissa.front() == '+')) {
    negative = mantissa.front() == '-';
    mantissa.remove_prefix(1);
  }
  std::string digits;
  long frac_digits = 0;
  if (auto dot = mantissa.find('.'); dot != std::string_view::npos) {
    std::string_view ip = mantissa.substr(0, dot);
    std::string_view fp = mantissa.substr(dot + 1);
    if ((!ip.empty() && !all_digits(ip)) || (!fp.empty() && !all_digits(fp)) || (ip.empty() && fp.empty())) {
      throw std::invalid_argument("not a number: '" + std::string(text) + "'");
    }
    digits = std::string(ip) + std::string(fp);
    frac_digits = static_cast<long>(fp.size());
  } else {
    if (!all_digits(mantissa)) {
      throw std::invalid_argument("not a number: '" + std::string(text) + "'");
    }
    digits = std::string(mantissa);
  }

  Rational value(digits.empty() ? BigInt(0) : from_digits(digits));
  long scale = exponent - frac_digits;
  if (scale > 0) {
    value *= Rational(pow10(scale));
  } else if (scale < 0) {
    value /= Rational(pow10(-scale));
  }
  return negative ? Rational(-value) : value;
}

std::string to_string(const Rational& r) {
  if (is_integer(r)) return numerator_of(r).str();
  return numerator_of(r).str() + "/" + denominator_of(r).str();
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

std::int64_t to_int64(const BigInt& v) {
  if (v > std::numeric_limits<std::int64_t>::max() || v < std::numeric_limits<std::int64_t>::min()) {
    throw std::overflow_error("integer does not fit in 64 bits: " + v.str());
  }
  return v.convert_to<std::int64_t>();
}

}  // namespace cdc
