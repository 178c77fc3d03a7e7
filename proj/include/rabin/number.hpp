#pragma once

#include <cmath>
#include <cstdint>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <type_traits>

#include <gmpxx.h>

namespace rabin {

using Rational = mpq_class;

/// Thrown when a numeric literal cannot be parsed.
class NumberFormatError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Arithmetic policy for the scalar types the library is instantiated with.
/// Exact types compare exactly; floating types carry a tolerance for
/// well-formedness checks only.
template <class Num>
struct NumTraits;

template <>
struct NumTraits<Rational> {
  static constexpr bool exact = true;

  static Rational zero() { return Rational(0); }
  static Rational one() { return Rational(1); }
  static Rational abs(const Rational& x) { return ::abs(x); }
  static double to_double(const Rational& x) { return x.get_d(); }
  static Rational from_double(double x) { return Rational(x); }
  static Rational from_rational(const Rational& x) { return x; }
  static Rational mass_tolerance() { return zero(); }

  static std::string to_string(const Rational& x) {
    Rational c = x;
    c.canonicalize();
    if (c.get_den() == 1) return c.get_num().get_str();
    return c.get_num().get_str() + "/" + c.get_den().get_str();
  }

  /// Accepts integers, decimals ("0.999", "-1.5e-3") and "p/q".
  static Rational parse(std::string_view text);
};

template <>
struct NumTraits<double> {
  static constexpr bool exact = false;

  static double zero() { return 0.0; }
  static double one() { return 1.0; }
  static double abs(double x) { return std::fabs(x); }
  static double to_double(double x) { return x; }
  static double from_double(double x) { return x; }
  static double from_rational(const Rational& x) { return x.get_d(); }
  static double mass_tolerance() { return 1e-9; }

  static std::string to_string(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
  }

  static double parse(std::string_view text) {
    return NumTraits<Rational>::parse(text).get_d();
  }
};

namespace detail {

inline mpz_class parse_integer(std::string_view digits, std::string_view whole) {
  if (digits.empty()) throw NumberFormatError("malformed number: '" + std::string(whole) + "'");
  for (char c : digits)
    if (c < '0' || c > '9') throw NumberFormatError("malformed number: '" + std::string(whole) + "'");
  return mpz_class(std::string(digits), 10);
}

inline mpz_class pow10(unsigned long e) {
  mpz_class r;
  mpz_ui_pow_ui(r.get_mpz_t(), 10, e);
  return r;
}

inline Rational parse_decimal(std::string_view s, std::string_view whole) {
  bool negative = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  long exponent = 0;
  if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
    std::string_view exp_part = s.substr(e + 1);
    bool exp_negative = false;
    if (!exp_part.empty() && (exp_part.front() == '-' || exp_part.front() == '+')) {
      exp_negative = exp_part.front() == '-';
      exp_part.remove_prefix(1);
    }
    mpz_class mag = parse_integer(exp_part, whole);
    if (!mag.fits_slong_p() || mag > 4096) throw NumberFormatError("exponent out of range: '" + std::string(whole) + "'");
    exponent = mag.get_si() * (exp_negative ? -1 : 1);
    s = s.substr(0, e);
  }
  std::string digits;
  if (auto dot = s.find('.'); dot != std::string_view::npos) {
    std::string_view int_part = s.substr(0, dot);
    std::string_view frac_part = s.substr(dot + 1);
    if (int_part.empty() && frac_part.empty()) throw NumberFormatError("malformed number: '" + std::string(whole) + "'");
    digits = std::string(int_part) + std::string(frac_part);
    exponent -= static_cast<long>(frac_part.size());
  } else {
    digits = std::string(s);
  }
  Rational r(parse_integer(digits, whole));
  if (exponent > 0) r *= Rational(pow10(static_cast<unsigned long>(exponent)));
  if (exponent < 0) r /= Rational(pow10(static_cast<unsigned long>(-exponent)));
  r.canonicalize();
  return negative ? Rational(-r) : r;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

}  // namespace detail

inline Rational NumTraits<Rational>::parse(std::string_view text) {
  std::string_view s = detail::trim(text);
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    Rational num = detail::parse_decimal(detail::trim(s.substr(0, slash)), text);
    Rational den = detail::parse_decimal(detail::trim(s.substr(slash + 1)), text);
    if (den == 0) throw NumberFormatError("zero denominator: '" + std::string(text) + "'");
    Rational r = num / den;
    r.canonicalize();
    return r;
  }
  return detail::parse_decimal(s, text);
}

template <class Num>
Num parse_number(std::string_view text) {
  return NumTraits<Num>::parse(text);
}

template <class Num>
std::string format_number(const Num& x) {
  return NumTraits<Num>::to_string(x);
}

/// Converts between the two supported scalar types.
template <class To, class From>
To convert_number(const From& x) {
  if constexpr (std::is_same_v<To, From>) {
    return x;
  } else if constexpr (std::is_same_v<From, Rational>) {
    return NumTraits<To>::from_rational(x);
  } else {
    return NumTraits<To>::from_double(NumTraits<From>::to_double(x));
  }
}

}  // namespace rabin
