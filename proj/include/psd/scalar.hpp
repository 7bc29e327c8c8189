#pragma once

// Scalar types for the two arithmetic modes.
//
// Every algorithm in the library is a template over the scalar T. T = Rational
// gives exact results (tolerance 0); T = double gives floating-point results
// compared with an absolute tolerance of 1e-12.

#include <boost/multiprecision/gmp.hpp>

#include <cmath>
#include <string>
#include <string_view>

namespace psd {

using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                               boost::multiprecision::et_off>;
using BigInt = boost::multiprecision::number<boost::multiprecision::gmp_int,
                                             boost::multiprecision::et_off>;

enum class Arithmetic { exact_rational, floating };

struct ArithmeticMode {
  Arithmetic mode = Arithmetic::exact_rational;
  double tolerance = 0.0;

  static ArithmeticMode exact() { return {Arithmetic::exact_rational, 0.0}; }
  static ArithmeticMode floating(double tol = 1e-12) { return {Arithmetic::floating, tol}; }
  bool is_exact() const { return mode == Arithmetic::exact_rational; }
  std::string name() const { return is_exact() ? "exact-rational" : "float"; }
};

template <class T>
struct ScalarTraits;

template <>
struct ScalarTraits<Rational> {
  static constexpr bool exact = true;
  static constexpr double tolerance = 0.0;
  static ArithmeticMode mode() { return ArithmeticMode::exact(); }
};

template <>
struct ScalarTraits<double> {
  static constexpr bool exact = false;
  static constexpr double tolerance = 1e-12;
  static ArithmeticMode mode() { return ArithmeticMode::floating(tolerance); }
};

template <class T>
concept Scalar = requires { ScalarTraits<T>::exact; };

template <Scalar T>
bool approx_equal(const T& a, const T& b) {
  if constexpr (ScalarTraits<T>::exact) {
    return a == b;
  } else {
    return std::abs(a - b) <= ScalarTraits<T>::tolerance;
  }
}

/// a <= b up to the mode tolerance.
template <Scalar T>
bool approx_leq(const T& a, const T& b) {
  if constexpr (ScalarTraits<T>::exact) {
    return a <= b;
  } else {
    return a <= b + ScalarTraits<T>::tolerance;
  }
}

template <Scalar T>
bool approx_zero(const T& a) {
  return approx_equal(a, T(0));
}

inline double to_double(const Rational& v) { return v.convert_to<double>(); }
inline double to_double(double v) { return v; }

/// Exact binary value of d when T is Rational.
template <Scalar T>
T from_double(double d) {
  return T(d);
}

std::string to_string(const Rational& v);
std::string to_string(double v);

/// Parses "p/q", integers, decimals and scientific notation. Decimal text is
/// converted exactly in rational mode ("0.1" becomes 1/10).
template <Scalar T>
T parse_scalar(std::string_view text);

template <>
Rational parse_scalar<Rational>(std::string_view text);
template <>
double parse_scalar<double>(std::string_view text);

/// Converts a double that came from decimal text (e.g. a JSON number) back
/// through its shortest round-trip representation, so 0.1 maps to 1/10.
template <Scalar T>
T from_decimal_double(double d) {
  if constexpr (ScalarTraits<T>::exact) {
    return parse_scalar<Rational>(to_string(d));
  } else {
    return d;
  }
}

}  // namespace psd
