#include "psd/errors.hpp"
#include "psd/scalar.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <string>

namespace psd {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::negative_weight: return "NegativeWeight";
    case ErrorKind::length_mismatch: return "LengthMismatch";
    case ErrorKind::empty_support: return "EmptySupport";
    case ErrorKind::lambda_out_of_range: return "LambdaOutOfRange";
    case ErrorKind::dimension_error: return "DimensionError";
    case ErrorKind::dimension_mismatch: return "DimensionMismatch";
    case ErrorKind::cycle_detected: return "CycleDetected";
    case ErrorKind::too_large_for_enumeration: return "TooLargeForEnumeration";
    case ErrorKind::unnormalized_input: return "UnnormalizedInput";
    case ErrorKind::point_not_in_relation: return "PointNotInRelation";
    case ErrorKind::stale_certificate: return "StaleCertificate";
    case ErrorKind::certificate_failure: return "CertificateFailure";
    case ErrorKind::empty_grid: return "EmptyGrid";
    case ErrorKind::invalid_grid: return "InvalidGrid";
    case ErrorKind::invalid_domain: return "InvalidDomain";
    case ErrorKind::support_outside_domain: return "SupportOutsideDomain";
    case ErrorKind::precondition_not_satisfied: return "PreconditionNotSatisfied";
    case ErrorKind::epsilon_out_of_range: return "EpsilonOutOfRange";
    case ErrorKind::empty_sample: return "EmptySample";
    case ErrorKind::invalid_level: return "InvalidLevel";
    case ErrorKind::invalid_resample_count: return "InvalidResampleCount";
    case ErrorKind::invalid_cdf: return "InvalidCdf";
    case ErrorKind::parse_error: return "ParseError";
  }
  return "Unknown";
}

std::string to_string(const Rational& v) { return v.str(); }

std::string to_string(double v) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc{}) {
    return std::to_string(v);
  }
  return std::string(buf.data(), end);
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

[[noreturn]] void bad_number(std::string_view text) {
  throw Error(ErrorKind::parse_error, "not a number: '" + std::string(text) + "'");
}

// [+-]digits[.digits][(e|E)[+-]digits], exact.
Rational parse_decimal(std::string_view text) {
  std::string_view s = trim(text);
  if (s.empty()) bad_number(text);
  bool negative = false;
  if (s.front() == '+' || s.front() == '-') {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  std::string digits;
  long exponent = 0;
  bool seen_digit = false;
  bool seen_point = false;
  std::size_t i = 0;
  for (; i < s.size(); ++i) {
    char c = s[i];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      digits.push_back(c);
      seen_digit = true;
      if (seen_point) --exponent;
    } else if (c == '.' && !seen_point) {
      seen_point = true;
    } else {
      break;
    }
  }
  if (!seen_digit) bad_number(text);
  if (i < s.size()) {
    if (s[i] != 'e' && s[i] != 'E') bad_number(text);
    std::string_view exp_text = s.substr(i + 1);
    if (!exp_text.empty() && exp_text.front() == '+') exp_text.remove_prefix(1);
    long e = 0;
    auto [ptr, ec] = std::from_chars(exp_text.data(), exp_text.data() + exp_text.size(), e);
    if (ec != std::errc{} || ptr != exp_text.data() + exp_text.size()) bad_number(text);
    exponent += e;
  }
  if (exponent > 4000 || exponent < -4000) bad_number(text);

  // a leading zero would make gmp read the digits as octal
  const auto first = digits.find_first_not_of('0');
  const BigInt numerator(first == std::string::npos ? std::string("0") : digits.substr(first));
  BigInt scale = boost::multiprecision::pow(BigInt(10), static_cast<unsigned>(exponent < 0 ? -exponent : exponent));
  Rational value = exponent >= 0 ? Rational(numerator * scale) : Rational(numerator, scale);
  return negative ? Rational(-value) : value;
}

}  // namespace

template <>
Rational parse_scalar<Rational>(std::string_view text) {
  std::string_view s = trim(text);
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    Rational num = parse_decimal(s.substr(0, slash));
    Rational den = parse_decimal(s.substr(slash + 1));
    if (den == 0) bad_number(text);
    return num / den;
  }
  return parse_decimal(s);
}

template <>
double parse_scalar<double>(std::string_view text) {
  std::string_view s = trim(text);
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    double num = parse_scalar<double>(s.substr(0, slash));
    double den = parse_scalar<double>(s.substr(slash + 1));
    if (den == 0.0) bad_number(text);
    return num / den;
  }
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) bad_number(text);
  return value;
}

}  // namespace psd
