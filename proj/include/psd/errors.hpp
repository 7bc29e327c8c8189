#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace psd {

enum class ErrorKind {
  negative_weight,
  length_mismatch,
  empty_support,
  lambda_out_of_range,
  dimension_error,
  dimension_mismatch,
  cycle_detected,
  too_large_for_enumeration,
  unnormalized_input,
  point_not_in_relation,
  stale_certificate,
  certificate_failure,
  empty_grid,
  invalid_grid,
  invalid_domain,
  support_outside_domain,
  precondition_not_satisfied,
  epsilon_out_of_range,
  empty_sample,
  invalid_level,
  invalid_resample_count,
  invalid_cdf,
  parse_error,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Every contract violation raised by the library carries a machine-readable kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace psd
