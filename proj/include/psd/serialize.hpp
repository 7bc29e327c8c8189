#pragma once

// JSON encoding of scalars, points and measures. Exact scalars are written as
// strings ("1/4") so they survive a round trip; floats as JSON numbers.

#include "json.hpp"
#include "psd/measures.hpp"

#include <string>

namespace psd {

template <Scalar T>
nlohmann::json scalar_to_json(const T& v) {
  if constexpr (ScalarTraits<T>::exact) {
    return to_string(v);
  } else {
    return v;
  }
}

/// Accepts strings ("3/4", "0.25") and numbers. Non-integral JSON numbers go
/// through their shortest decimal form, so 0.1 reads as 1/10 in exact mode.
template <Scalar T>
T scalar_from_json(const nlohmann::json& j) {
  if (j.is_string()) return parse_scalar<T>(j.get<std::string>());
  if (j.is_number_integer()) return parse_scalar<T>(std::to_string(j.get<long long>()));
  if (j.is_number()) return from_decimal_double<T>(j.get<double>());
  throw Error(ErrorKind::parse_error, "expected a number or rational string, got " + j.dump());
}

template <Scalar T>
nlohmann::json point_to_json(const Point<T>& p) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& c : p) out.push_back(scalar_to_json(c));
  return out;
}

template <Scalar T>
nlohmann::json measure_to_json(const DiscreteMeasure<T>& m) {
  nlohmann::json out = nlohmann::json::array();
  for (std::size_t i = 0; i < m.size(); ++i) {
    out.push_back({{"point", point_to_json(m.points()[i])}, {"weight", scalar_to_json(m.weights()[i])}});
  }
  return out;
}

}  // namespace psd
