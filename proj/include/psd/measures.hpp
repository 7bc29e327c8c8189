#pragma once

// Finite measures, mixtures and one-dimensional step CDFs.

#include "psd/errors.hpp"
#include "psd/scalar.hpp"

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace psd {

/// A support point: a vector of coordinates (d >= 1). Points of a finite poset
/// given by labels are represented by their one-coordinate index.
template <Scalar T>
using Point = std::vector<T>;

template <Scalar T>
std::string point_to_string(const Point<T>& p) {
  std::string out = "(";
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) out += ", ";
    out += to_string(p[i]);
  }
  return out + ")";
}

/// Finitely supported measure with positive weights on lexicographically
/// sorted, pairwise distinct points. Immutable after construction.
template <Scalar T>
class DiscreteMeasure {
 public:
  DiscreteMeasure() = default;

  const std::vector<Point<T>>& points() const { return points_; }
  const std::vector<T>& weights() const { return weights_; }
  const T& total_mass() const { return total_; }
  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  std::size_t dimension() const { return points_.empty() ? 0 : points_.front().size(); }

  bool is_probability() const { return approx_equal(total_, T(1)); }

  bool operator==(const DiscreteMeasure& o) const { return points_ == o.points_ && weights_ == o.weights_; }

  /// Weight at p, zero when p is not in the support.
  T mass_at(const Point<T>& p) const {
    auto it = std::lower_bound(points_.begin(), points_.end(), p);
    if (it == points_.end() || *it != p) return T(0);
    return weights_[static_cast<std::size_t>(it - points_.begin())];
  }

  /// Merges duplicates, drops zero weights and sorts. Allows the zero measure.
  static DiscreteMeasure canonical(std::vector<Point<T>> points, std::vector<T> weights) {
    if (points.size() != weights.size()) {
      throw Error(ErrorKind::length_mismatch, std::to_string(points.size()) + " points but " +
                                                  std::to_string(weights.size()) + " weights");
    }
    for (std::size_t i = 0; i < weights.size(); ++i) {
      if (weights[i] < 0) {
        throw Error(ErrorKind::negative_weight,
                    "weight " + to_string(weights[i]) + " at point " + point_to_string(points[i]));
      }
    }
    for (const auto& p : points) {
      if (p.empty()) throw Error(ErrorKind::dimension_error, "support point with no coordinates");
      if (p.size() != points.front().size()) {
        throw Error(ErrorKind::dimension_mismatch, "support points of different dimension");
      }
    }
    std::vector<std::size_t> order(points.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return points[a] < points[b]; });

    DiscreteMeasure m;
    for (std::size_t idx : order) {
      if (!m.points_.empty() && m.points_.back() == points[idx]) {
        m.weights_.back() += weights[idx];
      } else {
        m.points_.push_back(std::move(points[idx]));
        m.weights_.push_back(weights[idx]);
      }
    }
    std::size_t kept = 0;
    for (std::size_t i = 0; i < m.points_.size(); ++i) {
      if (m.weights_[i] > 0) {
        if (kept != i) {
          m.points_[kept] = std::move(m.points_[i]);
          m.weights_[kept] = m.weights_[i];
        }
        ++kept;
      }
    }
    m.points_.resize(kept);
    m.weights_.resize(kept);
    m.total_ = std::accumulate(m.weights_.begin(), m.weights_.end(), T(0));
    return m;
  }

 private:
  std::vector<Point<T>> points_;
  std::vector<T> weights_;
  T total_{0};
};

template <Scalar T>
DiscreteMeasure<T> make_discrete(std::vector<Point<T>> points, std::vector<T> weights) {
  auto m = DiscreteMeasure<T>::canonical(std::move(points), std::move(weights));
  if (m.empty()) throw Error(ErrorKind::empty_support, "all weights are zero");
  return m;
}

/// One-dimensional convenience overload.
template <Scalar T>
DiscreteMeasure<T> make_discrete_1d(const std::vector<T>& xs, std::vector<T> weights) {
  std::vector<Point<T>> points;
  points.reserve(xs.size());
  for (const auto& x : xs) points.push_back(Point<T>{x});
  return make_discrete(std::move(points), std::move(weights));
}

template <Scalar T>
DiscreteMeasure<T> dirac(Point<T> p) {
  return make_discrete<T>({std::move(p)}, {T(1)});
}

template <Scalar T>
DiscreteMeasure<T> scaled(const DiscreteMeasure<T>& m, const T& factor) {
  std::vector<T> w = m.weights();
  for (auto& x : w) x *= factor;
  return DiscreteMeasure<T>::canonical(m.points(), std::move(w));
}

/// Rescales a nonzero measure to total mass one.
template <Scalar T>
DiscreteMeasure<T> normalized(const DiscreteMeasure<T>& m) {
  if (m.empty()) throw Error(ErrorKind::empty_support, "cannot normalize the zero measure");
  return scaled(m, T(T(1) / m.total_mass()));
}

template <Scalar T>
void require_probability(const DiscreteMeasure<T>& m, const char* what) {
  if (m.empty() || !m.is_probability()) {
    throw Error(ErrorKind::unnormalized_input,
                std::string(what) + " has total mass " + to_string(m.total_mass()) + ", expected 1");
  }
}

/// lambda * a + (1 - lambda) * b for probability measures a and b.
template <Scalar T>
DiscreteMeasure<T> mixture(const T& lambda, const DiscreteMeasure<T>& a, const DiscreteMeasure<T>& b) {
  if (lambda < 0 || lambda > 1) {
    throw Error(ErrorKind::lambda_out_of_range, "lambda = " + to_string(lambda));
  }
  require_probability(a, "first mixture component");
  require_probability(b, "second mixture component");
  std::vector<Point<T>> points = a.points();
  points.insert(points.end(), b.points().begin(), b.points().end());
  std::vector<T> weights;
  weights.reserve(points.size());
  for (const auto& w : a.weights()) weights.push_back(lambda * w);
  const T rest = T(1) - lambda;
  for (const auto& w : b.weights()) weights.push_back(rest * w);
  return DiscreteMeasure<T>::canonical(std::move(points), std::move(weights));
}

/// Right-continuous step CDF: value cumulative[i] on [jumps[i], jumps[i+1]).
template <Scalar T>
class StepCDF {
 public:
  StepCDF(std::vector<T> jumps, std::vector<T> cumulative)
      : jumps_(std::move(jumps)), values_(std::move(cumulative)) {
    if (jumps_.size() != values_.size()) {
      throw Error(ErrorKind::length_mismatch, "jump locations and cumulative values differ in length");
    }
    if (jumps_.empty()) throw Error(ErrorKind::invalid_cdf, "a CDF needs at least one jump");
    for (std::size_t i = 0; i < jumps_.size(); ++i) {
      if (i > 0 && !(jumps_[i - 1] < jumps_[i])) {
        throw Error(ErrorKind::invalid_cdf, "jump locations must be strictly increasing");
      }
      if (values_[i] < 0 || values_[i] > 1 || (i > 0 && values_[i] < values_[i - 1])) {
        throw Error(ErrorKind::invalid_cdf, "cumulative values must be nondecreasing in [0, 1]");
      }
    }
    if (!approx_equal(values_.back(), T(1))) {
      throw Error(ErrorKind::invalid_cdf, "last cumulative value is " + to_string(values_.back()));
    }
  }

  const std::vector<T>& jumps() const { return jumps_; }
  const std::vector<T>& cumulative() const { return values_; }

  T operator()(const T& x) const {
    auto it = std::upper_bound(jumps_.begin(), jumps_.end(), x);
    if (it == jumps_.begin()) return T(0);
    return values_[static_cast<std::size_t>(it - jumps_.begin()) - 1];
  }

  T left_limit(const T& x) const {
    auto it = std::lower_bound(jumps_.begin(), jumps_.end(), x);
    if (it == jumps_.begin()) return T(0);
    return values_[static_cast<std::size_t>(it - jumps_.begin()) - 1];
  }

  bool operator==(const StepCDF&) const = default;

 private:
  std::vector<T> jumps_;
  std::vector<T> values_;
};

template <Scalar T>
T cdf_eval(const StepCDF<T>& F, const T& x) {
  return F(x);
}

template <Scalar T>
T cdf_left_limit(const StepCDF<T>& F, const T& x) {
  return F.left_limit(x);
}

template <Scalar T>
StepCDF<T> step_cdf_from(const DiscreteMeasure<T>& m) {
  if (m.dimension() != 1) {
    throw Error(ErrorKind::dimension_error,
                "step CDFs need one-dimensional points, got d = " + std::to_string(m.dimension()));
  }
  require_probability(m, "measure");
  std::vector<T> jumps;
  std::vector<T> cumulative;
  jumps.reserve(m.size());
  cumulative.reserve(m.size());
  T running(0);
  for (std::size_t i = 0; i < m.size(); ++i) {
    running += m.weights()[i];
    jumps.push_back(m.points()[i][0]);
    cumulative.push_back(running);
  }
  // Float sums can land a hair off 1.
  if constexpr (!ScalarTraits<T>::exact) cumulative.back() = T(1);
  return StepCDF<T>(std::move(jumps), std::move(cumulative));
}

/// Inverse of step_cdf_from: jump sizes become atoms.
template <Scalar T>
DiscreteMeasure<T> measure_from_cdf(const StepCDF<T>& F) {
  std::vector<Point<T>> points;
  std::vector<T> weights;
  T previous(0);
  for (std::size_t i = 0; i < F.jumps().size(); ++i) {
    points.push_back(Point<T>{F.jumps()[i]});
    weights.push_back(F.cumulative()[i] - previous);
    previous = F.cumulative()[i];
  }
  return DiscreteMeasure<T>::canonical(std::move(points), std::move(weights));
}

/// Sorted union of the jump locations of F and G.
template <Scalar T>
std::vector<T> merged_jumps(const StepCDF<T>& F, const StepCDF<T>& G) {
  std::vector<T> out;
  out.reserve(F.jumps().size() + G.jumps().size());
  std::set_union(F.jumps().begin(), F.jumps().end(), G.jumps().begin(), G.jumps().end(),
                 std::back_inserter(out));
  return out;
}

}  // namespace psd
