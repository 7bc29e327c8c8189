#pragma once

// Finite partial orders and their upper sets.

#include "psd/errors.hpp"
#include "psd/measures.hpp"

#include <bit>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace psd {

inline constexpr std::size_t kOracleLimit = 20;

/// Increasing subset of an OrderRelation's ground set.
struct UpperSet {
  std::vector<bool> members;

  bool contains(std::size_t i) const { return members[i]; }
  std::size_t count() const { return static_cast<std::size_t>(std::count(members.begin(), members.end(), true)); }
  bool operator==(const UpperSet&) const = default;
};

/// Dense reflexive, transitive, antisymmetric relation over indexed points.
template <Scalar T>
class OrderRelation {
 public:
  /// Takes a matrix already known to be a partial order. Use product_order or
  /// relation_from_edges to build one from raw input.
  OrderRelation(std::vector<Point<T>> points, std::vector<std::uint8_t> leq,
                std::vector<std::string> labels = {})
      : points_(std::move(points)), leq_(std::move(leq)), labels_(std::move(labels)) {
    for (std::size_t i = 0; i < points_.size(); ++i) {
      if (!index_.emplace(points_[i], i).second) {
        throw Error(ErrorKind::cycle_detected, "ground point " + point_to_string(points_[i]) + " repeated");
      }
    }
  }

  std::size_t size() const { return points_.size(); }
  const std::vector<Point<T>>& points() const { return points_; }
  const Point<T>& point(std::size_t i) const { return points_[i]; }
  const std::vector<std::string>& labels() const { return labels_; }

  bool leq(std::size_t i, std::size_t j) const { return leq_[i * points_.size() + j] != 0; }

  std::optional<std::size_t> index_of(const Point<T>& p) const {
    auto it = index_.find(p);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  std::size_t require_index(const Point<T>& p) const {
    auto idx = index_of(p);
    if (!idx) throw Error(ErrorKind::point_not_in_relation, "point " + point_to_string(p));
    return *idx;
  }

  /// Sub-relation induced on the given ground indices (in the given order).
  OrderRelation restrict_to(const std::vector<std::size_t>& indices) const {
    const std::size_t n = indices.size();
    std::vector<Point<T>> pts;
    std::vector<std::string> lbls;
    std::vector<std::uint8_t> m(n * n, 0);
    for (std::size_t a = 0; a < n; ++a) {
      pts.push_back(points_[indices[a]]);
      if (!labels_.empty()) lbls.push_back(labels_[indices[a]]);
      for (std::size_t b = 0; b < n; ++b) m[a * n + b] = leq(indices[a], indices[b]) ? 1 : 0;
    }
    return OrderRelation(std::move(pts), std::move(m), std::move(lbls));
  }

  /// Pairs (i, j), i != j, with i below j. Feeding these to
  /// relation_from_edges reproduces the matrix.
  std::vector<std::pair<std::size_t, std::size_t>> edges() const {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t i = 0; i < size(); ++i)
      for (std::size_t j = 0; j < size(); ++j)
        if (i != j && leq(i, j)) out.emplace_back(i, j);
    return out;
  }

  bool operator==(const OrderRelation& o) const { return points_ == o.points_ && leq_ == o.leq_; }

 private:
  std::vector<Point<T>> points_;
  std::vector<std::uint8_t> leq_;
  std::vector<std::string> labels_;
  std::map<Point<T>, std::size_t> index_;
};

/// Coordinatewise order on the given points (sorted and de-duplicated).
template <Scalar T>
OrderRelation<T> product_order(std::vector<Point<T>> points) {
  for (const auto& p : points) {
    if (p.empty() || p.size() != points.front().size()) {
      throw Error(ErrorKind::dimension_mismatch, "product order needs points of equal dimension");
    }
  }
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  const std::size_t n = points.size();
  std::vector<std::uint8_t> m(n * n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      bool below = true;
      for (std::size_t k = 0; k < points[i].size() && below; ++k) below = points[i][k] <= points[j][k];
      m[i * n + j] = below ? 1 : 0;
    }
  }
  return OrderRelation<T>(std::move(points), std::move(m));
}

/// Reflexive-transitive closure of the edge list; throws CycleDetected if the
/// closure is not antisymmetric.
template <Scalar T>
OrderRelation<T> relation_from_edges(std::vector<Point<T>> points,
                                     const std::vector<std::pair<std::size_t, std::size_t>>& edges,
                                     std::vector<std::string> labels = {}) {
  const std::size_t n = points.size();
  const std::size_t words = (n + 63) / 64;
  std::vector<std::uint64_t> rows(n * words, 0);
  auto set = [&](std::size_t i, std::size_t j) { rows[i * words + j / 64] |= std::uint64_t{1} << (j % 64); };
  auto get = [&](std::size_t i, std::size_t j) { return (rows[i * words + j / 64] >> (j % 64)) & 1u; };
  for (std::size_t i = 0; i < n; ++i) set(i, i);
  for (auto [i, j] : edges) {
    if (i >= n || j >= n) {
      throw Error(ErrorKind::point_not_in_relation,
                  "edge (" + std::to_string(i) + ", " + std::to_string(j) + ") references a missing point");
    }
    set(i, j);
  }
  // Warshall over bit rows.
  for (std::size_t k = 0; k < n; ++k) {
    const std::uint64_t* row_k = &rows[k * words];
    for (std::size_t i = 0; i < n; ++i) {
      if (!get(i, k)) continue;
      std::uint64_t* row_i = &rows[i * words];
      for (std::size_t w = 0; w < words; ++w) row_i[w] |= row_k[w];
    }
  }
  std::vector<std::uint8_t> m(n * n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      m[i * n + j] = static_cast<std::uint8_t>(get(i, j));
      if (i < j && get(i, j) && get(j, i)) {
        throw Error(ErrorKind::cycle_detected,
                    "points " + std::to_string(i) + " and " + std::to_string(j) + " precede each other");
      }
    }
  }
  return OrderRelation<T>(std::move(points), std::move(m), std::move(labels));
}

template <Scalar T>
bool is_upper_set(const OrderRelation<T>& rel, const UpperSet& set) {
  if (set.members.size() != rel.size()) return false;
  for (std::size_t i = 0; i < rel.size(); ++i) {
    if (!set.members[i]) continue;
    for (std::size_t j = 0; j < rel.size(); ++j)
      if (rel.leq(i, j) && !set.members[j]) return false;
  }
  return true;
}

/// Smallest upper set containing every flagged point.
template <Scalar T>
UpperSet upward_closure(const OrderRelation<T>& rel, const std::vector<bool>& seeds) {
  UpperSet out{std::vector<bool>(rel.size(), false)};
  for (std::size_t i = 0; i < rel.size(); ++i) {
    if (!seeds[i]) continue;
    for (std::size_t j = 0; j < rel.size(); ++j)
      if (rel.leq(i, j)) out.members[j] = true;
  }
  return out;
}

/// Calls visit(mask) once for every upper set, bit i standing for ground
/// point i. Points are decided from the top of a linear extension down; a
/// point may join only when everything strictly above it already has, so
/// every branch ends in a distinct upper set and nothing is filtered.
template <Scalar T, class Visitor>
void for_each_upper_set_mask(const OrderRelation<T>& rel, Visitor&& visit,
                             std::size_t limit = kOracleLimit) {
  const std::size_t n = rel.size();
  if (n > limit || n > 63) {
    throw Error(ErrorKind::too_large_for_enumeration,
                std::to_string(n) + " ground points exceed the enumeration limit of " + std::to_string(limit));
  }
  // Linear extension: more predecessors means higher up.
  std::vector<std::size_t> order(n);
  std::vector<std::size_t> below_count(n, 0);
  std::vector<std::uint64_t> strictly_above(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    order[i] = i;
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      if (rel.leq(j, i)) ++below_count[i];
      if (rel.leq(i, j)) strictly_above[i] |= std::uint64_t{1} << j;
    }
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return below_count[a] > below_count[b]; });

  std::function<void(std::size_t, std::uint64_t)> recurse = [&](std::size_t depth, std::uint64_t mask) {
    if (depth == n) {
      visit(mask);
      return;
    }
    const std::size_t p = order[depth];
    recurse(depth + 1, mask);
    if ((strictly_above[p] & ~mask) == 0) recurse(depth + 1, mask | (std::uint64_t{1} << p));
  };
  recurse(0, 0);
}

template <Scalar T>
std::vector<UpperSet> enumerate_upper_sets(const OrderRelation<T>& rel, std::size_t limit = kOracleLimit) {
  std::vector<UpperSet> out;
  for_each_upper_set_mask(
      rel,
      [&](std::uint64_t mask) {
        UpperSet u{std::vector<bool>(rel.size(), false)};
        for (std::size_t i = 0; i < rel.size(); ++i) u.members[i] = (mask >> i) & 1u;
        out.push_back(std::move(u));
      },
      limit);
  return out;
}

/// Sorted union of two supports: the ground set for comparing two measures.
template <Scalar T>
std::vector<Point<T>> common_ground(const DiscreteMeasure<T>& mu, const DiscreteMeasure<T>& nu) {
  std::vector<Point<T>> out;
  std::set_union(mu.points().begin(), mu.points().end(), nu.points().begin(), nu.points().end(),
                 std::back_inserter(out));
  return out;
}

/// Mass of a measure on an upper set of rel. Atoms outside rel are an error.
template <Scalar T>
T measure_of(const DiscreteMeasure<T>& m, const OrderRelation<T>& rel, const UpperSet& set) {
  T total(0);
  for (std::size_t i = 0; i < m.size(); ++i)
    if (set.contains(rel.require_index(m.points()[i]))) total += m.weights()[i];
  return total;
}

}  // namespace psd
