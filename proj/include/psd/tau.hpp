#pragma once

// tau(mu, nu): the largest probability, over all couplings (X, Y) of mu and
// nu, that X lies below Y.
//
// Primal side: a bipartite max-flow. Source arcs carry the weights of mu,
// sink arcs the weights of nu, and every ordered pair (x, y), x below y, gets
// an arc whose capacity exceeds the total mass. The flow value is tau and the
// flow itself is the ordered part of an optimal coupling.
//
// Dual side: tau = 1 - max over upper sets U of (mu(U) - nu(U)). The maximum
// of  int h dmu - int h dnu  over increasing h with sup h - inf h <= 1 is
// attained at the indicator of an upper set: shifting h so that inf h = 0,
//   h = int_0^1 1{h > t} dt,
// and every level set {h > t} is an upper set, so the objective is an average
// of upper-set gaps and cannot exceed the best one. The min cut yields such a
// set: with R the mu-atoms reachable from the source in the residual network,
// U = up(R) has gap >= 1 - flow, and weak duality gives the reverse.
//
// Every certificate is checked before it is returned.

#include "psd/errors.hpp"
#include "psd/max_flow.hpp"
#include "psd/measures.hpp"
#include "psd/partial_order.hpp"

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace psd {

template <Scalar T>
struct CouplingEntry {
  std::size_t mu_index;
  std::size_t nu_index;
  T weight;
  bool ordered;
};

/// Sparse joint weights over (atom of mu, atom of nu), sorted by index pair.
template <Scalar T>
struct Coupling {
  std::vector<CouplingEntry<T>> entries;

  std::vector<T> row_sums(std::size_t rows) const {
    std::vector<T> out(rows, T(0));
    for (const auto& e : entries) out.at(e.mu_index) += e.weight;
    return out;
  }

  std::vector<T> col_sums(std::size_t cols) const {
    std::vector<T> out(cols, T(0));
    for (const auto& e : entries) out.at(e.nu_index) += e.weight;
    return out;
  }

  T ordered_mass() const {
    T total(0);
    for (const auto& e : entries)
      if (e.ordered) total += e.weight;
    return total;
  }
};

template <Scalar T>
struct TauResult {
  T tau_value{0};
  Coupling<T> coupling;
  /// Upper set over the ground points of the relation used (for tau_1d, the
  /// merged support in increasing order).
  UpperSet dual_set;
  std::vector<Point<T>> dual_points;
  T dual_gap_value{0};
  T ordered_mass{0};
  /// tau_1d only: the dual set is [threshold, inf) on the merged support.
  std::optional<T> dual_threshold;
  /// Set when the min-cut certificate failed verification and the upper-set
  /// oracle supplied the dual instead.
  bool dual_from_oracle = false;
};

namespace detail {

template <Scalar T>
void northwest_complete(std::vector<T> rows, std::vector<T> cols, std::vector<CouplingEntry<T>>& entries) {
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < rows.size() && j < cols.size()) {
    if (approx_zero(rows[i]) || rows[i] < 0) {
      ++i;
      continue;
    }
    if (approx_zero(cols[j]) || cols[j] < 0) {
      ++j;
      continue;
    }
    T amount = rows[i] < cols[j] ? rows[i] : cols[j];
    entries.push_back({i, j, amount, false});
    rows[i] -= amount;
    cols[j] -= amount;
  }
}

template <Scalar T>
void finalize_coupling(Coupling<T>& c) {
  std::sort(c.entries.begin(), c.entries.end(), [](const auto& a, const auto& b) {
    return std::pair(a.mu_index, a.nu_index) < std::pair(b.mu_index, b.nu_index);
  });
  // Completion never lands on an ordered pair at optimum; merge defensively
  // anyway so each index pair appears once.
  std::vector<CouplingEntry<T>> merged;
  for (auto& e : c.entries) {
    if (!merged.empty() && merged.back().mu_index == e.mu_index && merged.back().nu_index == e.nu_index) {
      merged.back().weight += e.weight;
    } else {
      merged.push_back(e);
    }
  }
  c.entries = std::move(merged);
}

inline BigInt lcm_of_denominators(const std::vector<Rational>& values) {
  BigInt l(1);
  for (const auto& v : values) l = boost::multiprecision::lcm(l, BigInt(denominator(v)));
  return l;
}

template <Scalar T>
std::vector<std::size_t> ground_indices(const DiscreteMeasure<T>& m, const OrderRelation<T>& rel) {
  std::vector<std::size_t> out;
  out.reserve(m.size());
  for (const auto& p : m.points()) out.push_back(rel.require_index(p));
  return out;
}

template <Scalar T>
T upper_set_gap(const DiscreteMeasure<T>& mu, const DiscreteMeasure<T>& nu, const OrderRelation<T>& rel,
                const UpperSet& u) {
  return measure_of(mu, rel, u) - measure_of(nu, rel, u);
}

template <Scalar T>
std::vector<Point<T>> members_of(const OrderRelation<T>& rel, const UpperSet& u) {
  std::vector<Point<T>> out;
  for (std::size_t i = 0; i < rel.size(); ++i)
    if (u.contains(i)) out.push_back(rel.point(i));
  return out;
}

}  // namespace detail

/// Best upper set by exhaustive enumeration over the support points.
template <Scalar T>
struct BruteForceDual {
  T max_gap{0};
  UpperSet best;  // over the full ground set of rel
};

template <Scalar T>
BruteForceDual<T> bruteforce_dual(const DiscreteMeasure<T>& mu, const DiscreteMeasure<T>& nu,
                                  const OrderRelation<T>& rel, std::size_t limit = kOracleLimit) {
  // Only support points matter: an upper set of the induced sub-order extends
  // to its upward closure in rel with the same trace on the support.
  std::vector<std::size_t> support;
  for (const auto& p : common_ground(mu, nu)) support.push_back(rel.require_index(p));
  const auto sub = rel.restrict_to(support);
  const std::size_t n = sub.size();
  if (n > limit) {
    throw Error(ErrorKind::too_large_for_enumeration,
                std::to_string(n) + " support points exceed the oracle limit of " + std::to_string(limit));
  }

  std::vector<T> diff(n);
  for (std::size_t k = 0; k < n; ++k) diff[k] = mu.mass_at(sub.point(k)) - nu.mass_at(sub.point(k));

  std::uint64_t best_mask = 0;
  auto better = [](auto gap, auto best_gap, std::uint64_t mask, std::uint64_t best) {
    if (gap != best_gap) return gap > best_gap;
    const int pc = std::popcount(mask), pb = std::popcount(best);
    return pc != pb ? pc < pb : mask < best;
  };

  bool used_integers = false;
  if constexpr (ScalarTraits<T>::exact) {
    // Common-denominator int64 fast path.
    const BigInt l = detail::lcm_of_denominators(diff);
    std::vector<std::int64_t> scaled(n);
    BigInt bound(0);
    bool fits = true;
    for (std::size_t k = 0; k < n && fits; ++k) {
      BigInt v = numerator(diff[k]) * (l / denominator(diff[k]));
      bound += boost::multiprecision::abs(v);
      fits = bound < BigInt(std::int64_t{1} << 62);
      if (fits) scaled[k] = v.convert_to<std::int64_t>();
    }
    if (fits) {
      used_integers = true;
      std::int64_t best_gap = 0;
      for_each_upper_set_mask(
          sub,
          [&](std::uint64_t mask) {
            std::int64_t gap = 0;
            for (std::uint64_t m = mask; m; m &= m - 1) gap += scaled[static_cast<std::size_t>(std::countr_zero(m))];
            if (better(gap, best_gap, mask, best_mask)) {
              best_gap = gap;
              best_mask = mask;
            }
          },
          limit);
    }
  }
  if (!used_integers) {
    T best_gap(0);
    for_each_upper_set_mask(
        sub,
        [&](std::uint64_t mask) {
          T gap(0);
          for (std::uint64_t m = mask; m; m &= m - 1) gap += diff[static_cast<std::size_t>(std::countr_zero(m))];
          bool strictly = ScalarTraits<T>::exact ? gap > best_gap : gap > best_gap + ScalarTraits<T>::tolerance;
          bool tie = approx_equal(gap, best_gap);
          if (strictly || (tie && better(0, 0, mask, best_mask))) {
            if (strictly) best_gap = gap;
            best_mask = mask;
          }
        },
        limit);
  }

  std::vector<bool> seeds(rel.size(), false);
  for (std::size_t k = 0; k < n; ++k)
    if ((best_mask >> k) & 1u) seeds[support[k]] = true;
  BruteForceDual<T> out;
  out.best = upward_closure(rel, seeds);
  out.max_gap = detail::upper_set_gap(mu, nu, rel, out.best);
  return out;
}

/// 1 - max over upper sets U of (mu(U) - nu(U)), by enumeration.
template <Scalar T>
T tau_bruteforce(const DiscreteMeasure<T>& mu, const DiscreteMeasure<T>& nu, const OrderRelation<T>& rel,
                 std::size_t limit = kOracleLimit) {
  require_probability(mu, "mu");
  require_probability(nu, "nu");
  return T(1) - bruteforce_dual(mu, nu, rel, limit).max_gap;
}

template <Scalar T>
TauResult<T> tau_flow(const DiscreteMeasure<T>& mu, const DiscreteMeasure<T>& nu, const OrderRelation<T>& rel) {
  require_probability(mu, "mu");
  require_probability(nu, "nu");
  const auto mu_ground = detail::ground_indices(mu, rel);
  const auto nu_ground = detail::ground_indices(nu, rel);
  const std::size_t n = mu.size();
  const std::size_t m = nu.size();
  const std::size_t source = 0;
  const std::size_t sink = n + m + 1;

  using Cap = std::conditional_t<ScalarTraits<T>::exact, BigInt, double>;
  std::vector<Cap> mu_cap(n), nu_cap(m);
  Cap unit;
  if constexpr (ScalarTraits<T>::exact) {
    std::vector<Rational> all = mu.weights();
    all.insert(all.end(), nu.weights().begin(), nu.weights().end());
    unit = detail::lcm_of_denominators(all);
    for (std::size_t i = 0; i < n; ++i) mu_cap[i] = numerator(mu.weights()[i]) * (unit / denominator(mu.weights()[i]));
    for (std::size_t j = 0; j < m; ++j) nu_cap[j] = numerator(nu.weights()[j]) * (unit / denominator(nu.weights()[j]));
  } else {
    unit = 1.0;
    mu_cap = mu.weights();
    nu_cap = nu.weights();
  }
  const Cap epsilon = ScalarTraits<T>::exact ? Cap(0) : Cap(ScalarTraits<T>::tolerance);
  const Cap unbounded = unit + unit;

  MaxFlow<Cap> network(n + m + 2, epsilon);
  for (std::size_t i = 0; i < n; ++i) network.add_edge(source, 1 + i, mu_cap[i]);
  for (std::size_t j = 0; j < m; ++j) network.add_edge(1 + n + j, sink, nu_cap[j]);
  struct Middle {
    std::size_t i, j, arc;
  };
  std::vector<Middle> middle;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j)
      if (rel.leq(mu_ground[i], nu_ground[j])) middle.push_back({i, j, network.add_edge(1 + i, 1 + n + j, unbounded)});
  network.solve(source, sink);

  auto to_scalar = [&](const Cap& c) -> T {
    if constexpr (ScalarTraits<T>::exact) {
      return Rational(c, unit);
    } else {
      return c;
    }
  };

  TauResult<T> result;
  std::vector<T> row_left = mu.weights();
  std::vector<T> col_left = nu.weights();
  for (const auto& e : middle) {
    Cap f = network.flow_on(e.arc);
    if (!(f > epsilon)) continue;
    T w = to_scalar(f);
    result.coupling.entries.push_back({e.i, e.j, w, true});
    row_left[e.i] -= w;
    col_left[e.j] -= w;
  }
  result.ordered_mass = result.coupling.ordered_mass();
  result.tau_value = result.ordered_mass;
  detail::northwest_complete(std::move(row_left), std::move(col_left), result.coupling.entries);
  detail::finalize_coupling(result.coupling);

  const auto reachable = network.residual_reachable(source);
  std::vector<bool> seeds(rel.size(), false);
  for (std::size_t i = 0; i < n; ++i)
    if (reachable[1 + i]) seeds[mu_ground[i]] = true;
  result.dual_set = upward_closure(rel, seeds);
  result.dual_gap_value = detail::upper_set_gap(mu, nu, rel, result.dual_set);

  if (!is_upper_set(rel, result.dual_set) || !approx_equal(T(1) - result.dual_gap_value, result.tau_value)) {
    if (common_ground(mu, nu).size() > kOracleLimit) {
      throw Error(ErrorKind::certificate_failure, "min-cut upper set failed the duality check");
    }
    auto oracle = bruteforce_dual(mu, nu, rel);
    result.dual_set = oracle.best;
    result.dual_gap_value = oracle.max_gap;
    result.dual_from_oracle = true;
    if (!approx_equal(T(1) - result.dual_gap_value, result.tau_value)) {
      throw Error(ErrorKind::certificate_failure, "flow value disagrees with the upper-set oracle");
    }
  }
  result.dual_points = detail::members_of(rel, result.dual_set);
  return result;
}

/// Total order on the merged one-dimensional support of mu and nu.
template <Scalar T>
OrderRelation<T> total_order_on(const DiscreteMeasure<T>& mu, const DiscreteMeasure<T>& nu) {
  return product_order(common_ground(mu, nu));
}

/// Total order on merged_jumps(F, G); the ground set of tau_1d's dual set.
template <Scalar T>
OrderRelation<T> jump_order(const StepCDF<T>& F, const StepCDF<T>& G) {
  std::vector<Point<T>> pts;
  for (const auto& x : merged_jumps(F, G)) pts.push_back(Point<T>{x});
  return product_order(std::move(pts));
}

/// Closed form on the line: tau = 1 - sup_x (G(x) - F(x)). The coupling comes
/// from a greedy matching (nu atoms in increasing order take any available
/// mu mass at or below them); its ordered mass must equal the closed form.
template <Scalar T>
TauResult<T> tau_1d(const StepCDF<T>& F, const StepCDF<T>& G) {
  const auto mu = measure_from_cdf(F);
  const auto nu = measure_from_cdf(G);
  const std::vector<T> grid = merged_jumps(F, G);
  const std::size_t k_count = grid.size();

  // Candidate sup values. The right value at grid[k] is the gap of the
  // suffix starting at k + 1; the left limit at grid[k] that of the suffix
  // starting at k. Suffix k_count (empty set) has gap 0.
  T sup(0);
  std::size_t best_start = k_count;
  for (std::size_t k = 0; k < k_count; ++k) {
    const T left = G.left_limit(grid[k]) - F.left_limit(grid[k]);
    const T right = G(grid[k]) - F(grid[k]);
    if (left > sup) {
      sup = left;
      best_start = k;
    } else if (left == sup && k > best_start) {
      best_start = k;
    }
    if (right > sup) {
      sup = right;
      best_start = k + 1;
    } else if (right == sup && k + 1 > best_start) {
      best_start = k + 1;
    }
  }
  if (approx_zero(sup)) best_start = k_count;

  TauResult<T> result;
  result.tau_value = T(1) - sup;
  result.dual_gap_value = sup;
  result.dual_set.members.assign(k_count, false);
  for (std::size_t k = best_start; k < k_count; ++k) {
    result.dual_set.members[k] = true;
    result.dual_points.push_back(Point<T>{grid[k]});
  }
  if (best_start < k_count) result.dual_threshold = grid[best_start];

  std::vector<T> row_left = mu.weights();
  std::vector<T> col_left = nu.weights();
  std::vector<std::size_t> available;
  std::size_t next_mu = 0;
  for (std::size_t j = 0; j < nu.size(); ++j) {
    const T& y = nu.points()[j][0];
    while (next_mu < mu.size() && mu.points()[next_mu][0] <= y) available.push_back(next_mu++);
    while (!available.empty() && col_left[j] > 0 && !approx_zero(col_left[j])) {
      const std::size_t i = available.back();
      T amount = row_left[i] < col_left[j] ? row_left[i] : col_left[j];
      result.coupling.entries.push_back({i, j, amount, true});
      row_left[i] -= amount;
      col_left[j] -= amount;
      if (approx_zero(row_left[i]) || row_left[i] < 0) available.pop_back();
    }
  }
  result.ordered_mass = result.coupling.ordered_mass();
  detail::northwest_complete(std::move(row_left), std::move(col_left), result.coupling.entries);
  detail::finalize_coupling(result.coupling);

  if (!approx_equal(result.ordered_mass, result.tau_value)) {
    throw Error(ErrorKind::certificate_failure,
                "greedy coupling mass " + to_string(result.ordered_mass) + " differs from closed form " +
                    to_string(result.tau_value));
  }
  return result;
}

template <Scalar T>
TauResult<T> tau_1d(const DiscreteMeasure<T>& mu, const DiscreteMeasure<T>& nu) {
  return tau_1d(step_cdf_from(mu), step_cdf_from(nu));
}

/// mu is stochastically dominated by nu: tau(mu, nu) = 1.
template <Scalar T>
bool verify_sd(const DiscreteMeasure<T>& mu, const DiscreteMeasure<T>& nu, const OrderRelation<T>& rel) {
  return approx_equal(tau_flow(mu, nu, rel).tau_value, T(1));
}

struct CertificateCheck {
  bool nonnegative = false;
  bool marginals = false;
  bool ordered_flags = false;
  bool tau_equals_ordered_mass = false;
  bool upper_set_closed = false;
  bool strong_duality = false;
  bool in_range = false;

  bool ok() const {
    return nonnegative && marginals && ordered_flags && tau_equals_ordered_mass && upper_set_closed &&
           strong_duality && in_range;
  }
};

/// Re-verifies both certificates of a result against its inputs.
template <Scalar T>
CertificateCheck verify_certificate(const TauResult<T>& r, const DiscreteMeasure<T>& mu,
                                    const DiscreteMeasure<T>& nu, const OrderRelation<T>& rel) {
  CertificateCheck c;
  c.nonnegative = std::all_of(r.coupling.entries.begin(), r.coupling.entries.end(),
                              [](const auto& e) { return e.weight >= 0; });
  bool indices_ok = std::all_of(r.coupling.entries.begin(), r.coupling.entries.end(),
                                [&](const auto& e) { return e.mu_index < mu.size() && e.nu_index < nu.size(); });
  if (indices_ok) {
    const auto rows = r.coupling.row_sums(mu.size());
    const auto cols = r.coupling.col_sums(nu.size());
    c.marginals = true;
    for (std::size_t i = 0; i < mu.size(); ++i) c.marginals = c.marginals && approx_equal(rows[i], mu.weights()[i]);
    for (std::size_t j = 0; j < nu.size(); ++j) c.marginals = c.marginals && approx_equal(cols[j], nu.weights()[j]);
    c.ordered_flags = true;
    for (const auto& e : r.coupling.entries) {
      const bool below = rel.leq(rel.require_index(mu.points()[e.mu_index]), rel.require_index(nu.points()[e.nu_index]));
      if (e.ordered && !below) c.ordered_flags = false;
    }
  }
  c.tau_equals_ordered_mass =
      approx_equal(r.coupling.ordered_mass(), r.tau_value) && approx_equal(r.ordered_mass, r.tau_value);
  c.upper_set_closed = is_upper_set(rel, r.dual_set);
  if (c.upper_set_closed) {
    const T gap = detail::upper_set_gap(mu, nu, rel, r.dual_set);
    c.strong_duality = approx_equal(gap, r.dual_gap_value) && approx_equal(T(1) - gap, r.tau_value);
  }
  c.in_range = approx_leq(T(0), r.tau_value) && approx_leq(r.tau_value, T(1));
  return c;
}

/// Ordered component pair from an optimal coupling: mu'(B) = P{X in B, X below Y}
/// and nu'(B) = P{Y in B, X below Y}.
template <Scalar T>
std::pair<DiscreteMeasure<T>, DiscreteMeasure<T>> extract_ordered_components(const TauResult<T>& result,
                                                                             const DiscreteMeasure<T>& mu,
                                                                             const DiscreteMeasure<T>& nu,
                                                                             const OrderRelation<T>& rel) {
  const auto check = verify_certificate(result, mu, nu, rel);
  if (!check.nonnegative || !check.marginals || !check.ordered_flags || !check.tau_equals_ordered_mass) {
    throw Error(ErrorKind::stale_certificate, "coupling does not match the given measures");
  }
  std::vector<T> mu_part(mu.size(), T(0));
  std::vector<T> nu_part(nu.size(), T(0));
  for (const auto& e : result.coupling.entries) {
    if (!e.ordered) continue;
    mu_part[e.mu_index] += e.weight;
    nu_part[e.nu_index] += e.weight;
  }
  return {DiscreteMeasure<T>::canonical(mu.points(), std::move(mu_part)),
          DiscreteMeasure<T>::canonical(nu.points(), std::move(nu_part))};
}

}  // namespace psd
