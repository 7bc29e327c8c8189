#pragma once

// Competing measures of partial dominance on the line, all evaluated on step
// CDFs F (of mu) and G (of nu):
//   q      fraction of grid points with G(x_i) <= F(x_i)
//   r      normalized largest c such that G <= F on [a, c]
//   alpha  int (F - G)_+ / int |F - G|, with alpha = 1 when F = G

#include "psd/errors.hpp"
#include "psd/measures.hpp"

#include <cstddef>
#include <vector>

namespace psd {

template <Scalar T>
struct Grid {
  std::vector<T> test_points;

  explicit Grid(std::vector<T> points) : test_points(std::move(points)) {
    if (test_points.empty()) throw Error(ErrorKind::empty_grid, "grid has no points");
    for (std::size_t i = 1; i < test_points.size(); ++i) {
      if (!(test_points[i - 1] < test_points[i])) {
        throw Error(ErrorKind::invalid_grid, "grid points must be strictly increasing");
      }
    }
  }
  std::size_t size() const { return test_points.size(); }
};

template <Scalar T>
struct DomainInterval {
  T a;
  T b;

  DomainInterval(T lo, T hi) : a(std::move(lo)), b(std::move(hi)) {
    if (!(a < b)) throw Error(ErrorKind::invalid_domain, "domain needs a < b");
  }
};

template <Scalar T>
T q_measure(const StepCDF<T>& F, const StepCDF<T>& G, const Grid<T>& grid) {
  std::size_t m = 0;
  for (const auto& x : grid.test_points)
    if (G(x) <= F(x)) ++m;
  return T(static_cast<long>(m)) / T(static_cast<long>(grid.size()));
}

/// Left-continuous inverse of the pooled CDF (F + G) / 2 at p:
/// the smallest jump x with pooled(x) >= p.
template <Scalar T>
T pooled_quantile(const StepCDF<T>& F, const StepCDF<T>& G, const T& p) {
  const auto grid = merged_jumps(F, G);
  for (const auto& x : grid)
    if ((F(x) + G(x)) / T(2) >= p) return x;
  return grid.back();
}

/// The i/(n+1) quantiles of the pooled distribution, i = 1..n, de-duplicated.
template <Scalar T>
Grid<T> default_grid(const StepCDF<T>& F, const StepCDF<T>& G, std::size_t n) {
  if (n == 0) throw Error(ErrorKind::empty_grid, "default grid needs n >= 1");
  std::vector<T> points;
  for (std::size_t i = 1; i <= n; ++i) {
    T p = T(static_cast<long>(i)) / T(static_cast<long>(n + 1));
    T x = pooled_quantile(F, G, p);
    if (points.empty() || points.back() < x) points.push_back(x);
  }
  return Grid<T>(std::move(points));
}

/// Largest c in [a, b] with G(x) <= F(x) for every x <= c. The condition is
/// checked at x = a itself, so a violation there gives c* = a.
template <Scalar T>
T restricted_threshold(const StepCDF<T>& F, const StepCDF<T>& G, const DomainInterval<T>& dom) {
  for (const auto* cdf : {&F, &G}) {
    if (cdf->jumps().front() < dom.a || cdf->jumps().back() > dom.b) {
      throw Error(ErrorKind::support_outside_domain,
                  "support [" + to_string(cdf->jumps().front()) + ", " + to_string(cdf->jumps().back()) +
                      "] not within [" + to_string(dom.a) + ", " + to_string(dom.b) + "]");
    }
  }
  // G - F is constant between merged jumps; before the first jump both are 0.
  if (G(dom.a) > F(dom.a)) return dom.a;
  for (const auto& x : merged_jumps(F, G)) {
    if (G(x) > F(x)) return x;  // the valid set is [a, x)
  }
  return dom.b;
}

template <Scalar T>
T r_measure(const StepCDF<T>& F, const StepCDF<T>& G, const DomainInterval<T>& dom) {
  return (restricted_threshold(F, G, dom) - dom.a) / (dom.b - dom.a);
}

template <Scalar T>
struct AlphaIntegrals {
  T positive{0};  // int (F - G)_+
  T negative{0};  // int (G - F)_+
  T absolute{0};  // int |F - G|
};

/// Exact integration over the merged jump partition; the integrand vanishes
/// outside the hull of both supports.
template <Scalar T>
AlphaIntegrals<T> alpha_integrals(const StepCDF<T>& F, const StepCDF<T>& G) {
  const auto grid = merged_jumps(F, G);
  AlphaIntegrals<T> out;
  for (std::size_t k = 0; k + 1 < grid.size(); ++k) {
    const T width = grid[k + 1] - grid[k];
    const T d = F(grid[k]) - G(grid[k]);
    if (d > 0) {
      out.positive += d * width;
      out.absolute += d * width;
    } else if (d < 0) {
      out.negative -= d * width;
      out.absolute -= d * width;
    }
  }
  return out;
}

template <Scalar T>
T alpha_measure(const StepCDF<T>& F, const StepCDF<T>& G) {
  const auto in = alpha_integrals(F, G);
  if (approx_zero(in.absolute)) return T(1);
  return in.positive / in.absolute;
}

}  // namespace psd
