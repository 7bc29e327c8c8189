#pragma once

// Seeded generators of small random comparison instances: integer-coordinate
// points under the product order, random rational weights.

#include "psd/measures.hpp"
#include "psd/partial_order.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace psd {

struct InstanceOptions {
  std::size_t max_support = 8;
  std::vector<std::size_t> dims{1, 2, 3};
  int coord_max = 3;
  int weight_max = 9;
};

template <Scalar T>
struct Instance {
  DiscreteMeasure<T> mu;
  DiscreteMeasure<T> nu;
  OrderRelation<T> rel;
};

template <Scalar T>
struct MixtureInstance {
  DiscreteMeasure<T> mu_a, nu_a, mu_b, nu_b;
  T lambda;
  OrderRelation<T> rel;
};

using Rng = std::mt19937_64;

inline int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

template <Scalar T>
Point<T> random_point(Rng& rng, std::size_t dim, int coord_max) {
  Point<T> p(dim);
  for (auto& c : p) c = T(uniform_int(rng, 0, coord_max));
  return p;
}

/// Integer weights in [0, weight_max], at least one positive, normalized.
template <Scalar T>
std::vector<T> random_weights(Rng& rng, std::size_t n, int weight_max) {
  std::vector<int> raw(n);
  int total = 0;
  for (auto& w : raw) total += (w = uniform_int(rng, 0, weight_max));
  if (total == 0) {
    raw[0] = 1;
    total = 1;
  }
  std::vector<T> out;
  out.reserve(n);
  for (int w : raw) out.push_back(T(w) / T(total));
  return out;
}

template <Scalar T>
DiscreteMeasure<T> random_measure(Rng& rng, std::size_t dim, const InstanceOptions& opt) {
  const std::size_t n = static_cast<std::size_t>(uniform_int(rng, 1, static_cast<int>(opt.max_support)));
  std::vector<Point<T>> pts;
  for (std::size_t i = 0; i < n; ++i) pts.push_back(random_point<T>(rng, dim, opt.coord_max));
  return make_discrete(std::move(pts), random_weights<T>(rng, n, opt.weight_max));
}

/// Moves every atom of m weakly upward, so the result dominates m.
template <Scalar T>
DiscreteMeasure<T> random_upward_shift(Rng& rng, const DiscreteMeasure<T>& m, int max_step = 2) {
  std::vector<Point<T>> pts = m.points();
  for (auto& p : pts)
    for (auto& c : p) c += T(uniform_int(rng, 0, max_step));
  return make_discrete(std::move(pts), m.weights());
}

template <Scalar T>
std::size_t random_dim(Rng& rng, const InstanceOptions& opt) {
  return opt.dims[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(opt.dims.size()) - 1))];
}

/// Independent mu and nu; with probability 1/3 nu is an upward shift of mu
/// so that dominated pairs are well represented.
template <Scalar T>
Instance<T> random_instance(Rng& rng, const InstanceOptions& opt = {}) {
  const std::size_t dim = random_dim<T>(rng, opt);
  auto mu = random_measure<T>(rng, dim, opt);
  auto nu = uniform_int(rng, 0, 2) == 0 ? random_upward_shift(rng, mu) : random_measure<T>(rng, dim, opt);
  auto rel = product_order(common_ground(mu, nu));
  return {std::move(mu), std::move(nu), std::move(rel)};
}

/// Components for the mixture axiom: mu_a dominated by nu_a, (mu_b, nu_b)
/// arbitrary, lambda in {0, 1/10, ..., 1}.
template <Scalar T>
MixtureInstance<T> random_mixture_instance(Rng& rng, const InstanceOptions& opt = {}) {
  const std::size_t dim = random_dim<T>(rng, opt);
  InstanceOptions small = opt;
  small.max_support = std::max<std::size_t>(1, opt.max_support / 2);
  auto mu_a = random_measure<T>(rng, dim, small);
  auto nu_a = random_upward_shift(rng, mu_a);
  auto mu_b = random_measure<T>(rng, dim, small);
  auto nu_b = random_measure<T>(rng, dim, small);
  T lambda = T(uniform_int(rng, 0, 10)) / T(10);
  std::vector<Point<T>> ground = common_ground(mu_a, nu_a);
  for (const auto* m : {&mu_b, &nu_b}) ground.insert(ground.end(), m->points().begin(), m->points().end());
  auto rel = product_order(std::move(ground));
  return {std::move(mu_a), std::move(nu_a), std::move(mu_b), std::move(nu_b), lambda, std::move(rel)};
}

}  // namespace psd
