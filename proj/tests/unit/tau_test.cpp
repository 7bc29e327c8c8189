#include "psd/random_instances.hpp"
#include "psd/tau.hpp"
#include "test_util.hpp"

#include <functional>

namespace psd {
namespace {

using testing::Q;
using M = DiscreteMeasure<Rational>;

// Test-local primal oracle: plain augmenting-path max flow over rationals on
// a dense capacity matrix, sharing no code with the library solver.
Rational naive_max_ordered_mass(const M& mu, const M& nu, const OrderRelation<Rational>& rel) {
  const std::size_t m = mu.size(), n = nu.size(), N = m + n + 2, s = m + n, t = m + n + 1;
  std::vector<std::vector<Rational>> cap(N, std::vector<Rational>(N, Q(0)));
  for (std::size_t i = 0; i < m; ++i) cap[s][i] = mu.weights()[i];
  for (std::size_t j = 0; j < n; ++j) cap[m + j][t] = nu.weights()[j];
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (rel.leq(rel.require_index(mu.points()[i]), rel.require_index(nu.points()[j]))) cap[i][m + j] = Q(2);
  Rational total(0);
  while (true) {
    std::vector<int> parent(N, -1);
    parent[s] = static_cast<int>(s);
    std::vector<std::size_t> queue{s};
    for (std::size_t h = 0; h < queue.size(); ++h)
      for (std::size_t v = 0; v < N; ++v)
        if (parent[v] < 0 && cap[queue[h]][v] > 0) {
          parent[v] = static_cast<int>(queue[h]);
          queue.push_back(v);
        }
    if (parent[t] < 0) return total;
    Rational push(2);
    for (std::size_t v = t; v != s; v = static_cast<std::size_t>(parent[v])) push = std::min(push, cap[parent[v]][v]);
    for (std::size_t v = t; v != s; v = static_cast<std::size_t>(parent[v])) {
      cap[parent[v]][v] -= push;
      cap[v][parent[v]] += push;
    }
    total += push;
  }
}

M two_atom(Rational eps) { return make_discrete_1d<Rational>({Q(0), Q(1)}, {eps, Q(1) - eps}); }

TEST(TauFlow, TwoAtomExample) {
  const auto mu = two_atom(Q(1, 4));
  const auto nu = dirac<Rational>({Q(3, 4)});
  const auto rel = total_order_on(mu, nu);
  const auto r = tau_flow(mu, nu, rel);
  EXPECT_EQ(r.tau_value, Q(1, 4));
  EXPECT_EQ(r.dual_gap_value, Q(3, 4));
  EXPECT_EQ(r.dual_points, (std::vector<Point<Rational>>{{Q(1)}}));
  EXPECT_TRUE(verify_certificate(r, mu, nu, rel).ok());
}

TEST(TauFlow, IdentityCoupling) {
  const auto mu = make_discrete<Rational>({{Q(0), Q(2)}, {Q(1), Q(1)}, {Q(3), Q(0)}}, {Q(1, 6), Q(1, 3), Q(1, 2)});
  const auto rel = product_order(mu.points());
  const auto r = tau_flow(mu, mu, rel);
  EXPECT_EQ(r.tau_value, Q(1));
  EXPECT_EQ(r.dual_gap_value, Q(0));
}

TEST(TauFlow, FourPointProductExample) {
  const auto mu = make_discrete<Rational>({{Q(0), Q(0)}, {Q(1), Q(1)}}, {Q(1, 2), Q(1, 2)});
  const auto nu = make_discrete<Rational>({{Q(1), Q(0)}, {Q(0), Q(1)}}, {Q(1, 2), Q(1, 2)});
  const auto rel = product_order(common_ground(mu, nu));
  const auto r = tau_flow(mu, nu, rel);

  // Oracle: couplings are [[t, 1/2 - t], [1/2 - t, t]] with vertices t in {0, 1/2};
  // (0,0) is below both targets and (1,1) below neither.
  Rational best(0);
  for (const auto& t : {Q(0), Q(1, 2)}) {
    const Rational ordered = t + (Q(1, 2) - t);
    best = std::max(best, ordered);
  }
  // Oracle: every subset, filtered to upper sets, maximizing mu(U) - nu(U).
  Rational best_gap(0);
  std::vector<bool> best_members;
  for (std::uint64_t mask = 0; mask < 16; ++mask) {
    UpperSet u{std::vector<bool>(4)};
    for (std::size_t i = 0; i < 4; ++i) u.members[i] = (mask >> i) & 1u;
    if (!is_upper_set(rel, u)) continue;
    const Rational gap = measure_of(mu, rel, u) - measure_of(nu, rel, u);
    if (gap > best_gap) {
      best_gap = gap;
      best_members = u.members;
    }
  }
  EXPECT_EQ(best, Q(1, 2));
  EXPECT_EQ(Q(1) - best_gap, Q(1, 2));
  EXPECT_EQ(r.tau_value, best);
  EXPECT_EQ(r.dual_set.members, best_members);
  EXPECT_EQ(r.dual_points, (std::vector<Point<Rational>>{{Q(1), Q(1)}}));
  EXPECT_EQ(tau_bruteforce(mu, nu, rel), Q(1, 2));
}

TEST(TauFlow, IncomparableSupports) {
  const auto mu = dirac<Rational>({Q(1), Q(0)});
  const auto nu = dirac<Rational>({Q(0), Q(1)});
  const auto rel = product_order(common_ground(mu, nu));
  const auto r = tau_flow(mu, nu, rel);
  EXPECT_EQ(r.tau_value, Q(0));
  const auto [mp, np] = extract_ordered_components(r, mu, nu, rel);
  EXPECT_TRUE(mp.empty());
  EXPECT_TRUE(np.empty());
}

TEST(TauFlow, Contracts) {
  const auto mu = make_discrete_1d<Rational>({Q(0)}, {Q(1, 2)});
  const auto nu = dirac<Rational>({Q(1)});
  EXPECT_PSD_ERROR(tau_flow(mu, nu, total_order_on(mu, nu)), unnormalized_input);
  const auto p = dirac<Rational>({Q(0)});
  const auto rel = product_order<Rational>({{Q(0)}});
  EXPECT_PSD_ERROR(tau_flow(p, nu, rel), point_not_in_relation);
}

TEST(TauFlow, RelationFromEdgesDiamond) {
  // bottom < left, right < top; left and right incomparable
  auto rel = relation_from_edges<Rational>({{Q(0)}, {Q(1)}, {Q(2)}, {Q(3)}}, {{0, 1}, {0, 2}, {1, 3}, {2, 3}});
  const auto mu = make_discrete_1d<Rational>({Q(1), Q(0)}, {Q(1, 2), Q(1, 2)});
  const auto nu = make_discrete_1d<Rational>({Q(2), Q(3)}, {Q(1, 2), Q(1, 2)});
  EXPECT_EQ(tau_flow(mu, nu, rel).tau_value, Q(1));
  EXPECT_EQ(tau_flow(nu, mu, rel).tau_value, Q(0));
}

TEST(Tau1d, TwoAtomExample) {
  const auto F = step_cdf_from(two_atom(Q(1, 4)));
  const auto G = step_cdf_from(dirac<Rational>({Q(3, 4)}));
  const auto r = tau_1d(F, G);
  EXPECT_EQ(r.tau_value, Q(1, 4));
  ASSERT_TRUE(r.dual_threshold.has_value());
  EXPECT_EQ(*r.dual_threshold, Q(1));
  EXPECT_EQ(r.coupling.ordered_mass(), Q(1, 4));
}

TEST(Tau1d, EqualCdfs) {
  const auto F = step_cdf_from(make_discrete_1d<Rational>({Q(1), Q(2)}, {Q(1, 3), Q(2, 3)}));
  EXPECT_EQ(tau_1d(F, F).tau_value, Q(1));
}

TEST(Tau1d, ContinuousMixtureClosedForm) {
  // F = 0.9 U + 0.1 x, G = 0.9 U + 0.1 sqrt(x); G - F = 0.1 (sqrt(x) - x).
  double best = 0.0;
  for (int k = 0; k <= 1000000; ++k) {
    const double x = k / 1e6;
    best = std::max(best, 0.1 * (std::sqrt(x) - x));
  }
  EXPECT_NEAR(1.0 - best, 0.975, 1e-12);
  // Fine discretization of the same pair, in floats.
  const int n = 2001;
  std::vector<double> xs, f, g;
  for (int k = 0; k < n; ++k) xs.push_back(static_cast<double>(k) / (n - 1));
  auto masses = [&](auto H) {
    std::vector<double> w;
    double prev = 0.0;
    for (int k = 0; k < n; ++k) {
      const double c = k + 1 == n ? 1.0 : 0.9 * (k + 1.0) / n + 0.1 * H(xs[k]);
      w.push_back(c - prev);
      prev = c;
    }
    return w;
  };
  const auto F = step_cdf_from(make_discrete_1d<double>(xs, masses([](double x) { return x; })));
  const auto G = step_cdf_from(make_discrete_1d<double>(xs, masses([](double x) { return std::sqrt(x); })));
  EXPECT_NEAR(tau_1d(F, G).tau_value, 0.975, 2e-3);
}

TEST(Bruteforce, Examples) {
  const auto mu = two_atom(Q(1, 4));
  const auto nu = dirac<Rational>({Q(3, 4)});
  const auto rel = total_order_on(mu, nu);
  const auto dual = bruteforce_dual(mu, nu, rel);
  EXPECT_EQ(dual.max_gap, Q(3, 4));
  EXPECT_EQ(detail::members_of(rel, dual.best), (std::vector<Point<Rational>>{{Q(1)}}));
  EXPECT_EQ(tau_bruteforce(mu, mu, rel), Q(1));
}

TEST(VerifySd, Examples) {
  const auto d0 = dirac<Rational>({Q(0)});
  const auto d1 = dirac<Rational>({Q(1)});
  const auto rel = total_order_on(d0, d1);
  EXPECT_TRUE(verify_sd(d0, d1, rel));
  EXPECT_FALSE(verify_sd(d1, d0, rel));
  const auto mu = two_atom(Q(1, 4));
  const auto nu = dirac<Rational>({Q(3, 4)});
  const auto rel2 = total_order_on(mu, nu);
  EXPECT_FALSE(verify_sd(mu, nu, rel2));
  EXPECT_FALSE(verify_sd(nu, mu, rel2));
}

TEST(Extract, TwoAtomExample) {
  const auto mu = two_atom(Q(1, 4));
  const auto nu = dirac<Rational>({Q(3, 4)});
  const auto rel = total_order_on(mu, nu);
  const auto [mp, np] = extract_ordered_components(tau_flow(mu, nu, rel), mu, nu, rel);
  EXPECT_EQ(mp, make_discrete_1d<Rational>({Q(0)}, {Q(1, 4)}));
  EXPECT_EQ(np, make_discrete_1d<Rational>({Q(3, 4)}, {Q(1, 4)}));
}

TEST(Extract, DominatedPairIsWhole) {
  const auto mu = make_discrete_1d<Rational>({Q(0), Q(2)}, {Q(1, 2), Q(1, 2)});
  const auto nu = make_discrete_1d<Rational>({Q(1), Q(3)}, {Q(1, 2), Q(1, 2)});
  const auto rel = total_order_on(mu, nu);
  const auto [mp, np] = extract_ordered_components(tau_flow(mu, nu, rel), mu, nu, rel);
  EXPECT_EQ(mp, mu);
  EXPECT_EQ(np, nu);
}

TEST(Extract, StaleCertificate) {
  const auto mu = two_atom(Q(1, 4));
  const auto nu = dirac<Rational>({Q(3, 4)});
  const auto rel = total_order_on(mu, nu);
  const auto r = tau_flow(mu, nu, rel);
  const auto other = two_atom(Q(1, 2));
  EXPECT_PSD_ERROR(extract_ordered_components(r, other, nu, rel), stale_certificate);
}

TEST(Certificate, DetectsTampering) {
  const auto mu = two_atom(Q(1, 4));
  const auto nu = dirac<Rational>({Q(3, 4)});
  const auto rel = total_order_on(mu, nu);
  auto r = tau_flow(mu, nu, rel);
  auto bad = r;
  bad.tau_value = Q(1, 2);
  EXPECT_FALSE(verify_certificate(bad, mu, nu, rel).ok());
  bad = r;
  bad.dual_set.members.assign(rel.size(), false);
  bad.dual_set.members[rel.require_index({Q(3, 4)})] = true;
  EXPECT_FALSE(verify_certificate(bad, mu, nu, rel).upper_set_closed);
}

class RandomTau : public ::testing::TestWithParam<int> {};

TEST_P(RandomTau, FlowMatchesOraclesExactly) {
  Rng rng(static_cast<std::uint64_t>(GetParam()));
  for (int trial = 0; trial < 40; ++trial) {
    const auto inst = random_instance<Rational>(rng);
    const auto r = tau_flow(inst.mu, inst.nu, inst.rel);
    EXPECT_EQ(r.tau_value, tau_bruteforce(inst.mu, inst.nu, inst.rel));
    EXPECT_EQ(r.tau_value, naive_max_ordered_mass(inst.mu, inst.nu, inst.rel));
    EXPECT_TRUE(verify_certificate(r, inst.mu, inst.nu, inst.rel).ok());
    if (inst.mu.dimension() == 1) EXPECT_EQ(tau_1d(inst.mu, inst.nu).tau_value, r.tau_value);
  }
}

TEST_P(RandomTau, FloatAgreesWithExact) {
  Rng rng(static_cast<std::uint64_t>(GetParam()) + 1000);
  for (int trial = 0; trial < 20; ++trial) {
    const auto inst = random_instance<Rational>(rng);
    auto to_float = [](const M& m) {
      std::vector<Point<double>> pts;
      std::vector<double> w;
      for (std::size_t i = 0; i < m.size(); ++i) {
        Point<double> p;
        for (const auto& c : m.points()[i]) p.push_back(to_double(c));
        pts.push_back(p);
        w.push_back(to_double(m.weights()[i]));
      }
      return make_discrete(pts, w);
    };
    const auto mu = to_float(inst.mu), nu = to_float(inst.nu);
    const auto rel = product_order(common_ground(mu, nu));
    const auto r = tau_flow(mu, nu, rel);
    EXPECT_NEAR(r.tau_value, to_double(tau_flow(inst.mu, inst.nu, inst.rel).tau_value), 1e-12);
    EXPECT_NEAR(r.tau_value, tau_bruteforce(mu, nu, rel), 1e-12);
    EXPECT_TRUE(verify_certificate(r, mu, nu, rel).ok());
  }
}

INSTANTIATE_TEST_SUITE_P(Seeds, RandomTau, ::testing::Values(1, 2, 3));

}  // namespace
}  // namespace psd
