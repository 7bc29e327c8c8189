#include "psd/partial_order.hpp"
#include "test_util.hpp"

#include <random>
#include <set>

namespace psd {
namespace {

using testing::Q;
using P = Point<Rational>;

// Independent oracle: all 2^n subsets, keep the upward-closed ones.
std::size_t count_upper_sets_by_filter(const OrderRelation<Rational>& rel) {
  const std::size_t n = rel.size();
  std::size_t count = 0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    bool closed = true;
    for (std::size_t i = 0; i < n && closed; ++i)
      for (std::size_t j = 0; j < n && closed; ++j)
        if (((mask >> i) & 1u) && rel.leq(i, j) && !((mask >> j) & 1u)) closed = false;
    count += closed;
  }
  return count;
}

TEST(ProductOrder, Coordinatewise) {
  auto rel = product_order<Rational>({{Q(0), Q(0)}, {Q(1), Q(1)}});
  const auto lo = rel.require_index({Q(0), Q(0)});
  const auto hi = rel.require_index({Q(1), Q(1)});
  EXPECT_TRUE(rel.leq(lo, hi));
  EXPECT_FALSE(rel.leq(hi, lo));
}

TEST(ProductOrder, Antichain) {
  auto rel = product_order<Rational>({{Q(1), Q(0)}, {Q(0), Q(1)}});
  EXPECT_FALSE(rel.leq(0, 1));
  EXPECT_FALSE(rel.leq(1, 0));
}

TEST(ProductOrder, OneDimensionalChain) {
  auto rel = product_order<Rational>({{Q(1)}, {Q(0)}, {Q(3, 4)}});
  ASSERT_EQ(rel.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(rel.leq(i, j), i <= j);
}

TEST(ProductOrder, DimensionMismatch) {
  EXPECT_PSD_ERROR(product_order<Rational>({{Q(0)}, {Q(0), Q(1)}}), dimension_mismatch);
}

TEST(RelationFromEdges, TransitiveClosure) {
  auto rel = relation_from_edges<Rational>({{Q(0)}, {Q(1)}, {Q(2)}}, {{0, 1}, {1, 2}});
  EXPECT_TRUE(rel.leq(0, 2));
  EXPECT_FALSE(rel.leq(2, 0));
}

TEST(RelationFromEdges, Cycle) {
  EXPECT_PSD_ERROR(relation_from_edges<Rational>({{Q(0)}, {Q(1)}}, {{0, 1}, {1, 0}}), cycle_detected);
}

TEST(RelationFromEdges, EmptyEdgesIsAntichain) {
  auto rel = relation_from_edges<Rational>({{Q(0)}, {Q(1)}, {Q(2)}}, {});
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(rel.leq(i, j), i == j);
}

TEST(RelationFromEdges, LongChainClosure) {
  std::vector<P> pts;
  std::vector<std::pair<std::size_t, std::size_t>> edges;
  for (long i = 0; i < 130; ++i) pts.push_back({Q(i)});
  for (std::size_t i = 0; i + 1 < 130; ++i) edges.emplace_back(i, i + 1);
  auto rel = relation_from_edges<Rational>(pts, edges);
  EXPECT_TRUE(rel.leq(0, 129));
  EXPECT_TRUE(rel.leq(64, 65));
  EXPECT_FALSE(rel.leq(129, 0));
}

TEST(UpperSets, ChainOfThree) {
  auto rel = product_order<Rational>({{Q(0)}, {Q(1)}, {Q(2)}});
  const auto sets = enumerate_upper_sets(rel);
  EXPECT_EQ(sets.size(), 4u);
  EXPECT_EQ(count_upper_sets_by_filter(rel), 4u);
}

TEST(UpperSets, AntichainOfTwo) {
  auto rel = product_order<Rational>({{Q(1), Q(0)}, {Q(0), Q(1)}});
  EXPECT_EQ(enumerate_upper_sets(rel).size(), 4u);
}

TEST(UpperSets, FourPointPoset) {
  auto rel = relation_from_edges<Rational>({{Q(0), Q(0)}, {Q(1), Q(0)}, {Q(0), Q(1)}}, {{0, 1}, {0, 2}});
  const auto sets = enumerate_upper_sets(rel);
  EXPECT_EQ(sets.size(), 5u);
  EXPECT_EQ(count_upper_sets_by_filter(rel), 5u);
  std::set<std::vector<bool>> distinct;
  for (const auto& u : sets) {
    EXPECT_TRUE(is_upper_set(rel, u));
    distinct.insert(u.members);
  }
  EXPECT_EQ(distinct.size(), 5u);
}

TEST(UpperSets, MatchesSubsetFilterOnRandomPosets) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<P> pts;
    const int n = 1 + static_cast<int>(rng() % 9);
    for (int i = 0; i < n; ++i) pts.push_back({Q(static_cast<long>(rng() % 3)), Q(static_cast<long>(rng() % 3))});
    auto rel = product_order(pts);
    const auto sets = enumerate_upper_sets(rel);
    EXPECT_EQ(sets.size(), count_upper_sets_by_filter(rel));
    std::set<std::vector<bool>> distinct;
    for (const auto& u : sets) distinct.insert(u.members);
    EXPECT_EQ(distinct.size(), sets.size());
  }
}

TEST(UpperSets, TooLarge) {
  std::vector<P> pts;
  for (long i = 0; i < 21; ++i) pts.push_back({Q(i), Q(-i)});
  auto rel = product_order(pts);
  EXPECT_PSD_ERROR(enumerate_upper_sets(rel), too_large_for_enumeration);
}

TEST(UpperSets, Closure) {
  auto rel = product_order<Rational>({{Q(0)}, {Q(1)}, {Q(2)}});
  auto u = upward_closure(rel, {false, true, false});
  EXPECT_EQ(u.members, (std::vector<bool>{false, true, true}));
  EXPECT_FALSE(is_upper_set(rel, UpperSet{{false, true, false}}));
}

TEST(OrderRelation, PointNotInRelation) {
  auto rel = product_order<Rational>({{Q(0)}});
  EXPECT_PSD_ERROR(rel.require_index({Q(1)}), point_not_in_relation);
}

}  // namespace
}  // namespace psd
