#include "psd/max_flow.hpp"
#include "psd/scalar.hpp"

#include <gtest/gtest.h>

namespace psd {
namespace {

TEST(MaxFlow, ClassicNetwork) {
  // CLRS example, max flow 23
  MaxFlow<long> g(6);
  g.add_edge(0, 1, 16);
  g.add_edge(0, 2, 13);
  g.add_edge(1, 2, 10);
  g.add_edge(2, 1, 4);
  g.add_edge(1, 3, 12);
  g.add_edge(3, 2, 9);
  g.add_edge(2, 4, 14);
  g.add_edge(4, 3, 7);
  g.add_edge(3, 5, 20);
  g.add_edge(4, 5, 4);
  EXPECT_EQ(g.solve(0, 5), 23);
}

TEST(MaxFlow, BigIntAndCut) {
  MaxFlow<BigInt> g(4);
  const auto a = g.add_edge(0, 1, BigInt(3));
  g.add_edge(0, 2, BigInt(2));
  g.add_edge(1, 3, BigInt(1));
  g.add_edge(2, 3, BigInt(5));
  EXPECT_EQ(g.solve(0, 3), BigInt(3));
  EXPECT_EQ(g.flow_on(a), BigInt(1));
  const auto reach = g.residual_reachable(0);
  EXPECT_TRUE(reach[0]);
  EXPECT_TRUE(reach[1]);
  EXPECT_FALSE(reach[2]);
  EXPECT_FALSE(reach[3]);
}

TEST(MaxFlow, Doubles) {
  MaxFlow<double> g(3, 1e-12);
  g.add_edge(0, 1, 0.3);
  g.add_edge(1, 2, 0.1 + 0.2);
  EXPECT_NEAR(g.solve(0, 2), 0.3, 1e-15);
}

}  // namespace
}  // namespace psd
