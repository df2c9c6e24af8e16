#include <gtest/gtest.h>

#include <random>

#include "choquard/errors.hpp"
#include "choquard/lattice.hpp"

using namespace choquard;

namespace {

// Brute-force count of {x in Z^dim : |x|_1 <= r}.
std::int64_t enumerate_ball(int dim, int r) {
  std::int64_t count = 0;
  std::vector<int> x(static_cast<std::size_t>(dim), -r);
  while (true) {
    int s = 0;
    for (int c : x) s += std::abs(c);
    if (s <= r) ++count;
    int a = 0;
    while (a < dim && ++x[static_cast<std::size_t>(a)] > r) x[static_cast<std::size_t>(a++)] = -r;
    if (a == dim) break;
  }
  return count;
}

}  // namespace

TEST(WordDistance, MatchesL1) {
  EXPECT_EQ(word_distance(Site{0, 0}, Site{0, 0}), 0);
  EXPECT_EQ(word_distance(Site{0, 0}, Site{2, -3}), 5);
  EXPECT_THROW(word_distance(Site{0, 0}, Site{1}), InputError);
}

TEST(WordDistance, MetricAxioms) {
  std::mt19937 rng(3);
  std::uniform_int_distribution<int> c(-20, 20);
  auto draw = [&] { return Site{c(rng), c(rng), c(rng)}; };
  for (int n = 0; n < 1000; ++n) {
    const Site x = draw(), y = draw(), z = draw();
    EXPECT_EQ(word_distance(x, y), word_distance(y, x));
    EXPECT_EQ(word_distance(x, y) == 0, x == y);
    EXPECT_LE(word_distance(x, z), word_distance(x, y) + word_distance(y, z));
  }
}

TEST(Ball, Sizes) {
  EXPECT_EQ(ball({0, 0}, 0).size(), 1u);
  EXPECT_EQ(ball({0, 0}, 1).size(), 5u);
  EXPECT_EQ(ball({0, 0}, 2).size(), 13u);
  EXPECT_EQ(ball({7, -4}, 2).size(), 13u);
  EXPECT_THROW(ball({0, 0}, -1), InputError);
}

TEST(Ball, NestedAndStrictlyGrowing) {
  for (int r = 0; r < 8; ++r) {
    const auto small = ball({0, 0, 0}, r), big = ball({0, 0, 0}, r + 1);
    EXPECT_GT(big.size(), small.size());
    for (const auto& x : small) EXPECT_TRUE(big.contains(x));
  }
}

TEST(GrowthFunction, AgreesWithEnumeration) {
  EXPECT_EQ(growth_function(3, 1), 7);
  EXPECT_EQ(growth_function(2, 2), 13);
  for (int dim = 1; dim <= 3; ++dim)
    for (int r = 0; r <= 6; ++r) EXPECT_EQ(growth_function(r, dim), enumerate_ball(dim, r));
}

TEST(GrowthFunction, BracketOnZ2) {
  // beta(r) = 2r^2 + 2r + 1 gives beta / r^2 in (2, 5], reaching 5 at r = 1
  const auto b = growth_bracket(2, 50);
  EXPECT_GE(b.c1, 2.0);
  EXPECT_DOUBLE_EQ(b.c2, 5.0);
  for (int r = 3; r <= 50; ++r) {
    const double q = static_cast<double>(growth_function(r, 2)) / (r * r);
    EXPECT_GE(q, 1.0);
    EXPECT_LE(q, 3.0);
  }
}

TEST(VertexBoundary, Examples) {
  const auto single = vertex_boundary(SiteSet(2, {{0, 0}}));
  EXPECT_EQ(single.size(), 4u);
  const auto b2 = vertex_boundary(ball({0, 0}, 2));
  EXPECT_EQ(b2.size(), 12u);
  EXPECT_THROW(vertex_boundary(SiteSet(2)), InputError);
}

TEST(VertexBoundary, BallBoundaryIsNextSphere) {
  for (int dim = 1; dim <= 3; ++dim) {
    const Site e(static_cast<std::size_t>(dim), 0);
    for (int r = 0; r <= 4; ++r) {
      const auto boundary = vertex_boundary(ball(e, r));
      EXPECT_EQ(boundary, sphere(e, r + 1));
      EXPECT_TRUE(set_intersection(boundary, ball(e, r)).empty());
      EXPECT_EQ(closure(ball(e, r)), set_union(ball(e, r), boundary));
    }
  }
}

TEST(DistanceToSet, Basic) {
  const auto omega = ball({0, 0}, 2);
  EXPECT_EQ(distance_to_set(Site{1, 1}, omega), 0);
  EXPECT_EQ(distance_to_set(Site{5, 0}, omega), 3);
  EXPECT_EQ(distance_to_set(Site{3, 3}, omega), 4);
}

TEST(LatticeWindow, IndexIsBijection) {
  for (auto shape : {WindowShape::box, WindowShape::word_ball}) {
    const LatticeWindow w(2, 5, shape);
    EXPECT_EQ(w.size(), shape == WindowShape::box ? 121u : 61u);
    for (std::size_t i = 0; i < w.size(); ++i) {
      const Site s = w.site(i);
      EXPECT_TRUE(w.contains(s));
      EXPECT_EQ(w.index_of(s), i);
    }
  }
  EXPECT_EQ(LatticeWindow(3, 4, WindowShape::word_ball).size(),
            static_cast<std::size_t>(growth_function(4, 3)));
}

TEST(LatticeWindow, NeighboursFlagExterior) {
  const LatticeWindow w(2, 3);
  const auto corner = *w.index_of(Site{3, 3});
  const auto nb = w.neighbors(corner);
  ASSERT_EQ(nb.size(), 4u);
  EXPECT_FALSE(nb[0].has_value());
  EXPECT_EQ(w.site(*nb[1]), (Site{2, 3}));
  EXPECT_FALSE(nb[2].has_value());
  EXPECT_EQ(w.site(*nb[3]), (Site{3, 2}));
  for (std::size_t i = 0; i < w.size(); ++i) {
    const Site x = w.site(i);
    const auto n = w.neighbors(i);
    for (std::size_t k = 0; k < n.size(); ++k) {
      Site y = x;
      y[k / 2] += k % 2 == 0 ? 1 : -1;
      EXPECT_EQ(n[k].has_value(), w.contains(y));
      if (n[k]) {
        EXPECT_EQ(w.site(*n[k]), y);
      }
    }
  }
}

TEST(LatticeWindow, RejectsBadArguments) {
  EXPECT_THROW(LatticeWindow(0, 3), InputError);
  EXPECT_THROW(LatticeWindow(2, 0), InputError);
  EXPECT_THROW(parse_window_shape("disc"), InputError);
  EXPECT_EQ(LatticeWindow(2, 3).enlarged(2), LatticeWindow(2, 5));
}
