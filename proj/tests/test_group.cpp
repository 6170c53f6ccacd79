#include "carnot/estimates.hpp"
#include "carnot/group.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace carnot;

namespace
{

Point random_point(const Group& g, Rng& rng, double scale = 3.0)
{
  Point a(g.dim());
  for (int k = 0; k < g.dim(); ++k) a[k] = rng.uniform(-scale, scale);
  return a;
}

double rel(const Point& a, const Point& b) { return (a - b).norm() / std::max(1.0, std::max(a.norm(), b.norm())); }

class GroupAxioms : public ::testing::TestWithParam<const char*>
{
};

}  // namespace

TEST_P(GroupAxioms, AssociativityIdentityInverse)
{
  const Group g = Group::parse(GetParam());
  Rng rng(11);
  for (int i = 0; i < 20000; ++i) {
    const Point a = random_point(g, rng), b = random_point(g, rng), c = random_point(g, rng);
    ASSERT_LT(rel(compose(g, compose(g, a, b), c), compose(g, a, compose(g, b, c))), 1e-12);
    ASSERT_LT(rel(compose(g, a, g.identity()), a), 1e-15);
    ASSERT_LT(rel(compose(g, g.identity(), a), a), 1e-15);
    ASSERT_LT(compose(g, a, inverse(g, a)).norm(), 1e-12);
    ASSERT_LT(compose(g, inverse(g, a), a).norm(), 1e-12);
  }
}

TEST_P(GroupAxioms, DilationsAreAutomorphisms)
{
  const Group g = Group::parse(GetParam());
  Rng rng(12);
  for (int i = 0; i < 20000; ++i) {
    const Point a = random_point(g, rng), b = random_point(g, rng);
    const double t = std::exp(rng.uniform(-2.0, 2.0)), s = std::exp(rng.uniform(-2.0, 2.0));
    ASSERT_LT(rel(dilate(g, t, compose(g, a, b)), compose(g, dilate(g, t, a), dilate(g, t, b))), 1e-12);
    ASSERT_LT(rel(dilate(g, t, dilate(g, s, a)), dilate(g, t * s, a)), 1e-12);
  }
}

TEST_P(GroupAxioms, GaugeHomogeneousSymmetricDefinite)
{
  const Group g = Group::parse(GetParam());
  Rng rng(13);
  EXPECT_EQ(gauge_norm(g, g.identity()), 0.0);
  for (int i = 0; i < 20000; ++i) {
    const Point a = random_point(g, rng);
    const double t = std::exp(rng.uniform(-3.0, 3.0));
    const double r = gauge_norm(g, a);
    ASSERT_GT(r, 0.0);
    ASSERT_NEAR(gauge_norm(g, dilate(g, t, a)), t * r, 1e-12 * t * r);
    ASSERT_NEAR(gauge_norm(g, inverse(g, a)), r, 1e-14 * r);
  }
}

TEST_P(GroupAxioms, TriangleConstantIsStable)
{
  const Group g = Group::parse(GetParam());
  Rng rng_a(21), rng_b(22);
  const double c1 = measured_triangle_constant(g, 20000, rng_a);
  const double c2 = measured_triangle_constant(g, 20000, rng_b);
  EXPECT_TRUE(std::isfinite(c1));
  EXPECT_LE(c1, g.triangle_constant() + 1e-9);
  EXPECT_NEAR(c1, c2, 5e-3 * c1);
}

INSTANTIATE_TEST_SUITE_P(Groups, GroupAxioms, ::testing::Values("R2", "R3", "H1"));

TEST(Group, ParseAndDimensions)
{
  const Group h = Group::parse("H1");
  EXPECT_EQ(h.dim(), 3);
  EXPECT_EQ(h.hom_dim(), 4);
  EXPECT_EQ(h.horizontal_dim(), 2);
  EXPECT_EQ(Group::parse("heisenberg(2)").hom_dim(), 6);
  EXPECT_EQ(Group::parse("abelian(3)"), Group::abelian(3));
  EXPECT_EQ(Group::parse("R3").hom_dim(), 3);
  EXPECT_THROW(Group::parse("Q2"), Error);
  EXPECT_THROW(Group::parse("R"), Error);
  EXPECT_THROW(Group::heisenberg(5), Error);
}

TEST(Group, HeisenbergLawMatchesHandComputation)
{
  const Group h = Group::heisenberg(1);
  Point a(3), b(3);
  a << 1, 2, 3;
  b << -1, 4, 0.5;
  // t'' = 3 + 0.5 + 2 (x' y - x y') = 3.5 + 2 (-1 * 2 - 1 * 4) = -8.5
  const Point c = compose(h, a, b);
  EXPECT_DOUBLE_EQ(c[0], 0.0);
  EXPECT_DOUBLE_EQ(c[1], 6.0);
  EXPECT_DOUBLE_EQ(c[2], -8.5);
  EXPECT_THROW(compose(h, a, Point::Zero(2)), Error);
}

TEST(Group, KoranyiGaugeValues)
{
  const Group h = Group::heisenberg(1);
  Point a(3);
  a << 1, 1, 2;
  EXPECT_NEAR(gauge_norm(h, a), std::pow(8.0, 0.25), 1e-15);
  a << 0, 0, 16;
  EXPECT_NEAR(gauge_norm(h, a), 4.0, 1e-15);
}

TEST(Group, CommutatorIsMinusFourT)
{
  const Group h = Group::heisenberg(1);
  struct Field
  {
    ScalarField u, dt;
  };
  const std::vector<Field> fields{
      {[](const Point& x) { return std::sin(x[0]) * std::cos(x[1]) * std::exp(x[2]); },
       [](const Point& x) { return std::sin(x[0]) * std::cos(x[1]) * std::exp(x[2]); }},
      {[](const Point& x) { return std::exp(0.3 * x[2]) * (1.0 + x[0] * x[1]); },
       [](const Point& x) { return 0.3 * std::exp(0.3 * x[2]) * (1.0 + x[0] * x[1]); }},
      {[](const Point& x) { return std::sin(x[0] * x[2]) + x[1] * x[1] * x[2]; },
       [](const Point& x) { return x[0] * std::cos(x[0] * x[2]) + x[1] * x[1]; }},
      {[](const Point& x) { return std::cos(x[0] + 2.0 * x[1] - x[2]); },
       [](const Point& x) { return std::sin(x[0] + 2.0 * x[1] - x[2]); }},
      {[](const Point& x) { return 1.0 / (1.0 + x[0] * x[0] + x[1] * x[1] + x[2] * x[2]); },
       [](const Point& x) {
         const double d = 1.0 + x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
         return -2.0 * x[2] / (d * d);
       }},
  };
  Point x(3);
  x << 0.3, -0.4, 0.2;
  for (const auto& [u, dt] : fields) {
    const double exact = -4.0 * dt(x);
    EXPECT_NEAR(vertical_derivative(h, u, x, 1e-4), dt(x), 1e-7);
    const double e1 = std::abs(frame_commutator(h, u, x, 0, 1, 1e-2) - exact);
    const double e2 = std::abs(frame_commutator(h, u, x, 0, 1, 5e-3) - exact);
    EXPECT_GE(std::log2(e1 / e2), 1.8);
  }
}

TEST(Group, UnitBallVolume)
{
  EXPECT_NEAR(unit_ball_volume(Group::abelian(2)), std::numbers::pi, 1e-14);
  EXPECT_NEAR(unit_ball_volume(Group::abelian(3)), 4.0 * std::numbers::pi / 3.0, 1e-14);
  EXPECT_NEAR(unit_ball_volume(Group::heisenberg(1)), std::numbers::pi * std::numbers::pi / 2.0, 1e-13);
  Rng rng(5);
  const auto mc = ball_volume(Group::heisenberg(1), 1.0, 400000, rng);
  EXPECT_NEAR(mc.value, unit_ball_volume(Group::heisenberg(1)), 4.0 * mc.std_error);
  Rng rng2(6);
  const auto big = ball_volume(Group::heisenberg(1), 2.0, 400000, rng2);
  EXPECT_NEAR(big.value / 16.0, unit_ball_volume(Group::heisenberg(1)), 4.0 * big.std_error / 16.0);
}

TEST(Rng, ForkIsDeterministicAndIndependentOfParentState)
{
  Rng a(42), b(42);
  a.next();
  EXPECT_EQ(a.fork("x").next(), b.fork("x").next());
  EXPECT_NE(b.fork("x").next(), b.fork("y").next());
  for (int i = 0; i < 1000; ++i) {
    const double u = b.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
  }
}
