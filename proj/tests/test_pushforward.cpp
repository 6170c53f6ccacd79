#include "carnot/pushforward.hpp"
#include "carnot/zoo.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace carnot;

namespace
{

double bump(double s) { return s < 1.0 ? std::exp(1.0 - 1.0 / (1.0 - s * s)) : 0.0; }

Grid square(double r, int cells) { return Grid::uniform({Point::Constant(2, -r), Point::Constant(2, r)}, cells); }

}  // namespace

TEST(PushForward, WindingMultipliesRadialFunctionsByK)
{
  const Group g = Group::abelian(2);
  auto radial = [](const Point& x) { return bump(x.norm() / 1.5); };
  for (int k : {2, 3}) {
    const ZooEntry e = make_zoo_entry(g, "winding(k=" + std::to_string(k) + ")");
    const GridFunction u = GridFunction::sample(square(2.0, 128), radial);
    const Grid target = square(2.0, 128);
    const GridFunction v = push_forward(*e.map, u, 1.0, target);
    double err = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) err = std::max(err, std::abs(v[i] - k * radial(target.node(i))));
    EXPECT_LT(err, 0.02 * k);
  }
}

TEST(PushForward, IdentityReproducesTheFunction)
{
  const Group g = Group::abelian(2);
  const GridFunction u = GridFunction::sample(square(2.0, 32), [](const Point& x) { return bump(x.norm()); });
  const GridFunction v = push_forward(*make_zoo_entry(g, "identity").map, u, 1.0, u.grid());
  for (std::size_t i = 0; i < u.size(); ++i) ASSERT_NEAR(v[i], u[i], 1e-14);
}

TEST(PushForward, PositivelyHomogeneousAndAdditive)
{
  const Group g = Group::abelian(2);
  const ZooEntry e = make_zoo_entry(g, "winding(k=2)");
  const Grid src = square(2.0, 48), dst = square(2.0, 48);
  Point c1(2), c2(2);
  c1 << 0.8, 0.3;
  c2 << -0.9, -0.2;
  const GridFunction a = GridFunction::sample(src, [&](const Point& x) { return bump((x - c1).norm() / 0.4); });
  const GridFunction b = GridFunction::sample(src, [&](const Point& x) { return bump((x - c2).norm() / 0.4); });
  GridFunction sum(src);
  GridFunction scaled(src);
  for (std::size_t i = 0; i < src.node_count(); ++i) {
    sum[i] = a[i] + b[i];
    scaled[i] = 2.5 * a[i];
  }
  const GridFunction pa = push_forward(*e.map, a, 1.0, dst), pb = push_forward(*e.map, b, 1.0, dst);
  const GridFunction ps = push_forward(*e.map, sum, 1.0, dst), pk = push_forward(*e.map, scaled, 1.0, dst);
  for (std::size_t i = 0; i < dst.node_count(); ++i) {
    ASSERT_NEAR(ps[i], pa[i] + pb[i], 1e-12);
    ASSERT_NEAR(pk[i], 2.5 * pa[i], 1e-12);
  }
  const GridFunction lam = push_forward(*e.map, a, 0.5, dst);
  for (std::size_t i = 0; i < dst.node_count(); ++i) ASSERT_NEAR(lam[i], 0.5 * pa[i], 1e-12);
}

TEST(PushForward, SupportMatchesImageOfSupport)
{
  const Group g = Group::abelian(2);
  Point c(2);
  c << 0.7, 0.4;
  for (const char* map : {"identity", "diag(2,1)", "winding(k=2)", "winding(k=3)"}) {
    const ZooEntry e = make_zoo_entry(g, map);
    const GridFunction u = GridFunction::sample(square(2.0, 64), [&](const Point& x) { return bump((x - c).norm() / 0.5); });
    const Grid dst = Grid::uniform(image_box(*e.map, u.grid().box()), 64);
    const GridFunction v = push_forward(*e.map, u, 1.0, dst);
    const SupportCheck s = support_check(*e.map, u, v);
    EXPECT_TRUE(s.ok()) << map << " forward=" << s.forward_misses << " backward=" << s.backward_misses;
    EXPECT_GT(s.source_support, 0u);
    EXPECT_GT(s.target_support, 0u);
  }
}

TEST(PushForward, SupRuleTakesLargestPreimageValue)
{
  const Group g = Group::abelian(2);
  const ZooEntry e = make_zoo_entry(g, "winding(k=2)");
  const GridFunction u = GridFunction::sample(square(2.0, 64), [](const Point& x) { return bump(x.norm() / 1.5); });
  const GridFunction v = push_forward(*e.map, u, 1.0, u.grid(), std::nullopt, PushRule::sup);
  for (std::size_t i = 0; i < v.size(); ++i) ASSERT_LE(v[i], 1.0 + 1e-12);
}

TEST(PushForward, RejectsFunctionsTouchingTheBoundary)
{
  const Group g = Group::abelian(2);
  const ZooEntry e = make_zoo_entry(g, "identity");
  const GridFunction u(square(1.0, 8), 1.0);
  try {
    push_forward(*e.map, u, 1.0, u.grid());
    FAIL() << "expected precondition error";
  } catch (const Error& err) {
    EXPECT_EQ(err.code(), ErrorCode::precondition);
  }
  EXPECT_THROW(push_forward(*e.map, u, 0.0, u.grid()), Error);
}

TEST(PushForward, HeisenbergDilationTransportsSupport)
{
  const Group h = Group::heisenberg(1);
  const ZooEntry e = make_zoo_entry(h, "dilation(t=2)");
  const Box box{Point::Constant(3, -1.0), Point::Constant(3, 1.0)};
  const GridFunction u = GridFunction::sample(Grid::uniform(box, 16), [&](const Point& x) { return bump(gauge_norm(h, x) / 0.8); });
  const Grid dst = Grid::uniform(image_box(*e.map, box), 16);
  const GridFunction v = push_forward(*e.map, u, 1.0, dst);
  EXPECT_TRUE(support_check(*e.map, u, v).ok());
  for (std::size_t i = 0; i < dst.node_count(); ++i)
    ASSERT_NEAR(v[i], bump(gauge_norm(h, dilate(h, 0.5, dst.node(i))) / 0.8), 1e-12);
}
