#include "carnot/grid.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

using namespace carnot;

namespace
{

Box unit_box(int d, double lo = -1.0, double hi = 1.0)
{
  return {Point::Constant(d, lo), Point::Constant(d, hi)};
}

}  // namespace

TEST(Grid, IndexRoundTrip)
{
  const Grid g = Grid::uniform(unit_box(3), std::vector<int>{4, 5, 6});
  EXPECT_EQ(g.node_count(), 5u * 6u * 7u);
  EXPECT_EQ(g.cell_count(), 4u * 5u * 6u);
  int multi[kMaxDim];
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    g.multi_index(i, multi);
    ASSERT_EQ(g.index(multi), i);
  }
  EXPECT_EQ(g.node(0), Point::Constant(3, -1.0));
  EXPECT_EQ(g.node(g.node_count() - 1), Point::Constant(3, 1.0));
  EXPECT_EQ(g.stride(2), 1u);
}

TEST(Grid, BoundaryNodes)
{
  const Grid g = Grid::uniform(unit_box(2), 4);
  std::size_t boundary = 0;
  for (std::size_t i = 0; i < g.node_count(); ++i) boundary += g.on_boundary(i);
  EXPECT_EQ(boundary, 16u);
}

TEST(Grid, InterpolationReproducesMultilinear)
{
  const Grid g = Grid::uniform(unit_box(3, -2.0, 3.0), 7);
  auto f = [](const Point& x) { return 1.0 + 2.0 * x[0] - x[1] + 0.5 * x[2] + 0.25 * x[0] * x[1] * x[2]; };
  const GridFunction u = GridFunction::sample(g, f);
  Point x(3);
  x << 0.37, -1.2, 2.9;
  EXPECT_NEAR(u.interpolate(x), f(x), 1e-12);
  x << 5.0, 0.0, 0.0;
  EXPECT_EQ(u.interpolate(x, -7.0), -7.0);
}

TEST(Grid, CoarseningKeepsEveryOtherNode)
{
  const Grid g = Grid::uniform(unit_box(2), 8);
  ASSERT_TRUE(g.can_coarsen());
  const Grid c = g.coarsened();
  EXPECT_EQ(c.cells(0), 4);
  EXPECT_EQ(c, Grid::uniform(unit_box(2), 4));
  EXPECT_FALSE(Grid::uniform(unit_box(2), 6).coarsened().can_coarsen());
  EXPECT_THROW(Grid::uniform(unit_box(2), 3).coarsened(), Error);
}

TEST(Grid, GradedAxisRefinesTowardCenter)
{
  const auto a = graded_axis(-4.0, 4.0, 32, 0.05);
  ASSERT_EQ(a.size(), 33u);
  EXPECT_EQ(a.front(), -4.0);
  EXPECT_EQ(a.back(), 4.0);
  EXPECT_EQ(a[16], 0.0);
  const double center = a[17] - a[16];
  EXPECT_NEAR(center, 0.05, 0.01);
  for (std::size_t i = 1; i < a.size(); ++i) {
    ASSERT_GT(a[i], a[i - 1]);
    ASSERT_NEAR(a[i] + a[a.size() - 1 - i], 0.0, 1e-12);
  }
  EXPECT_GT(a[1] - a[0], 10.0 * center);
  const auto u = graded_axis(-1.0, 1.0, 8, 1.0);
  EXPECT_NEAR(u[1] - u[0], 0.25, 1e-15);
  EXPECT_THROW(graded_axis(-1.0, 1.0, 7, 0.1), Error);
}

TEST(Grid, FromAxesValidates)
{
  EXPECT_THROW(Grid::from_axes({{0.0, 1.0, 0.5}}), Error);
  EXPECT_THROW(Grid::from_axes({{0.0}}), Error);
  const Grid g = Grid::from_axes({{0.0, 0.1, 1.0}, {0.0, 2.0}});
  EXPECT_FALSE(g.is_uniform());
  EXPECT_NEAR(g.max_spacing(), 2.0, 1e-15);
}

TEST(Grid, BoxValidation)
{
  Box bad{Point::Constant(2, 1.0), Point::Constant(2, 1.0)};
  EXPECT_THROW(Grid::uniform(bad, 4), Error);
  const Box b = unit_box(2);
  EXPECT_DOUBLE_EQ(b.volume(), 4.0);
  EXPECT_TRUE(b.contains(Point::Zero(2)));
  EXPECT_FALSE(b.contains(Point::Constant(2, 1.5)));
}

TEST(GridFunctionIo, CsvRoundTripIsExact)
{
  const Grid g = Grid::from_axes({{-1.0, -0.3, 0.25, 1.0}, {0.0, 1.0 / 3.0, 2.0}});
  const GridFunction u = GridFunction::sample(g, [](const Point& x) { return std::sin(x[0]) / 3.0 + x[1]; });
  std::stringstream ss;
  write_csv(ss, u);
  const GridFunction v = read_csv(ss);
  EXPECT_EQ(v.grid(), u.grid());
  EXPECT_EQ(v.values(), u.values());
}

TEST(GridFunctionIo, BinaryRoundTripIsExact)
{
  const Grid g = Grid::uniform(unit_box(3), std::vector<int>{2, 3, 4});
  const GridFunction u = GridFunction::sample(g, [](const Point& x) { return std::exp(x[0] * x[1]) - x[2] / 7.0; });
  std::stringstream ss;
  write_binary(ss, u);
  const GridFunction v = read_binary(ss);
  EXPECT_EQ(v.grid(), u.grid());
  EXPECT_EQ(v.values(), u.values());
}

TEST(GridFunctionIo, RejectsMalformedCsv)
{
  std::stringstream ss("# not a grid function\n1,2\n");
  EXPECT_THROW(read_csv(ss), Error);
}
