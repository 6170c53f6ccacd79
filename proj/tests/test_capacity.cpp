#include "carnot/capacity.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace carnot;

namespace
{

constexpr double kE = std::numbers::e;

double rel_error(double value, double exact) { return (value - exact) / exact; }

}  // namespace

TEST(RingOracle, ClosedForms)
{
  EXPECT_NEAR(ring_capacity_oracle(2, 2.0, 1.0, kE), 2.0 * std::numbers::pi, 1e-12);
  EXPECT_NEAR(ring_capacity_oracle(3, 2.0, 1.0, 2.0), 4.0 * std::numbers::pi / (1.0 - 0.5), 1e-12);
  // p -> n limit of the power-law branch.
  EXPECT_NEAR(ring_capacity_oracle(2, 2.0 + 1e-7, 1.0, kE), ring_capacity_oracle(2, 2.0, 1.0, kE), 1e-5);
  EXPECT_THROW(ring_capacity_oracle(2, 1.0, 1.0, 2.0), Error);
  EXPECT_THROW(ring_capacity_oracle(2, 2.0, 2.0, 1.0), Error);
}

TEST(SolveCapacity, PlanarRingWithinFivePercent)
{
  const Group g = Group::abelian(2);
  const CapacityResult r = solve_capacity(ring_condenser(g, 1.0, kE), g, 2.0, 128);
  EXPECT_TRUE(r.converged) << r.status;
  EXPECT_LT(std::abs(rel_error(r.value, 2.0 * std::numbers::pi)), 0.05);
  EXPECT_GT(r.levels, 1);
}

TEST(SolveCapacity, ErrorShrinksUnderRefinement)
{
  const Group g = Group::abelian(2);
  const Condenser c = ring_condenser(g, 1.0, kE);
  for (double p : {2.0, 3.0}) {
    const double exact = ring_capacity_oracle(2, p, 1.0, kE);
    double last = INFINITY;
    for (int res : {32, 64, 128}) {
      const double err = std::abs(rel_error(solve_capacity(c, g, p, res).value, exact));
      EXPECT_LT(err, last) << "p=" << p << " res=" << res;
      last = err;
    }
    EXPECT_LT(last, 0.05);
  }
}

TEST(SolveCapacity, MinimizerIsAdmissibleAndValueIsItsEnergy)
{
  const Group g = Group::abelian(2);
  const Condenser c = ring_condenser(g, 1.0, 2.0);
  const CapacityResult r = solve_capacity(c, g, 2.5, 32);
  const DiscreteCondenser dc = discretize(c, g, 32);
  for (std::size_t i = 0; i < r.minimizer.size(); ++i) {
    ASSERT_GE(r.minimizer[i], 0.0);
    ASSERT_LE(r.minimizer[i], 1.0);
    if (dc.state[i] == NodeState::one) {
      ASSERT_EQ(r.minimizer[i], 1.0);
    }
    if (dc.state[i] == NodeState::zero) {
      ASSERT_EQ(r.minimizer[i], 0.0);
    }
  }
  EXPECT_NEAR(KuhnEnergy(g, dc.grid, 2.5, 0.0, dc.cell_weight).value(r.minimizer.values()), r.value, 1e-12 * r.value);
}

TEST(SolveCapacity, NestedAndSingleLevelAgree)
{
  const Group g = Group::abelian(2);
  const Condenser c = ring_condenser(g, 1.0, kE);
  SolverOptions flat;
  flat.nested = false;
  const CapacityResult a = solve_capacity(c, g, 2.0, 32);
  const CapacityResult b = solve_capacity(c, g, 2.0, 32, flat);
  EXPECT_EQ(b.levels, 1);
  EXPECT_NEAR(a.value, b.value, 1e-4 * a.value);
}

TEST(SolveCapacity, DilationScalingIsExactOnDilatedGrids)
{
  for (const char* name : {"R2", "H1"}) {
    const Group g = Group::parse(name);
    const double p = 2.0;
    const VerificationReport r = capacity_scaling_check(ring_condenser(g, 1.0, 2.0), g, p, 2.0, 16, 0.05);
    EXPECT_TRUE(r.pass) << name << " " << r.notes;
    EXPECT_NEAR(r.lhs / r.rhs, 1.0, 1e-6) << name;
  }
}

TEST(SolveCapacity, NonConvergenceIsReported)
{
  const Group g = Group::abelian(2);
  SolverOptions o;
  o.max_iters = 1;
  const CapacityResult r = solve_capacity(ring_condenser(g, 1.0, kE), g, 2.0, 32, o);
  EXPECT_FALSE(r.converged);
}

TEST(SolveCapacity, RejectsBadArguments)
{
  const Group g = Group::abelian(2);
  const Condenser c = ring_condenser(g, 1.0, kE);
  EXPECT_THROW(solve_capacity(c, g, 1.0, 32), Error);
  EXPECT_THROW(solve_capacity(c, g, 2.0, 1), Error);
  EXPECT_THROW(ring_condenser(g, 2.0, 1.0), Error);
}

TEST(Discretize, CoarseGridIsADiscretizationError)
{
  const Group g = Group::abelian(2);
  try {
    discretize(ring_condenser(g, 1.0, kE), g, 2);
    FAIL() << "expected a discretization error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::discretization);
  }
}

TEST(Discretize, NodeCountsAddUp)
{
  const Group g = Group::heisenberg(1);
  const DiscreteCondenser dc = discretize(ring_condenser(g, 1.0, 2.0), g, 16);
  EXPECT_EQ(dc.free_nodes + dc.zero_nodes + dc.one_nodes + dc.outside_nodes, dc.grid.node_count());
  EXPECT_GT(dc.free_nodes, 0u);
}

TEST(Condenser, ImageUnderIdentityLikeDilation)
{
  const Group g = Group::abelian(2);
  const Condenser c = ring_condenser(g, 1.0, 2.0);
  const Condenser d = dilated(c, g, 3.0);
  Point x(2);
  x << 4.5, 0.0;
  EXPECT_TRUE(d.domain(x));
  x << 2.0, 0.0;
  EXPECT_TRUE(d.plate1(x));
  x << 6.5, 0.0;
  EXPECT_TRUE(d.plate0(x));
}

TEST(CapacityCache, MemoizesByKey)
{
  const Group g = Group::abelian(2);
  CapacityCache cache;
  const Condenser c = ring_condenser(g, 1.0, kE);
  const CapacityResult& a = cache.solve(c, g, 2.0, 16);
  const CapacityResult& b = cache.solve(c, g, 2.0, 16);
  EXPECT_EQ(&a, &b);
  cache.solve(c, g, 3.0, 16);
  EXPECT_EQ(cache.size(), 2u);
}

TEST(CapacityBatch, ResultsFollowJobOrder)
{
  const Group g = Group::abelian(2);
  std::vector<CapacityJob> jobs;
  for (double p : {3.0, 2.0, 2.5}) jobs.push_back({ring_condenser(g, 1.0, kE), g, p, 16, {}});
  const auto par = solve_capacity_batch(jobs, 3);
  const auto seq = solve_capacity_batch(jobs, 1);
  ASSERT_EQ(par.size(), 3u);
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    EXPECT_EQ(par[i].p, jobs[i].p);
    EXPECT_EQ(par[i].value, seq[i].value);
  }
}
