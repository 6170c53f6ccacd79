#include "carnot/runner.hpp"
#include "carnot/verify.hpp"
#include "carnot/zoo.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace carnot;

namespace
{

constexpr double kE = std::numbers::e;

VerifyContext context(CapacityCache& cache)
{
  VerifyContext ctx;
  ctx.cache = &cache;
  return ctx;
}

}  // namespace

TEST(Exponents, AlgebraProperties)
{
  for (const char* name : {"R2", "R3", "H1"}) {
    const Group g = Group::parse(name);
    const int nu = g.hom_dim();
    for (int pn = 2 * (nu - 1) + 1; pn <= 2 * nu + 4; ++pn)
      for (int qn = 2 * (nu - 1) + 1; qn <= pn; ++qn) {
        const double p = pn / 2.0, q = qn / 2.0;
        const Exponents e = Exponents::make(g, p, q);
        ASSERT_TRUE(e.s <= e.r) << name << " p=" << p << " q=" << q;
        ASSERT_EQ(e.s == e.r, p == q);
        ASSERT_EQ(e.kappa.has_value(), p != q);
        if (e.kappa) {
          ASSERT_NEAR(1.0 / e.kappa->value(), 1.0 / q - 1.0 / p, 1e-14);
        }
      }
  }
  const Exponents h = Exponents::make(Group::heisenberg(1), 4.0, 3.5);
  EXPECT_EQ(h.kappa->str(), "28");
  EXPECT_EQ(h.s.str(), "4");
  EXPECT_EQ(h.r.str(), "7");
  EXPECT_THROW(Exponents::make(Group::heisenberg(1), 4.0, 3.0), Error);
  EXPECT_THROW(Exponents::make(Group::abelian(2), 2.0, 3.0), Error);
}

TEST(Report, EvaluateRules)
{
  VerificationReport r;
  r.lhs = 1.09;
  r.rhs = 1.0;
  r.finish();
  EXPECT_TRUE(r.pass);
  EXPECT_NEAR(r.slack_used(), 0.9, 1e-12);
  r.lhs = 1.11;
  r.finish();
  EXPECT_FALSE(r.pass);
  r.lhs = 0.5;
  r.reason = "solver_failure";
  r.finish();
  EXPECT_FALSE(r.pass);

  VerificationReport a;
  a.kind = VerificationReport::Kind::agreement;
  a.slack = 1e-3;
  a.lhs = 10.0;
  a.rhs = 10.5;
  a.lhs_error = 0.3;
  a.rhs_error = 0.3;
  a.finish();
  EXPECT_TRUE(a.pass);
  a.rhs_error = 0.1;
  a.finish();
  EXPECT_FALSE(a.pass);
  a.lhs = NAN;
  a.finish();
  EXPECT_FALSE(a.pass);
}

TEST(Report, CsvRowQuotesFieldsWithCommas)
{
  VerificationReport r;
  r.id = "capacity_distortion/diag(2,1)/p=2,q=2";
  r.inputs.map = "diag(2,1)";
  r.notes = "a \"quoted\" note";
  std::ostringstream os;
  write_report_row(os, r);
  EXPECT_EQ(os.str().substr(0, 41), "\"capacity_distortion/diag(2,1)/p=2,q=2\",,");
  EXPECT_NE(os.str().find("\"a \"\"quoted\"\" note\""), std::string::npos);
}

TEST(Verify, IdentityFixturesHoldWithEquality)
{
  const Group g = Group::abelian(2);
  CapacityCache cache;
  VerifyContext ctx = context(cache);
  const auto f = make_zoo_entry(g, "identity").map;
  const Condenser e = ring_condenser(g, 1.0, kE);
  for (const auto& r : {verify_capacity_distortion(f, e, 2.0, 2.0, 32, ctx), verify_capacity_pushforward(f, e, 2.0, 2.0, 32, ctx),
                        verify_capacity_multiplicity(f, e, 2.0, 2.0, 32, ctx)}) {
    EXPECT_TRUE(r.pass) << r.id;
    EXPECT_NEAR(r.lhs, r.rhs, 1e-12 * r.rhs) << r.id;
  }
  EXPECT_EQ(cache.size(), 1u);
}

TEST(Verify, WindingMultiplicityBoundIsTight)
{
  // cp_s(f(E))^(1/s) with f(E) the same annulus, N = M = 2: equality up to discretization.
  const Group g = Group::abelian(2);
  CapacityCache cache;
  VerifyContext ctx = context(cache);
  const auto f = make_zoo_entry(g, "winding(k=2)").map;
  const VerificationReport r = verify_capacity_multiplicity(f, ring_condenser(g, 1.0, kE), 2.0, 2.0, 64, ctx);
  EXPECT_TRUE(r.pass) << r.notes;
  EXPECT_NEAR(r.lhs / r.rhs, 1.0, 0.02);
  EXPECT_NE(r.notes.find("M=2"), std::string::npos);
}

TEST(Verify, LinearMapCapacityDistortionHolds)
{
  const Group g = Group::abelian(2);
  CapacityCache cache;
  VerifyContext ctx = context(cache);
  const auto f = make_zoo_entry(g, "diag(2,1)").map;
  const VerificationReport r = verify_capacity_distortion(f, ring_condenser(g, 1.0, kE), 2.0, 2.0, 48, ctx);
  EXPECT_TRUE(r.pass);
  EXPECT_LT(r.lhs, r.rhs);
}

TEST(Verify, HeisenbergDilationPushforwardIsEquality)
{
  const Group h = Group::heisenberg(1);
  CapacityCache cache;
  VerifyContext ctx = context(cache);
  const auto f = make_zoo_entry(h, "dilation(t=2)").map;
  const VerificationReport r = verify_capacity_pushforward(f, ring_condenser(h, 1.0, 2.0), 4.0, 4.0, 16, ctx);
  EXPECT_TRUE(r.pass);
  EXPECT_NEAR(r.lhs / r.rhs, 1.0, 1e-6);
}

TEST(Verify, PushforwardNormWindingAndIdentity)
{
  const Group g = Group::abelian(2);
  CapacityCache cache;
  VerifyContext ctx = context(cache);
  const Region d = gauge_ball_region(g, g.identity(), 2.0);
  for (const auto& u : test_functions(g, 2.0)) {
    const VerificationReport id = verify_pushforward_norm(make_zoo_entry(g, "identity").map, u.fn, d, 2.0, 2.0, 64, ctx);
    EXPECT_TRUE(id.pass) << u.label;
    EXPECT_NEAR(id.lhs, id.rhs, 1e-12 * id.rhs);
    const VerificationReport w = verify_pushforward_norm(make_zoo_entry(g, "winding(k=2)").map, u.fn, d, 2.0, 2.0, 64, ctx);
    EXPECT_TRUE(w.pass) << u.label << " " << w.lhs << " " << w.rhs;
  }
  EXPECT_THROW(verify_pushforward_norm(make_zoo_entry(g, "identity").map, test_functions(g, 2.0)[0].fn, d, 2.0, 1.0, 32, ctx),
               Error);
}

TEST(Verify, PushforwardIdentityForWinding)
{
  const Group g = Group::abelian(2);
  const Region d = gauge_ball_region(g, g.identity(), 2.0);
  auto u = [](const Point& x) { return bump(x.norm() / 1.6); };
  auto expected = [](const Point& y) { return 3.0 * bump(y.norm() / 1.6); };
  const VerificationReport r =
      verify_pushforward_identity(make_zoo_entry(g, "winding(k=3)").map, u, expected, d, 2.0, 128, 0.02);
  EXPECT_TRUE(r.pass) << r.lhs << " vs " << r.rhs << " " << r.notes;
}

TEST(Verify, CompositionBoundHoldsForSmoothFunctions)
{
  CapacityCache cache;
  VerifyContext ctx = context(cache);
  for (const auto& [group, map, p, q] : std::vector<std::tuple<const char*, const char*, double, double>>{
           {"R2", "winding(k=3)", 3.0, 2.0}, {"R2", "diag(2,1)", 2.0, 2.0}, {"H1", "anisotropic(a=2,b=1)", 4.0, 4.0}}) {
    const Group g = Group::parse(group);
    const Region d = gauge_ball_region(g, g.identity(), 1.5);
    for (const auto& u : test_functions(g, 1.5)) {
      const VerificationReport r =
          verify_composition_bound(make_zoo_entry(g, map).map, u.fn, d, p, q, g.is_abelian() ? 64 : 16, ctx, u.label);
      EXPECT_TRUE(r.pass) << r.id << " " << r.lhs << " " << r.rhs;
    }
  }
}

TEST(Verify, SolverFailureBecomesReason)
{
  const Group g = Group::abelian(2);
  VerifyContext ctx;
  ctx.solver.max_iters = 1;
  const VerificationReport r =
      verify_capacity_distortion(make_zoo_entry(g, "identity").map, ring_condenser(g, 1.0, kE), 2.0, 2.0, 32, ctx);
  EXPECT_EQ(r.reason, "solver_failure");
  EXPECT_FALSE(r.pass);
}

TEST(Liouville, PlanarRingCapacitiesDecayLikeTheOracle)
{
  const Group g = Group::abelian(2);
  CapacityCache cache;
  VerifyContext ctx = context(cache);
  const auto res = liouville_decay_experiment(make_zoo_entry(g, "identity").map, 0.75, {1, 2, 4, 8, 16, 32}, 2.0, 2.0,
                                              64, ctx);
  EXPECT_TRUE(res.in_hypothesis);
  EXPECT_TRUE(res.nonincreasing);
  EXPECT_TRUE(res.converged);
  EXPECT_GE(res.decay_factor, 10.0);
  for (std::size_t i = 0; i < res.radii.size(); ++i) {
    const double exact = ring_capacity_oracle(2, 2.0, 0.75, res.radii[i]);
    EXPECT_NEAR(res.capacities[i] / exact, 1.0, 0.1) << "R=" << res.radii[i];
  }
}

TEST(Liouville, OutOfHypothesisIsFlaggedNotFailed)
{
  const Group g = Group::abelian(2);
  VerifyContext ctx;
  const auto res = liouville_decay_experiment(make_zoo_entry(g, "identity").map, 0.75, {1, 2, 4}, 3.0, 3.0, 16, ctx);
  EXPECT_FALSE(res.in_hypothesis);
  EXPECT_NE(res.note.find("out_of_hypothesis"), std::string::npos);
}
