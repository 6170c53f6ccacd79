#pragma once

// Numerical checks of capacity and norm inequalities for concrete mappings.
// Every check returns a VerificationReport holding the raw numbers; solver
// non-convergence is recorded as reason "solver_failure".

#include "carnot/calculus.hpp"
#include "carnot/capacity.hpp"
#include "carnot/common.hpp"
#include "carnot/distortion.hpp"
#include "carnot/format.hpp"
#include "carnot/grid.hpp"
#include "carnot/kuhn.hpp"
#include "carnot/mapping.hpp"
#include "carnot/pushforward.hpp"
#include "carnot/report.hpp"

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace carnot
{

struct VerifyContext
{
  double slack = 0.10;
  SolverOptions solver;
  CapacityCache* cache = nullptr;  // optional memo shared across checks
};

namespace detail
{

inline const CapacityResult& solve_with(VerifyContext& ctx, const Condenser& c, const Group& g, double p, int resolution,
                                        std::vector<CapacityResult>& keep)
{
  if (ctx.cache) return ctx.cache->solve(c, g, p, resolution);
  keep.push_back(solve_capacity(c, g, p, resolution, ctx.solver));
  return keep.back();
}

inline std::string pq_tag(double p, double q) { return "p=" + format_double(p) + ",q=" + format_double(q); }

}  // namespace detail

// The set domain union F1 of a condenser, as a region.
inline Region condenser_hull(const Condenser& e)
{
  return {e.box, [d = e.domain, f1 = e.plate1](const Point& x) { return d(x) || f1(x); }};
}

// ||u | L^1_p(region)|| = (integral of |grad_H u|^p)^(1/p).
inline double sobolev_seminorm(const Group& g, const GridFunction& u, double p, const Predicate& mask = {})
{
  return std::pow(p_energy(g, u, p, mask), 1.0 / p);
}

// cp_q(E)^(1/q) <= K_{p,q}(f; A) N(f, A)^(1/p) cp_p(f(E))^(1/p) with A the hull of E.
inline VerificationReport verify_capacity_distortion(const MappingPtr& f, const Condenser& e, double p, double q, int resolution,
                                          VerifyContext& ctx)
{
  const Group& g = f->source();
  const Region a = condenser_hull(e);
  const DistortionReport k = distortion_coefficient(*f, a, p, q, resolution);
  const int n = multiplicity(*f, a);
  std::vector<CapacityResult> keep;
  keep.reserve(2);
  const CapacityResult& left = detail::solve_with(ctx, e, g, q, resolution, keep);
  const CapacityResult& right = detail::solve_with(ctx, image_condenser(f, e), g, p, resolution, keep);

  VerificationReport r;
  r.id = "capacity_distortion/" + f->name() + "/" + detail::pq_tag(p, q);
  r.property = "capacity_distortion";
  r.lhs = std::pow(left.value, 1.0 / q);
  r.rhs = k.coefficient * std::pow(n, 1.0 / p) * std::pow(right.value, 1.0 / p);
  r.slack = ctx.slack;
  r.inputs = {g.name(), f->name(), e.label, p, q, resolution};
  r.notes = "K=" + format_double(k.coefficient) + " N=" + std::to_string(n) + " cp_q=" + format_double(left.value) +
            " cp_p_image=" + format_double(right.value);
  if (!left.converged || !right.converged) r.reason = "solver_failure";
  r.finish();
  return r;
}

// cp_s(f(E))^(1/s) <= K_{p,q}(f; A)^(nu-1) cp_r(E)^(1/r).
inline VerificationReport verify_capacity_pushforward(const MappingPtr& f, const Condenser& e, double p, double q,
                                             int resolution, VerifyContext& ctx)
{
  const Group& g = f->source();
  const Exponents ex = Exponents::make(g, p, q);
  const Region a = condenser_hull(e);
  const DistortionReport k = distortion_coefficient(*f, a, p, q, resolution);
  const double s = ex.s.value(), rr = ex.r.value();
  std::vector<CapacityResult> keep;
  keep.reserve(2);
  const CapacityResult& image = detail::solve_with(ctx, image_condenser(f, e), g, s, resolution, keep);
  const CapacityResult& source = detail::solve_with(ctx, e, g, rr, resolution, keep);

  VerificationReport r;
  r.id = "capacity_pushforward/" + f->name() + "/" + detail::pq_tag(p, q);
  r.property = "capacity_pushforward";
  r.lhs = std::pow(image.value, 1.0 / s);
  r.rhs = std::pow(k.coefficient, ex.nu - 1) * std::pow(source.value, 1.0 / rr);
  r.slack = ctx.slack;
  r.inputs = {g.name(), f->name(), e.label, p, q, resolution};
  r.notes = "s=" + ex.s.str() + " r=" + ex.r.str() + " K=" + format_double(k.coefficient) +
            " cp_s_image=" + format_double(image.value) + " cp_r=" + format_double(source.value);
  if (!image.converged || !source.converged) r.reason = "solver_failure";
  r.finish();
  return r;
}

// cp_s(f(E))^(1/s) <= K^(nu-1) N(f, A)^((s-1)/s) / M(f, C) cp_r(E)^(1/r), with
// M(f, C) the least index sum over preimages in C.
inline VerificationReport verify_capacity_multiplicity(const MappingPtr& f, const Condenser& e, double p, double q,
                                            int resolution, VerifyContext& ctx)
{
  const Group& g = f->source();
  const Exponents ex = Exponents::make(g, p, q);
  const Region a = condenser_hull(e);
  const Region c{e.box, e.plate1};
  const int m = index_sum_infimum(*f, c, {g.identity()});
  require(m > 0, ErrorCode::precondition, "M(f, C) = 0: C has no sampled image points");
  const int n = multiplicity(*f, a);
  const DistortionReport k = distortion_coefficient(*f, a, p, q, resolution);
  const double s = ex.s.value(), rr = ex.r.value();
  std::vector<CapacityResult> keep;
  keep.reserve(2);
  const CapacityResult& image = detail::solve_with(ctx, image_condenser(f, e), g, s, resolution, keep);
  const CapacityResult& source = detail::solve_with(ctx, e, g, rr, resolution, keep);

  VerificationReport r;
  r.id = "capacity_multiplicity/" + f->name() + "/" + detail::pq_tag(p, q);
  r.property = "capacity_multiplicity";
  r.lhs = std::pow(image.value, 1.0 / s);
  r.rhs = std::pow(k.coefficient, ex.nu - 1) * std::pow(n, (s - 1.0) / s) / m * std::pow(source.value, 1.0 / rr);
  r.slack = ctx.slack;
  r.inputs = {g.name(), f->name(), e.label, p, q, resolution};
  r.notes = "s=" + ex.s.str() + " r=" + ex.r.str() + " K=" + format_double(k.coefficient) + " N=" + std::to_string(n) +
            " M=" + std::to_string(m) + " Lambda=1/" + std::to_string(m);
  if (!image.converged || !source.converged) r.reason = "solver_failure";
  r.finish();
  return r;
}

// ||f_* u | L^1_s(f(D))|| <= Lambda N(f, D)^((s-1)/s) K_{p,q}(f; D)^(nu-1) ||u | L^1_r(D)||.
// u is sampled on a uniform grid over d.box; f_* u on a uniform grid over
// the image box, both at `resolution`.
inline VerificationReport verify_pushforward_norm(const MappingPtr& f, const std::function<double(const Point&)>& u,
                                               const Region& d, double p, double q, int resolution,
                                               VerifyContext& ctx, double lambda = 1.0)
{
  const Group& g = f->source();
  const Exponents ex = Exponents::make(g, p, q);
  const Grid src = Grid::uniform(d.box, resolution);
  const GridFunction us = GridFunction::sample(src, [&](const Point& x) { return d.contains(x) ? u(x) : 0.0; });
  const Region image = image_region(f, d);
  const Grid dst = Grid::uniform(image.box, resolution);
  const GridFunction v = push_forward(*f, us, lambda, dst, d);
  const SupportCheck support = support_check(*f, us, v);
  const DistortionReport k = distortion_coefficient(*f, d, p, q, resolution);
  const int n = multiplicity(*f, d);
  const double s = ex.s.value(), rr = ex.r.value();

  VerificationReport r;
  r.id = "pushforward_norm/" + f->name() + "/" + detail::pq_tag(p, q);
  r.property = "pushforward_norm";
  r.lhs = sobolev_seminorm(g, v, s, image.contains);
  r.rhs = lambda * std::pow(n, (s - 1.0) / s) * std::pow(k.coefficient, ex.nu - 1) * sobolev_seminorm(g, us, rr, d.contains);
  r.slack = ctx.slack;
  r.inputs = {g.name(), f->name(), "box", p, q, resolution};
  r.notes = "s=" + ex.s.str() + " r=" + ex.r.str() + " K=" + format_double(k.coefficient) + " N=" + std::to_string(n) +
            " support_misses=" + std::to_string(support.forward_misses + support.backward_misses);
  if (!support.ok()) r.reason = "support_mismatch";
  r.finish();
  return r;
}

// f_* u against a known closed form: ||f_* u | L^1_p|| vs ||expected | L^1_p||
// on the same target grid, agreement within `tolerance`.
inline VerificationReport verify_pushforward_identity(const MappingPtr& f, const std::function<double(const Point&)>& u,
                                                      const std::function<double(const Point&)>& expected,
                                                      const Region& d, double p, int resolution, double tolerance)
{
  const Group& g = f->source();
  const Grid src = Grid::uniform(d.box, resolution);
  const GridFunction us = GridFunction::sample(src, [&](const Point& x) { return d.contains(x) ? u(x) : 0.0; });
  const Grid dst = Grid::uniform(image_box(*f, d.box), resolution);
  const GridFunction v = push_forward(*f, us, 1.0, dst, d);
  const GridFunction w = GridFunction::sample(dst, expected);
  double max_err = 0.0, max_w = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    max_err = std::max(max_err, std::abs(v[i] - w[i]));
    max_w = std::max(max_w, std::abs(w[i]));
  }
  VerificationReport r;
  r.id = "pushforward_identity/" + f->name();
  r.property = "pushforward_identity";
  r.kind = VerificationReport::Kind::agreement;
  r.lhs = sobolev_seminorm(g, v, p);
  r.rhs = sobolev_seminorm(g, w, p);
  r.slack = tolerance;
  r.inputs = {g.name(), f->name(), "box", p, p, resolution};
  r.notes = "max_pointwise_rel_error=" + format_double(max_w > 0.0 ? max_err / max_w : max_err);
  r.finish();
  return r;
}

// ||u o f | L^1_q(D)|| <= K_{p,q}(f; D) (integral over D' of |grad_H u|^p N(y, f, D) dy)^(1/p)
// with D' the image box of D.
inline VerificationReport verify_composition_bound(const MappingPtr& f, const std::function<double(const Point&)>& u,
                                        const Region& d, double p, double q, int resolution, VerifyContext& ctx,
                                        const std::string& u_label = "u")
{
  const Group& g = f->source();
  const Grid src = Grid::uniform(d.box, resolution);
  const GridFunction composed = GridFunction::sample(src, [&](const Point& x) { return u(f->eval(x)); });
  const Box target = image_box(*f, d.box);
  const Grid dst = Grid::uniform(target, resolution);
  const GridFunction us = GridFunction::sample(dst, u);
  const std::vector<double> weight =
      cell_average(dst, [&](const Point& y) { return static_cast<double>(multiplicity_at(*f, y, d)); });
  const double weighted = KuhnEnergy(g, dst, p, 0.0, weight).value(us.values());
  const DistortionReport k = distortion_coefficient(*f, d, p, q, resolution);

  VerificationReport r;
  r.id = "composition_bound/" + f->name() + "/" + u_label + "/" + detail::pq_tag(p, q);
  r.property = "composition_bound";
  r.lhs = sobolev_seminorm(g, composed, q, d.contains);
  r.rhs = k.coefficient * std::pow(weighted, 1.0 / p);
  r.slack = ctx.slack;
  r.inputs = {g.name(), f->name(), u_label, p, q, resolution};
  r.notes = "K=" + format_double(k.coefficient);
  r.finish();
  return r;
}

struct LiouvilleResult
{
  std::vector<double> radii;
  std::vector<double> capacities;  // cp_s(f(A_k), f(C))
  double s = 0.0;
  bool in_hypothesis = false;
  bool nonincreasing = false;
  bool converged = true;
  double decay_factor = 0.0;  // first / last
  std::string note;
};

// Exhaustion A_k = B(0, R_k) around C = closed B(0, c): capacities of the image
// condensers at s = p / (p - (nu - 1)). Outside nu - 1 < q <= p <= nu the run
// is flagged rather than failed.
inline LiouvilleResult liouville_decay_experiment(const MappingPtr& f, double c, std::vector<double> radii, double p,
                                                  double q, int resolution, VerifyContext& ctx)
{
  const Group& g = f->source();
  const double nu = g.hom_dim();
  LiouvilleResult out;
  out.radii = std::move(radii);
  require(!out.radii.empty(), ErrorCode::invalid_argument, "exhaustion radius list is empty");
  std::sort(out.radii.begin(), out.radii.end());
  require(out.radii.front() > c, ErrorCode::invalid_argument, "exhaustion radii must exceed the radius of C");
  out.in_hypothesis = nu - 1.0 < q && q <= p && p <= nu;
  if (!out.in_hypothesis) {
    out.note = "out_of_hypothesis: needs nu-1 < q <= p <= nu";
    if (!(nu - 1.0 < q && q <= p)) return out;
  }
  out.s = p / (p - (nu - 1.0));
  // Center spacing of a uniform grid over B(0, 2c) at this resolution.
  auto [lo, hi] = gauge_ball_bounds(g, 2.0 * c);
  std::vector<double> spacing(g.dim());
  for (int a = 0; a < g.dim(); ++a) spacing[a] = (hi[a] - lo[a]) / resolution;
  std::vector<CapacityResult> keep;
  keep.reserve(out.radii.size());
  for (double R : out.radii) {
    Condenser e = ring_condenser(g, c, R);
    e.center_spacing = spacing;
    e.label += "[graded]";
    const CapacityResult& res = detail::solve_with(ctx, image_condenser(f, e), g, out.s, resolution, keep);
    out.capacities.push_back(res.value);
    out.converged = out.converged && res.converged;
  }
  out.nonincreasing = true;
  for (std::size_t i = 1; i < out.capacities.size(); ++i)
    if (out.capacities[i] > out.capacities[i - 1] * (1.0 + 1e-3)) out.nonincreasing = false;
  out.decay_factor = out.capacities.front() / out.capacities.back();
  return out;
}

}  // namespace carnot
