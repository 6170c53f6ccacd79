#pragma once

// Small-scale geometric quantities of a mapping at a point: linear distortion
// L(x, r) / l(x, r), the quotient H_{p,q}(x, f) over shrinking balls, and the
// normalized ratio L(x, r) r^((nu - q)/q) / |f(B(x, lambda r))|^(1/p) / K_{p,q}.
// All limsups r -> 0 are approximated by the max over the smallest quartile
// of the radius list.

#include "carnot/calculus.hpp"
#include "carnot/common.hpp"
#include "carnot/distortion.hpp"
#include "carnot/group.hpp"
#include "carnot/mapping.hpp"
#include "carnot/rng.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

namespace carnot
{

// |B(0, 1)| for the Euclidean norm on R^n and the Koranyi gauge on H^n:
// |B| = (omega_{2n-1} / 2) B(n/2, 3/2).
inline double unit_ball_volume(const Group& g)
{
  if (g.is_abelian()) {
    const int n = g.dim();
    return std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
  }
  const int n = g.rank();
  const double beta = std::tgamma(0.5 * n) * std::tgamma(1.5) / std::tgamma(0.5 * n + 1.5);
  return 0.5 * unit_sphere_area(2 * n) * beta;
}

// Points on the unit gauge sphere: uniform draws from the shell 1/2 <= rho <= 1,
// pushed to rho = 1 along dilation orbits.
inline std::vector<Point> sample_gauge_sphere(const Group& g, std::size_t count, Rng& rng)
{
  require(count > 0, ErrorCode::invalid_argument, "sphere sample count must be positive");
  auto [lo, hi] = gauge_ball_bounds(g, 1.0);
  std::vector<Point> out;
  out.reserve(count);
  Point x(g.dim());
  while (out.size() < count) {
    for (int a = 0; a < g.dim(); ++a) x[a] = rng.uniform(lo[a], hi[a]);
    const double r = gauge_norm(g, x);
    if (r < 0.5 || r > 1.0) continue;
    out.push_back(dilate(g, 1.0 / r, x));
  }
  return out;
}

// Radii r_max * 10^(-decades * i / (count - 1)), decreasing.
inline std::vector<double> log_radii(double r_max, double decades, int count)
{
  require(r_max > 0.0 && decades > 0.0 && count >= 2, ErrorCode::invalid_argument, "bad radius list parameters");
  std::vector<double> out(count);
  for (int i = 0; i < count; ++i) out[i] = r_max * std::pow(10.0, -decades * i / (count - 1));
  return out;
}

namespace detail
{

inline std::vector<double> sorted_radii(std::vector<double> radii)
{
  require(radii.size() >= 4, ErrorCode::invalid_argument, "need at least 4 radii");
  for (double r : radii) require(r > 0.0 && std::isfinite(r), ErrorCode::invalid_argument, "radii must be positive");
  std::sort(radii.begin(), radii.end(), std::greater<>());
  require(radii.front() / radii.back() >= 100.0 * (1.0 - 1e-12), ErrorCode::invalid_argument,
          "radius list must span at least two decades");
  return radii;
}

// Indices of the smallest quartile of a decreasing radius list.
inline std::size_t quartile_start(std::size_t n) { return n - std::max<std::size_t>(1, (n + 3) / 4); }

inline double quartile_max(const std::vector<double>& v)
{
  double m = -INFINITY;
  for (std::size_t i = quartile_start(v.size()); i < v.size(); ++i) m = std::max(m, v[i]);
  return m;
}

inline double quartile_min(const std::vector<double>& v)
{
  double m = INFINITY;
  for (std::size_t i = quartile_start(v.size()); i < v.size(); ++i) m = std::min(m, v[i]);
  return m;
}

}  // namespace detail

struct LinearDistortionEstimate
{
  std::vector<double> radii;  // decreasing
  std::vector<double> big_l;  // L(x, r) = max d(f(w), f(x)) over d(w, x) = r
  std::vector<double> small_l;
  std::vector<double> ratios;
  double limsup = 0.0;
};

// H(x, f) = limsup L(x, r) / l(x, r) from sampled gauge spheres about x. If
// a domain is given every sampled sphere point must lie in it.
inline LinearDistortionEstimate linear_distortion_estimate(const Mapping& f, const Point& x, std::vector<double> radii,
                                                           Rng& rng, std::size_t samples = 512,
                                                           const std::optional<Region>& domain = std::nullopt)
{
  const Group& g = f.source();
  g.check(x);
  LinearDistortionEstimate out;
  out.radii = detail::sorted_radii(std::move(radii));
  const std::vector<Point> sphere = sample_gauge_sphere(g, samples, rng);
  const Point fx = f.eval(x);
  for (double r : out.radii) {
    double big = 0.0, small = INFINITY;
    for (const Point& w0 : sphere) {
      const Point w = compose(g, x, dilate(g, r, w0));
      if (domain && !(domain->box.contains(w) && domain->contains(w)))
        fail(ErrorCode::invalid_argument, "sphere of radius " + format_double(r) + " leaves the domain");
      const double d = distance(f.target(), fx, f.eval(w));
      big = std::max(big, d);
      small = std::min(small, d);
    }
    require(small > 0.0, ErrorCode::precondition, "f is constant on a sampled sphere (l(x, r) = 0)");
    out.big_l.push_back(big);
    out.small_l.push_back(small);
    out.ratios.push_back(big / small);
  }
  out.limsup = detail::quartile_max(out.ratios);
  return out;
}

// Ball B(x, r) as a region.
inline Region gauge_ball_region(const Group& g, const Point& x, double r)
{
  auto [lo, hi] = gauge_ball_bounds(g, r);
  Box box{lo, hi};
  // Left translation of the bounding box: bounds from translated corners
  // and the t-range for H^n.
  Box moved{Point::Constant(g.dim(), INFINITY), Point::Constant(g.dim(), -INFINITY)};
  for (int c = 0; c < (1 << g.dim()); ++c) {
    Point y(g.dim());
    for (int a = 0; a < g.dim(); ++a) y[a] = (c >> a) & 1 ? box.hi[a] : box.lo[a];
    const Point z = compose(g, x, y);
    moved.lo = moved.lo.cwiseMin(z);
    moved.hi = moved.hi.cwiseMax(z);
  }
  return {moved, [g, x, r](const Point& y) { return distance(g, x, y) < r; }};
}

// |f(region)| by sampling the image box with preimage tests.
inline MonteCarloEstimate image_volume(const MappingPtr& f, const Region& a, std::size_t samples, Rng& rng)
{
  const Box box = image_box(*f, a.box);
  return monte_carlo(box, samples, rng, [&](const Point& y) { return multiplicity_at(*f, y, a) > 0 ? 1.0 : 0.0; });
}

using SetFunction = std::function<double(const Region&)>;

struct HpqEstimate
{
  std::vector<double> radii;
  std::vector<double> big_l;
  std::vector<double> image_volume;
  std::vector<double> phi;
  std::vector<double> quotients;
  double limsup = 0.0;
};

struct EstimateOptions
{
  std::size_t sphere_samples = 512;
  std::size_t volume_samples = 20000;
  int distortion_resolution = 16;
};

// Phi(S) = K_{p,q}(f; S)^(pq/(p-q)) by grid quadrature on S.
inline SetFunction distortion_set_function(const MappingPtr& f, double p, double q, int resolution)
{
  require(q < p, ErrorCode::invalid_argument, "distortion set function needs q < p");
  return [f, p, q, resolution](const Region& s) {
    const double k = distortion_coefficient(*f, s, p, q, resolution).coefficient;
    return std::pow(k, p * q / (p - q));
  };
}

// Per radius: L^p r^(nu - p) / |f(B(x, lambda r))| / (Phi(B(x, lambda r)) / |B(x, r)|)^((p - q)/q).
inline HpqEstimate h_pq_estimate(const MappingPtr& f, const Point& x, double p, double q, double lambda,
                                 std::vector<double> radii, Rng& rng, SetFunction phi = {},
                                 const EstimateOptions& options = {})
{
  require(lambda > 1.0, ErrorCode::invalid_argument, "h_pq needs lambda > 1");
  require(1.0 <= q && q <= p, ErrorCode::precondition, "h_pq needs 1 <= q <= p");
  const Group& g = f->source();
  const double nu = g.hom_dim();
  if (!phi && q < p) phi = distortion_set_function(f, p, q, options.distortion_resolution);

  HpqEstimate out;
  out.radii = detail::sorted_radii(std::move(radii));
  Rng sphere_rng = rng.fork("hpq-sphere");
  const auto lin = linear_distortion_estimate(*f, x, out.radii, sphere_rng, options.sphere_samples);
  Rng volume_rng = rng.fork("hpq-volume");
  const double unit = unit_ball_volume(g);
  for (std::size_t i = 0; i < out.radii.size(); ++i) {
    const double r = out.radii[i];
    const Region ball = gauge_ball_region(g, x, lambda * r);
    const double vol = image_volume(f, ball, options.volume_samples, volume_rng).value;
    require(vol > 0.0, ErrorCode::precondition, "image of a ball has zero sampled volume");
    const double ph = q < p ? phi(ball) : 1.0;
    double value = std::pow(lin.big_l[i], p) * std::pow(r, nu - p) / vol;
    if (q < p) value /= std::pow(ph / (unit * std::pow(r, nu)), (p - q) / q);
    out.big_l.push_back(lin.big_l[i]);
    out.image_volume.push_back(vol);
    out.phi.push_back(ph);
    out.quotients.push_back(value);
  }
  out.limsup = detail::quartile_max(out.quotients);
  return out;
}

struct BoundednessReport
{
  std::string label;
  std::vector<double> radii;
  std::vector<double> values;
  double max = 0.0;
  double quartile_spread = 0.0;  // max / min over the smallest quartile
  bool finite = false;
};

inline BoundednessReport summarize_boundedness(std::string label, std::vector<double> radii, std::vector<double> values)
{
  BoundednessReport out{std::move(label), std::move(radii), std::move(values), 0.0, 0.0, true};
  for (double v : out.values) {
    out.finite = out.finite && std::isfinite(v) && v >= 0.0;
    out.max = std::max(out.max, v);
  }
  const double lo = detail::quartile_min(out.values);
  out.quartile_spread = lo > 0.0 ? detail::quartile_max(out.values) / lo : INFINITY;
  return out;
}

// L(x, r) r^((nu - q)/q) / |f(B(x, lambda r))|^(1/p) / K_{p,q}(f, B(x, lambda r)),
// bounded by c i(x, f)^(1/p) for small r.
inline BoundednessReport limit_ratio_sequence(const MappingPtr& f, const Point& x, double p, double q, double lambda,
                                              std::vector<double> radii, Rng& rng, const EstimateOptions& options = {})
{
  require(lambda > 1.0, ErrorCode::invalid_argument, "lambda must exceed 1");
  const Group& g = f->source();
  const double nu = g.hom_dim();
  require(nu - 1.0 < q && q <= p, ErrorCode::precondition, "ratio sequence needs nu - 1 < q <= p");
  radii = detail::sorted_radii(std::move(radii));
  Rng sphere_rng = rng.fork("ratio-sphere");
  const auto lin = linear_distortion_estimate(*f, x, radii, sphere_rng, options.sphere_samples);
  Rng volume_rng = rng.fork("ratio-volume");
  std::vector<double> values;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    const double r = radii[i];
    const Region ball = gauge_ball_region(g, x, lambda * r);
    const double vol = image_volume(f, ball, options.volume_samples, volume_rng).value;
    require(vol > 0.0, ErrorCode::precondition, "image of a ball has zero sampled volume");
    const double k = distortion_coefficient(*f, ball, p, q, options.distortion_resolution).coefficient;
    values.push_back(lin.big_l[i] * std::pow(r, (nu - q) / q) / std::pow(vol, 1.0 / p) / k);
  }
  return summarize_boundedness(f->name() + " ratio at p=" + format_double(p) + " q=" + format_double(q),
                               std::move(radii), std::move(values));
}

}  // namespace carnot
