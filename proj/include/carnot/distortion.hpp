#pragma once

// Pointwise p-distortion K_p(x, f) = |D_H f(x)| / J(x, f)^(1/p) and its
// L_kappa norm, the (p, q)-distortion coefficient; plus a Monte Carlo check
// of the change-of-variables identity with multiplicity.

#include "carnot/calculus.hpp"
#include "carnot/common.hpp"
#include "carnot/grid.hpp"
#include "carnot/mapping.hpp"
#include "carnot/rational.hpp"
#include "carnot/report.hpp"
#include "carnot/rng.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>

namespace carnot
{

// Zero where J = 0 and D_H f = 0 (finite-distortion convention), infinity
// where J = 0 but D_H f != 0. Negative J is an error.
inline double local_distortion(const Mapping& f, const Point& x, double p)
{
  require(p >= 1.0, ErrorCode::invalid_argument, "local distortion needs p >= 1");
  const SmallMatrix m = f.hdiff(x);
  const double norm = operator_norm_horizontal(m);
  const double jac = f.jacobian(x);
  require(std::isfinite(jac), ErrorCode::non_finite, "non-finite Jacobian at sample point");
  if (jac < 0.0) fail(ErrorCode::sense_reversing, "J(x, f) < 0: mapping reverses orientation at a sample point");
  if (jac == 0.0) return norm == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return norm / std::pow(jac, 1.0 / p);
}

struct DistortionReport
{
  Rational p, q;
  std::optional<Rational> kappa;  // nullopt: kappa = infinity (p == q)
  GridFunction field;             // K_p at grid nodes (0 outside the mask)
  double coefficient = 0.0;       // K_{p,q}(f; region)
  double measure = 0.0;           // quadrature volume of the region
  double field_max = 0.0;
  std::size_t cells_used = 0;

  bool kappa_infinite() const { return !kappa.has_value(); }
};

// ||K_p(., f) | L_kappa(region)|| on a uniform grid over region.box. For
// kappa < infinity: midpoint rule on cells weighted by mask coverage. For
// p == q: max of the field over in-mask nodes (a lower bound of the ess sup
// for continuous fields).
inline DistortionReport distortion_coefficient(const Mapping& f, const Region& region, double p, double q,
                                               int resolution)
{
  require(q >= 1.0 && q <= p, ErrorCode::precondition, "distortion coefficient needs 1 <= q <= p");
  require(resolution >= 1, ErrorCode::invalid_argument, "resolution must be positive");
  DistortionReport out;
  out.p = Rational::from_double(p);
  out.q = Rational::from_double(q);
  out.kappa = Exponents::kappa_of(out.p, out.q);

  const Grid grid = Grid::uniform(region.box, resolution);
  out.field = GridFunction(grid);
  bool any_node = false;
  for (std::size_t i = 0; i < grid.node_count(); ++i) {
    const Point x = grid.node(i);
    if (!region.contains(x)) continue;
    const double k = local_distortion(f, x, p);
    if (!std::isfinite(k)) fail(ErrorCode::non_finite, "distortion is infinite at a grid node (J = 0, D_H f != 0)");
    out.field[i] = k;
    out.field_max = std::max(out.field_max, k);
    any_node = true;
  }

  const std::vector<double> weight = cell_coverage(grid, region.contains);
  const int d = grid.dim();
  std::vector<int> cell(d, 0);
  double acc = 0.0;
  double center_max = 0.0;
  for (std::size_t c = 0; c < grid.cell_count(); ++c) {
    if (c > 0) {
      for (int a = d - 1; a >= 0; --a) {
        if (++cell[a] < grid.cells(a)) break;
        cell[a] = 0;
      }
    }
    if (weight[c] == 0.0) continue;
    Point center(d);
    double vol = weight[c];
    for (int a = 0; a < d; ++a) {
      const auto& ax = grid.axis(a);
      center[a] = 0.5 * (ax[cell[a]] + ax[cell[a] + 1]);
      vol *= ax[cell[a] + 1] - ax[cell[a]];
    }
    const double k = local_distortion(f, center, p);
    if (!std::isfinite(k)) fail(ErrorCode::non_finite, "distortion is infinite at a quadrature point");
    center_max = std::max(center_max, k);
    out.measure += vol;
    ++out.cells_used;
    if (out.kappa) acc += vol * std::pow(k, out.kappa->value());
  }

  if (out.kappa) {
    out.coefficient = std::pow(acc, 1.0 / out.kappa->value());
  } else {
    out.coefficient = any_node ? out.field_max : center_max;
  }
  return out;
}

struct MonteCarloEstimate
{
  double value = 0.0;
  double std_error = 0.0;
  std::size_t samples = 0;
};

// Integral over a box of a function, by uniform sampling.
inline MonteCarloEstimate monte_carlo(const Box& box, std::size_t samples, Rng& rng,
                                      const std::function<double(const Point&)>& integrand)
{
  require(samples >= 2, ErrorCode::invalid_argument, "Monte Carlo needs at least two samples");
  const int d = box.dim();
  const double vol = box.volume();
  double mean = 0.0, m2 = 0.0;
  Point x(d);
  for (std::size_t i = 0; i < samples; ++i) {
    for (int a = 0; a < d; ++a) x[a] = rng.uniform(box.lo[a], box.hi[a]);
    const double v = integrand(x);
    if (!std::isfinite(v)) fail(ErrorCode::non_finite, "non-integrable sample encountered");
    const double delta = v - mean;
    mean += delta / static_cast<double>(i + 1);
    m2 += delta * (v - mean);
  }
  MonteCarloEstimate out;
  out.samples = samples;
  out.value = vol * mean;
  out.std_error = vol * std::sqrt(m2 / static_cast<double>(samples - 1) / static_cast<double>(samples));
  return out;
}

// Compares the integral over A of (u o f) |J| with the integral of
// u(y) N(y, f, A). Errors in the report are half-widths of two-sided
// confidence intervals at `confidence` (0.99 by default).
inline VerificationReport change_of_variables_check(const MappingPtr& f, const Region& a,
                                                    const std::function<double(const Point&)>& u,
                                                    std::size_t samples, Rng& rng, double tolerance = 1e-3,
                                                    double confidence = 0.99)
{
  require(confidence == 0.99 || confidence == 0.95, ErrorCode::invalid_argument, "confidence must be 0.95 or 0.99");
  const double z = confidence == 0.99 ? 2.5758293035489 : 1.9599639845401;
  Rng left_rng = rng.fork("cov-left");
  Rng right_rng = rng.fork("cov-right");
  const MonteCarloEstimate left = monte_carlo(a.box, samples, left_rng, [&](const Point& x) {
    if (!a.contains(x)) return 0.0;
    return u(f->eval(x)) * std::abs(f->jacobian(x));
  });
  const Box image = image_box(*f, a.box);
  const MonteCarloEstimate right = monte_carlo(image, samples, right_rng, [&](const Point& y) {
    const double uy = u(y);
    return uy == 0.0 ? 0.0 : uy * multiplicity_at(*f, y, a);
  });

  VerificationReport r;
  r.property = "change_of_variables";
  r.kind = VerificationReport::Kind::agreement;
  r.lhs = left.value;
  r.rhs = right.value;
  r.lhs_error = z * left.std_error;
  r.rhs_error = z * right.std_error;
  r.slack = tolerance;
  r.inputs.group = f->source().name();
  r.inputs.map = f->name();
  r.notes = "samples=" + std::to_string(samples);
  r.finish();
  return r;
}

}  // namespace carnot
