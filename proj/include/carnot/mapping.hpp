#pragma once

// Analytically specified mappings between Carnot groups: evaluation,
// horizontal differential, Jacobian, index, branch set and preimages.

#include "carnot/calculus.hpp"
#include "carnot/common.hpp"
#include "carnot/group.hpp"
#include "carnot/rng.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace carnot
{

class Mapping
{
 public:
  explicit Mapping(Group group) : source_(group), target_(group) {}
  virtual ~Mapping() = default;

  const Group& source() const { return source_; }
  const Group& target() const { return target_; }

  virtual std::string name() const = 0;
  virtual Point eval(const Point& x) const = 0;

  // D_H f(x) as an n_1 x n_1 matrix in the left-invariant frames: column j is
  // the image of X_j.
  virtual SmallMatrix hdiff(const Point& x) const = 0;

  virtual double jacobian(const Point& x) const { return jacobian_from_hdiff(target_, hdiff(x)); }

  // Local index i(x, f); >= 2 exactly on the branch set.
  virtual int index(const Point&) const { return 1; }
  virtual bool in_branch_set(const Point& x) const { return index(x) >= 2; }

  // Every preimage of y in the domain of definition.
  virtual std::vector<Point> preimages(const Point& y) const = 0;

  virtual bool is_homeomorphism() const { return true; }
  virtual bool is_identity() const { return false; }

  // Bounding box of f(box) when it is known in closed form.
  virtual std::optional<Box> image_bounds(const Box&) const { return std::nullopt; }

 private:
  Group source_;
  Group target_;
};

using MappingPtr = std::shared_ptr<const Mapping>;

// N(y, f, A): preimages of y lying in A.
inline int multiplicity_at(const Mapping& f, const Point& y, const Region& a)
{
  int n = 0;
  for (const Point& z : f.preimages(y))
    if (a.box.contains(z) && a.contains(z)) ++n;
  return n;
}

// Sum of i(z, f) over preimages z of y in A.
inline int index_sum_at(const Mapping& f, const Point& y, const Region& a)
{
  int n = 0;
  for (const Point& z : f.preimages(y))
    if (a.box.contains(z) && a.contains(z)) n += f.index(z);
  return n;
}

namespace detail
{
// Lattice of interior sample points of a box, `per_axis` per axis.
inline std::vector<Point> lattice(const Box& box, int per_axis)
{
  const int d = box.dim();
  std::size_t total = 1;
  for (int a = 0; a < d; ++a) total *= static_cast<std::size_t>(per_axis);
  std::vector<Point> pts;
  pts.reserve(total);
  std::vector<int> idx(d, 0);
  for (std::size_t i = 0; i < total; ++i) {
    Point x(d);
    for (int a = 0; a < d; ++a) x[a] = box.lo[a] + (box.hi[a] - box.lo[a]) * (idx[a] + 0.5) / per_axis;
    pts.push_back(x);
    for (int a = d - 1; a >= 0; --a) {
      if (++idx[a] < per_axis) break;
      idx[a] = 0;
    }
  }
  return pts;
}

inline int lattice_density(int dim) { return dim <= 2 ? 96 : (dim == 3 ? 28 : 10); }
}  // namespace detail

// Axis-aligned box containing f(box): closed form when available, otherwise
// the bounds of f over a sample lattice padded by 2% of the extent.
inline Box image_box(const Mapping& f, const Box& box)
{
  if (auto b = f.image_bounds(box)) return *b;
  const auto pts = detail::lattice(box, detail::lattice_density(box.dim()) + 1);
  const int d = f.target().dim();
  Box out{Point::Constant(d, INFINITY), Point::Constant(d, -INFINITY)};
  auto add = [&](const Point& x) {
    const Point y = f.eval(x);
    out.lo = out.lo.cwiseMin(y);
    out.hi = out.hi.cwiseMax(y);
  };
  for (const auto& x : pts) add(x);
  for (int c = 0; c < (1 << box.dim()); ++c) {
    Point x(box.dim());
    for (int a = 0; a < box.dim(); ++a) x[a] = (c >> a) & 1 ? box.hi[a] : box.lo[a];
    add(x);
  }
  const Point pad = 0.02 * (out.hi - out.lo);
  out.lo -= pad;
  out.hi += pad;
  return out;
}

// The region f(A) as a predicate: y is in f(A) iff some preimage lies in A.
inline Region image_region(const MappingPtr& f, const Region& a)
{
  return {image_box(*f, a.box), [f, a](const Point& y) { return multiplicity_at(*f, y, a) > 0; }};
}

// N(f, A) = sup_y N(y, f, A), taken over images of a sample lattice of A.
inline int multiplicity(const Mapping& f, const Region& a)
{
  if (f.is_homeomorphism()) return 1;
  int best = 0;
  for (const Point& x : detail::lattice(a.box, detail::lattice_density(a.box.dim())))
    if (a.contains(x)) best = std::max(best, multiplicity_at(f, f.eval(x), a));
  return best;
}

// M(f, C) = inf over y in f(C) of the index sum over preimages in C, taken
// over images of a sample lattice of C plus C's own branch points.
inline int index_sum_infimum(const Mapping& f, const Region& c, const std::vector<Point>& extra_points = {})
{
  int best = -1;
  auto visit = [&](const Point& x) {
    if (!c.box.contains(x) || !c.contains(x)) return;
    const int s = index_sum_at(f, f.eval(x), c);
    best = best < 0 ? s : std::min(best, s);
  };
  for (const Point& x : detail::lattice(c.box, detail::lattice_density(c.box.dim()))) visit(x);
  for (const Point& x : extra_points) visit(x);
  return std::max(best, 0);
}

struct MappingValidation
{
  double hdiff_error = 0.0;      // max |FD - hdiff| / max(1, |hdiff|)
  double jacobian_error = 0.0;   // max |jac - graded formula| / max(1, |jac|)
  double full_jacobian_error = 0.0;  // max |jac - det(full FD differential)| / max(1, |jac|)
  double contact_defect = 0.0;   // vertical component of the pushed-forward X_j outside V_1
  double preimage_error = 0.0;   // max d(f(z), y) over enumerated preimages
  bool preimages_contain_source = true;
  bool index_consistent = true;
  std::size_t samples = 0;

  bool ok(double tol) const
  {
    return hdiff_error <= tol && jacobian_error <= 1e-9 && full_jacobian_error <= tol && contact_defect <= tol &&
           preimage_error <= tol && preimages_contain_source && index_consistent;
  }
};

// Finite-difference self-check of a mapping on random points of a region,
// with central differences of step h along the frame flows.
inline MappingValidation validate_mapping(const Mapping& f, const Region& a, std::size_t samples, double h, Rng& rng)
{
  const Group& g = f.source();
  const Group& tg = f.target();
  const int d = g.dim();
  const int n1 = g.horizontal_dim();
  MappingValidation out;
  std::size_t tries = 0;
  while (out.samples < samples && tries < 50 * samples + 100) {
    ++tries;
    Point x(d);
    for (int k = 0; k < d; ++k) x[k] = rng.uniform(a.box.lo[k], a.box.hi[k]);
    if (!a.contains(x)) continue;
    ++out.samples;

    const Point fx = f.eval(x);
    const SmallMatrix m = f.hdiff(x);
    const double jac = f.jacobian(x);
    const double mscale = std::max(1.0, m.cwiseAbs().maxCoeff());
    const SmallMatrix target_frame = horizontal_frame(tg, fx);

    for (int j = 0; j < n1; ++j) {
      Point step = Point::Zero(d);
      step[j] = h;
      const Point fp = f.eval(compose(g, x, step));
      const Point fm = f.eval(compose(g, x, -step));
      const Point w = (fp - fm) / (2.0 * h);
      for (int i = 0; i < n1; ++i) out.hdiff_error = std::max(out.hdiff_error, std::abs(w[i] - m(i, j)) / mscale);
      const Point horizontal = target_frame * m.col(j);
      for (int k = n1; k < tg.dim(); ++k)
        out.contact_defect = std::max(out.contact_defect, std::abs(w[k] - horizontal[k]) / mscale);
    }

    const double jscale = std::max(1.0, std::abs(jac));
    out.jacobian_error = std::max(out.jacobian_error, std::abs(jac - jacobian_from_hdiff(tg, m)) / jscale);

    SmallMatrix full(d, d);
    for (int k = 0; k < d; ++k) {
      Point e = Point::Zero(d);
      const double hk = g.weight(k) == 2 ? h * std::max(1.0, std::abs(x[k])) : h;
      e[k] = hk;
      full.col(k) = (f.eval(x + e) - f.eval(x - e)) / (2.0 * hk);
    }
    out.full_jacobian_error = std::max(out.full_jacobian_error, std::abs(full.determinant() - jac) / jscale);

    bool found = false;
    for (const Point& z : f.preimages(fx)) {
      out.preimage_error = std::max(out.preimage_error, distance(tg, f.eval(z), fx) / std::max(1.0, gauge_norm(tg, fx)));
      if (distance(g, z, x) <= 1e-6 * std::max(1.0, gauge_norm(g, x))) found = true;
    }
    if (!found) out.preimages_contain_source = false;
    if ((f.index(x) >= 2) != f.in_branch_set(x)) out.index_consistent = false;
  }
  return out;
}

}  // namespace carnot
