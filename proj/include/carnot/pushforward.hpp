#pragma once

// Push-forward of a compactly supported function along a mapping:
//
//   (f_* u)(y) = Lambda * sum over z in f^{-1}(y) of i(z, f) u(z),
//
// or the sup over preimages (the variant used for capacity transfer).

#include "carnot/calculus.hpp"
#include "carnot/common.hpp"
#include "carnot/grid.hpp"
#include "carnot/mapping.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

namespace carnot
{

enum class PushRule
{
  index_sum,
  sup,
};

namespace detail
{
// True if some node within one cell of the cell containing x has a nonzero value.
inline bool nonzero_near(const GridFunction& u, const Point& x)
{
  const Grid& grid = u.grid();
  int cell[kMaxDim];
  double local[kMaxDim];
  if (!grid.locate(x, cell, local)) {
    // Allow points up to one cell outside the box.
    for (int k = 0; k < grid.dim(); ++k) {
      const auto& a = grid.axis(k);
      const double h0 = a[1] - a[0], h1 = a.back() - a[a.size() - 2];
      if (x[k] < a.front() - h0 || x[k] > a.back() + h1) return false;
    }
  }
  const int d = grid.dim();
  int lo[kMaxDim], hi[kMaxDim], idx[kMaxDim];
  for (int k = 0; k < d; ++k) {
    lo[k] = std::max(0, cell[k] - 1);
    hi[k] = std::min(grid.cells(k), cell[k] + 2);
    idx[k] = lo[k];
  }
  for (;;) {
    if (u[grid.index(idx)] != 0.0) return true;
    int k = d - 1;
    while (k >= 0 && ++idx[k] > hi[k]) {
      idx[k] = lo[k];
      --k;
    }
    if (k < 0) return false;
  }
}
}  // namespace detail

// Samples f_* u on the target grid. u lives on a grid over D (optionally
// masked by `domain`) and must vanish on the box boundary and outside the
// mask, i.e. be compactly supported in D.
inline GridFunction push_forward(const Mapping& f, const GridFunction& u, double lambda, const Grid& target,
                                 const std::optional<Region>& domain = std::nullopt,
                                 PushRule rule = PushRule::index_sum)
{
  require(lambda > 0.0, ErrorCode::invalid_argument, "push-forward weight must be positive");
  const Grid& src = u.grid();
  require(src.dim() == f.source().dim() && target.dim() == f.target().dim(), ErrorCode::dimension_mismatch,
          "grid dimensions do not match the mapping");
  for (std::size_t i = 0; i < src.node_count(); ++i) {
    if (u[i] == 0.0) continue;
    require(!src.on_boundary(i), ErrorCode::precondition, "supp u touches the boundary of D");
    require(!domain || domain->contains(src.node(i)), ErrorCode::precondition, "supp u leaves the domain D");
  }
  const Box box = src.box();
  GridFunction v(target);
  for (std::size_t i = 0; i < target.node_count(); ++i) {
    double acc = 0.0;
    for (const Point& z : f.preimages(target.node(i))) {
      if (!box.contains(z)) continue;
      if (domain && !domain->contains(z)) continue;
      const double uz = u.interpolate(z);
      if (uz == 0.0) continue;
      if (rule == PushRule::index_sum) {
        acc += f.index(z) * uz;
      } else {
        acc = std::max(acc, uz);
      }
    }
    v[i] = lambda * acc;
  }
  return v;
}

struct SupportCheck
{
  std::size_t source_support = 0;
  std::size_t target_support = 0;
  std::size_t forward_misses = 0;   // x in supp u with no support of v near f(x)
  std::size_t backward_misses = 0;  // y in supp v with no preimage near supp u

  bool ok() const { return forward_misses == 0 && backward_misses == 0; }
};

// supp f_* u against f(supp u), each node matched within one cell.
inline SupportCheck support_check(const Mapping& f, const GridFunction& u, const GridFunction& v)
{
  SupportCheck out;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (u[i] == 0.0) continue;
    ++out.source_support;
    if (!detail::nonzero_near(v, f.eval(u.grid().node(i)))) ++out.forward_misses;
  }
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] == 0.0) continue;
    ++out.target_support;
    bool found = false;
    for (const Point& z : f.preimages(v.grid().node(i)))
      if (detail::nonzero_near(u, z)) {
        found = true;
        break;
      }
    if (!found) ++out.backward_misses;
  }
  return out;
}

}  // namespace carnot
