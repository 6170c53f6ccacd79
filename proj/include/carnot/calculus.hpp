#pragma once

// Horizontal calculus on grid functions and on linear maps between first
// strata.

#include "carnot/common.hpp"
#include "carnot/grid.hpp"
#include "carnot/group.hpp"
#include "carnot/kuhn.hpp"

#include <Eigen/SVD>

#include <array>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

namespace carnot
{

using Predicate = std::function<bool(const Point&)>;

// An axis-aligned box plus a membership test ("box + mask").
struct Region
{
  Box box;
  Predicate contains;

  static Region whole(const Box& b)
  {
    return {b, [](const Point&) { return true; }};
  }
};

// Per-node horizontal gradient; component j of node i lives at data[i * components + j].
struct HorizontalGradient
{
  Grid grid;
  int components = 0;
  std::vector<double> data;

  double at(std::size_t node, int j) const { return data[node * components + j]; }

  double norm_at(std::size_t node) const
  {
    double s = 0.0;
    for (int j = 0; j < components; ++j) s += at(node, j) * at(node, j);
    return std::sqrt(s);
  }
};

// X_j u at every node: frame coefficients applied to central differences
// (one-sided on the box boundary; second-order accurate on graded axes too).
inline HorizontalGradient horizontal_gradient(const Group& g, const GridFunction& u)
{
  const Grid& grid = u.grid();
  require(grid.dim() == g.dim(), ErrorCode::dimension_mismatch, "grid dimension does not match group");
  for (int a = 0; a < grid.dim(); ++a)
    require(grid.cells(a) >= 2, ErrorCode::invalid_argument, "horizontal_gradient needs at least 3 nodes per axis");

  const int d = grid.dim();
  const int n1 = g.horizontal_dim();
  HorizontalGradient out{grid, n1, std::vector<double>(grid.node_count() * n1, 0.0)};
  int multi[kMaxDim];
  Point grad(d);
  for (std::size_t i = 0; i < grid.node_count(); ++i) {
    grid.multi_index(i, multi);
    for (int a = 0; a < d; ++a) {
      const auto& ax = grid.axis(a);
      const int k = multi[a];
      const std::size_t s = grid.stride(a);
      if (k == 0) {
        grad[a] = (u[i + s] - u[i]) / (ax[1] - ax[0]);
      } else if (k == grid.cells(a)) {
        grad[a] = (u[i] - u[i - s]) / (ax[k] - ax[k - 1]);
      } else {
        // Three-point formula for possibly unequal spacings.
        const double hm = ax[k] - ax[k - 1], hp = ax[k + 1] - ax[k];
        grad[a] = (hm * hm * u[i + s] - hp * hp * u[i - s] + (hp * hp - hm * hm) * u[i]) / (hm * hp * (hm + hp));
      }
    }
    const SmallMatrix frame = horizontal_frame(g, grid.node(i));
    for (int j = 0; j < n1; ++j) out.data[i * n1 + j] = frame.col(j).dot(grad);
  }
  return out;
}

// Mean of a function over each cell from 16 deterministic subsamples per cell
// (a 4x4 lattice in 2-D, a Halton set otherwise).
inline std::vector<double> cell_average(const Grid& grid, const std::function<double(const Point&)>& fn)
{
  constexpr int kSubsamples = 16;
  const int d = grid.dim();
  std::vector<std::array<double, kMaxDim>> offsets(kSubsamples);
  static constexpr int primes[kMaxDim] = {2, 3, 5, 7, 11, 13, 17, 19, 23};
  for (int s = 0; s < kSubsamples; ++s) {
    if (d == 2) {
      offsets[s][0] = (s / 4 + 0.5) / 4.0;
      offsets[s][1] = (s % 4 + 0.5) / 4.0;
    } else if (d == 1) {
      offsets[s][0] = (s + 0.5) / kSubsamples;
    } else {
      for (int a = 0; a < d; ++a) {
        double f = 1.0, r = 0.0;
        for (int i = s + 1; i > 0; i /= primes[a]) {
          f /= primes[a];
          r += f * (i % primes[a]);
        }
        offsets[s][a] = r;
      }
    }
  }
  std::vector<double> weight(grid.cell_count(), 0.0);
  std::vector<int> cell(d, 0);
  Point x(d);
  for (std::size_t c = 0; c < grid.cell_count(); ++c) {
    if (c > 0) {
      for (int a = d - 1; a >= 0; --a) {
        if (++cell[a] < grid.cells(a)) break;
        cell[a] = 0;
      }
    }
    double sum = 0.0;
    for (int s = 0; s < kSubsamples; ++s) {
      for (int a = 0; a < d; ++a) {
        const auto& ax = grid.axis(a);
        x[a] = ax[cell[a]] + offsets[s][a] * (ax[cell[a] + 1] - ax[cell[a]]);
      }
      sum += fn(x);
    }
    weight[c] = sum / kSubsamples;
  }
  return weight;
}

// Fraction of each cell inside the predicate.
inline std::vector<double> cell_coverage(const Grid& grid, const Predicate& inside)
{
  return cell_average(grid, [&](const Point& x) { return inside(x) ? 1.0 : 0.0; });
}

// Approximates the integral of |grad_H u|^p over the masked part of the grid
// (centroid rule on the Kuhn simplices of each cell, cells weighted by mask
// coverage). An empty mask means the whole box.
inline double p_energy(const Group& g, const GridFunction& u, double p, const Predicate& mask = {})
{
  require(p >= 1.0, ErrorCode::invalid_argument, "p_energy needs p >= 1");
  std::vector<double> weight;
  if (mask) weight = cell_coverage(u.grid(), mask);
  return KuhnEnergy(g, u.grid(), p, 0.0, std::move(weight)).value(u.values());
}

// Spectral norm: the gauge restricted to V_1 is Euclidean for both groups.
inline double operator_norm_horizontal(const SmallMatrix& m)
{
  require(m.allFinite(), ErrorCode::non_finite, "matrix has non-finite entries");
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<SmallMatrix> svd(m);
  return svd.singularValues()(0);
}

// Factor by which a contact differential with horizontal block m scales the
// second stratum of H^n: m^T J m = lambda J for the standard symplectic J.
inline double center_factor(const Group& g, const SmallMatrix& m)
{
  const int n = g.rank();
  SmallMatrix J = SmallMatrix::Zero(2 * n, 2 * n);
  for (int i = 0; i < n; ++i) {
    J(i, n + i) = 1.0;
    J(n + i, i) = -1.0;
  }
  const SmallMatrix pulled = m.transpose() * J * m;
  const double lambda = pulled(0, n);
  const double scale = std::max(1.0, m.squaredNorm());
  require((pulled - lambda * J).norm() <= 1e-9 * scale, ErrorCode::invalid_argument,
          "horizontal differential does not preserve the contact structure");
  return lambda;
}

// Formal Jacobian det Df from the horizontal block: det(m) on R^n,
// det(m) * lambda on H^n (det(m)^2 on H^1).
inline double jacobian_from_hdiff(const Group& g, const SmallMatrix& m)
{
  const int n1 = g.horizontal_dim();
  require(m.rows() == n1 && m.cols() == n1, ErrorCode::dimension_mismatch,
          "horizontal differential must be " + std::to_string(n1) + "x" + std::to_string(n1));
  require(m.allFinite(), ErrorCode::non_finite, "horizontal differential has non-finite entries");
  const double det = m.determinant();
  if (g.is_abelian()) return det;
  if (g.rank() == 1) return det * det;
  return det * center_factor(g, m);
}

}  // namespace carnot
