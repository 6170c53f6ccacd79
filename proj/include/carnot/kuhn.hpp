#pragma once

// Discrete horizontal p-energy of a nodal field. Each grid cell is split into
// D! Kuhn simplices (one per axis ordering); on every simplex the field is
// linear, its Euclidean gradient is a difference quotient along the simplex
// path, and the horizontal frame is evaluated at the simplex centroid:
//
//   E(u) = sum_cells w_c sum_simplices |S| (|F(centroid)^T grad u|^2 + eps^2)^(p/2)
//
// On R^n this is exact for the piecewise-linear interpolant. The
// decomposition maps onto itself under any diagonal linear map, so on grids
// that are dilates of each other the discrete energies scale exactly like the
// continuous ones.

#include "carnot/common.hpp"
#include "carnot/grid.hpp"
#include "carnot/group.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

namespace carnot
{

namespace detail
{

template <int D>
struct KuhnTopology
{
  static constexpr int factorial()
  {
    int f = 1;
    for (int i = 2; i <= D; ++i) f *= i;
    return f;
  }
  static constexpr int kSimplices = factorial();

  // axis[s][k]: axis stepped on the k-th edge of simplex s.
  std::array<std::array<int, D>, kSimplices> axis{};
  // corner[s][k]: bitmask of the k-th vertex (k = 0..D).
  std::array<std::array<int, D + 1>, kSimplices> corner{};
  // centroid[s][a]: centroid offset along axis a, in units of the cell edge.
  std::array<std::array<double, D>, kSimplices> centroid{};

  constexpr KuhnTopology()
  {
    std::array<int, D> perm{};
    for (int i = 0; i < D; ++i) perm[i] = i;
    int s = 0;
    do {
      int mask = 0;
      corner[s][0] = 0;
      for (int k = 0; k < D; ++k) {
        axis[s][k] = perm[k];
        mask |= 1 << perm[k];
        corner[s][k + 1] = mask;
        centroid[s][perm[k]] = static_cast<double>(D - k) / (D + 1);
      }
      ++s;
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
};

template <int D>
inline constexpr KuhnTopology<D> kKuhnTopology{};

template <int D>
const KuhnTopology<D>& kuhn_topology()
{
  return kKuhnTopology<D>;
}

// Frames act on Euclidean gradients: apply() gives the horizontal gradient,
// apply_transpose() pulls a horizontal covector back to coordinates.
template <int D>
struct AbelianFrame
{
  static constexpr int kDim = D;
  static constexpr int kHorizontal = D;
  static constexpr bool kUsesPosition = false;

  static void apply(const double*, const double* grad, double* gh)
  {
    for (int i = 0; i < D; ++i) gh[i] = grad[i];
  }
  static void apply_transpose(const double*, const double* dh, double* dgrad)
  {
    for (int i = 0; i < D; ++i) dgrad[i] = dh[i];
  }
};

template <int N>
struct HeisenbergFrame
{
  static constexpr int kDim = 2 * N + 1;
  static constexpr int kHorizontal = 2 * N;
  static constexpr bool kUsesPosition = true;

  static void apply(const double* x, const double* grad, double* gh)
  {
    const double dt = grad[2 * N];
    for (int i = 0; i < N; ++i) {
      gh[i] = grad[i] + 2.0 * x[N + i] * dt;
      gh[N + i] = grad[N + i] - 2.0 * x[i] * dt;
    }
  }
  static void apply_transpose(const double* x, const double* dh, double* dgrad)
  {
    double dt = 0.0;
    for (int i = 0; i < N; ++i) {
      dgrad[i] = dh[i];
      dgrad[N + i] = dh[N + i];
      dt += 2.0 * x[N + i] * dh[i] - 2.0 * x[i] * dh[N + i];
    }
    dgrad[2 * N] = dt;
  }
};

// s^(p/2) and s^(p/2 - 1) with a sqrt fast path for p a multiple of 1/2.
class HalfPower
{
 public:
  explicit HalfPower(double p) : p_(p)
  {
    const double quarters = 2.0 * p;  // p/2 in units of 1/4
    if (std::abs(quarters - std::round(quarters)) < 1e-12 && quarters >= 0 && quarters <= 64) {
      fast_ = true;
      const int q = static_cast<int>(std::round(quarters));
      whole_ = q / 4;
      frac_ = q % 4;
    }
  }

  double operator()(double s) const
  {
    if (!fast_) return std::pow(s, 0.5 * p_);
    double v = 1.0;
    for (int i = 0; i < whole_; ++i) v *= s;
    if (frac_ != 0) {
      const double r = std::sqrt(s);
      if (frac_ == 2) {
        v *= r;
      } else {
        const double r4 = std::sqrt(r);
        v *= frac_ == 1 ? r4 : r * r4;
      }
    }
    return v;
  }

  double p() const { return p_; }

 private:
  double p_;
  bool fast_ = false;
  int whole_ = 0;
  int frac_ = 0;
};

enum PassMode
{
  kValue = 0,
  kGradient = 1,
  kDiagonal = 2,
  kCurvature = 3,
};

struct PassInput
{
  const Grid* grid = nullptr;
  const std::vector<double>* cell_weight = nullptr;  // empty: all cells weight 1
  double p = 2.0;
  double eps = 0.0;
  const double* u = nullptr;
  const double* dir = nullptr;  // kCurvature only
  double* out = nullptr;        // kGradient / kDiagonal accumulate here
};

template <class Frame, int Mode>
double kuhn_pass(const PassInput& in)
{
  constexpr int D = Frame::kDim;
  constexpr int H = Frame::kHorizontal;
  constexpr int C = 1 << D;
  constexpr const KuhnTopology<D>& topo = kKuhnTopology<D>;
  const Grid& grid = *in.grid;
  const HalfPower power(in.p);
  const double p = in.p;
  const double eps2 = in.eps * in.eps;
  const bool weighted = in.cell_weight && !in.cell_weight->empty();

  std::array<std::size_t, C> offset{};
  for (int m = 0; m < C; ++m)
    for (int a = 0; a < D; ++a)
      if (m & (1 << a)) offset[m] += grid.stride(a);

  std::array<int, D> cell{};
  std::array<int, D> ncell{};
  for (int a = 0; a < D; ++a) ncell[a] = grid.cells(a);
  const std::size_t total = grid.cell_count();

  double acc = 0.0;
  double val[C];
  double dval[C];
  double local[C];
  double h[D], inv_h[D], lo[D];
  double x[D], grad[D], gh[H], dgrad[D], dh[H];

  for (std::size_t c = 0; c < total; ++c) {
    if (c > 0) {
      for (int a = D - 1; a >= 0; --a) {
        if (++cell[a] < ncell[a]) break;
        cell[a] = 0;
      }
    }
    const double w = weighted ? (*in.cell_weight)[c] : 1.0;
    if (w == 0.0) continue;

    std::size_t base = 0;
    double vol = w;
    for (int a = 0; a < D; ++a) {
      const auto& ax = grid.axis(a);
      base += static_cast<std::size_t>(cell[a]) * grid.stride(a);
      lo[a] = ax[cell[a]];
      h[a] = ax[cell[a] + 1] - lo[a];
      inv_h[a] = 1.0 / h[a];
      vol *= h[a];
    }
    vol /= topo.kSimplices;

    for (int m = 0; m < C; ++m) val[m] = in.u[base + offset[m]];
    if constexpr (Mode == kCurvature)
      for (int m = 0; m < C; ++m) dval[m] = in.dir[base + offset[m]];
    if constexpr (Mode == kGradient || Mode == kDiagonal)
      for (int m = 0; m < C; ++m) local[m] = 0.0;

#pragma GCC unroll 24
    for (int s = 0; s < topo.kSimplices; ++s) {
      const auto& ax = topo.axis[s];
      const auto& co = topo.corner[s];
      for (int k = 0; k < D; ++k) grad[ax[k]] = (val[co[k + 1]] - val[co[k]]) * inv_h[ax[k]];
      if constexpr (Frame::kUsesPosition)
        for (int a = 0; a < D; ++a) x[a] = lo[a] + topo.centroid[s][a] * h[a];
      Frame::apply(x, grad, gh);
      double s2 = eps2;
      for (int i = 0; i < H; ++i) s2 += gh[i] * gh[i];

      if constexpr (Mode == kValue) {
        acc += vol * power(s2);
      } else if constexpr (Mode == kGradient) {
        const double e = power(s2);
        acc += vol * e;
        const double coef = s2 > 0.0 ? vol * p * e / s2 : 0.0;
        for (int i = 0; i < H; ++i) dh[i] = coef * gh[i];
        Frame::apply_transpose(x, dh, dgrad);
        for (int k = 0; k < D; ++k) {
          const double flux = dgrad[ax[k]] * inv_h[ax[k]];
          local[co[k + 1]] += flux;
          local[co[k]] -= flux;
        }
      } else {
        const double e = power(s2);
        const double inv = s2 > 0.0 ? 1.0 / s2 : 0.0;
        const double a1 = vol * p * e * inv;                      // p s^(p/2-1)
        const double a2 = vol * p * (p - 2.0) * e * inv * inv;  // p (p-2) s^(p/2-2)
        if constexpr (Mode == kCurvature) {
          for (int k = 0; k < D; ++k) dgrad[ax[k]] = (dval[co[k + 1]] - dval[co[k]]) * inv_h[ax[k]];
          Frame::apply(x, dgrad, dh);
          double nn = 0.0, gd = 0.0;
          for (int i = 0; i < H; ++i) {
            nn += dh[i] * dh[i];
            gd += gh[i] * dh[i];
          }
          acc += a1 * nn + a2 * gd * gd;
        } else {
          // Vertex j enters grad[ax[j-1]] with +1/h and grad[ax[j]] with -1/h.
          for (int j = 0; j <= D; ++j) {
            for (int a = 0; a < D; ++a) dgrad[a] = 0.0;
            if (j > 0) dgrad[ax[j - 1]] += inv_h[ax[j - 1]];
            if (j < D) dgrad[ax[j]] -= inv_h[ax[j]];
            Frame::apply(x, dgrad, dh);
            double nn = 0.0, gd = 0.0;
            for (int i = 0; i < H; ++i) {
              nn += dh[i] * dh[i];
              gd += gh[i] * dh[i];
            }
            local[co[j]] += a1 * nn + a2 * gd * gd;
          }
        }
      }
    }
    if constexpr (Mode == kGradient || Mode == kDiagonal)
      for (int m = 0; m < C; ++m) in.out[base + offset[m]] += local[m];
  }
  return acc;
}

template <int Mode>
double dispatch_pass(const Group& group, const PassInput& in)
{
  require(in.grid->dim() == group.dim(), ErrorCode::dimension_mismatch, "grid dimension does not match group");
  if (group.is_abelian()) {
    switch (group.rank()) {
      case 1: return kuhn_pass<AbelianFrame<1>, Mode>(in);
      case 2: return kuhn_pass<AbelianFrame<2>, Mode>(in);
      case 3: return kuhn_pass<AbelianFrame<3>, Mode>(in);
      case 4: return kuhn_pass<AbelianFrame<4>, Mode>(in);
      case 5: return kuhn_pass<AbelianFrame<5>, Mode>(in);
      default: break;
    }
  } else {
    switch (group.rank()) {
      case 1: return kuhn_pass<HeisenbergFrame<1>, Mode>(in);
      case 2: return kuhn_pass<HeisenbergFrame<2>, Mode>(in);
      default: break;
    }
  }
  fail(ErrorCode::invalid_argument, "grid energies are implemented for R^1..R^5 and H^1, H^2 only; got " + group.name());
}

}  // namespace detail

// p-energy functional on a fixed grid, with optional per-cell weights in [0, 1].
class KuhnEnergy
{
 public:
  KuhnEnergy(Group group, Grid grid, double p, double eps = 0.0, std::vector<double> cell_weight = {})
      : group_(group), grid_(std::move(grid)), p_(p), eps_(eps), cell_weight_(std::move(cell_weight))
  {
    require(p >= 1.0, ErrorCode::invalid_argument, "energy exponent must be >= 1");
    require(cell_weight_.empty() || cell_weight_.size() == grid_.cell_count(), ErrorCode::dimension_mismatch,
            "cell weight count does not match grid");
  }

  double p() const { return p_; }
  double eps() const { return eps_; }
  const Grid& grid() const { return grid_; }
  const Group& group() const { return group_; }
  const std::vector<double>& cell_weight() const { return cell_weight_; }

  double value(const std::vector<double>& u) const { return detail::dispatch_pass<detail::kValue>(group_, input(u)); }

  // Overwrites grad with dE/du at every node.
  double value_and_gradient(const std::vector<double>& u, std::vector<double>& grad) const
  {
    grad.assign(u.size(), 0.0);
    auto in = input(u);
    in.out = grad.data();
    return detail::dispatch_pass<detail::kGradient>(group_, in);
  }

  // Diagonal of the Hessian at u.
  void hessian_diagonal(const std::vector<double>& u, std::vector<double>& diag) const
  {
    diag.assign(u.size(), 0.0);
    auto in = input(u);
    in.out = diag.data();
    detail::dispatch_pass<detail::kDiagonal>(group_, in);
  }

  // d^2/da^2 E(u + a dir) at a = 0.
  double curvature(const std::vector<double>& u, const std::vector<double>& dir) const
  {
    auto in = input(u);
    in.dir = dir.data();
    return detail::dispatch_pass<detail::kCurvature>(group_, in);
  }

 private:
  detail::PassInput input(const std::vector<double>& u) const
  {
    require(u.size() == grid_.node_count(), ErrorCode::dimension_mismatch, "field size does not match grid");
    detail::PassInput in;
    in.grid = &grid_;
    in.cell_weight = &cell_weight_;
    in.p = p_;
    in.eps = eps_;
    in.u = u.data();
    return in;
  }

  Group group_;
  Grid grid_;
  double p_;
  double eps_;
  std::vector<double> cell_weight_;
};

}  // namespace carnot
