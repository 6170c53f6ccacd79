#pragma once

// Concrete Carnot groups: abelian R^n and the Heisenberg groups H^n, both in
// graded exponential coordinates. H^n points are ordered (x_1..x_n, y_1..y_n, t)
// with product
//
//   (x, y, t) . (x', y', t') = (x + x', y + y', t + t' + 2 sum_i (x'_i y_i - x_i y'_i))
//
// whose left-invariant horizontal frame X_i = d/dx_i + 2 y_i d/dt,
// Y_i = d/dy_i - 2 x_i d/dt satisfies [X_i, Y_i] = -4 d/dt.

#include "carnot/common.hpp"
#include "carnot/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

namespace carnot
{

enum class GroupKind
{
  abelian,
  heisenberg,
};

class Group
{
 public:
  static Group abelian(int n)
  {
    require(n >= 1 && n <= kMaxDim, ErrorCode::invalid_argument, "abelian group dimension out of range");
    return Group(GroupKind::abelian, n);
  }

  static Group heisenberg(int n)
  {
    require(n >= 1 && 2 * n + 1 <= kMaxDim, ErrorCode::invalid_argument, "Heisenberg group rank out of range");
    return Group(GroupKind::heisenberg, n);
  }

  // Accepts "R2", "H1", "abelian(3)", "heisenberg(1)".
  static Group parse(std::string_view text)
  {
    auto number = [&](std::string_view digits) {
      int value = 0;
      bool any = false;
      for (char c : digits) {
        if (c == ' ') continue;
        if (c < '0' || c > '9') fail(ErrorCode::config, "bad group spec '" + std::string(text) + "'");
        value = value * 10 + (c - '0');
        any = true;
      }
      if (!any) fail(ErrorCode::config, "bad group spec '" + std::string(text) + "'");
      return value;
    };
    auto in_parens = [&](std::string_view prefix) -> std::string_view {
      std::string_view rest = text.substr(prefix.size());
      if (rest.size() < 2 || rest.front() != '(' || rest.back() != ')')
        fail(ErrorCode::config, "bad group spec '" + std::string(text) + "'");
      return rest.substr(1, rest.size() - 2);
    };
    if (text.starts_with("abelian")) return abelian(number(in_parens("abelian")));
    if (text.starts_with("heisenberg")) return heisenberg(number(in_parens("heisenberg")));
    if (text.size() >= 2 && (text[0] == 'R' || text[0] == 'r')) return abelian(number(text.substr(1)));
    if (text.size() >= 2 && (text[0] == 'H' || text[0] == 'h')) return heisenberg(number(text.substr(1)));
    fail(ErrorCode::config, "unknown group '" + std::string(text) + "'");
  }

  GroupKind kind() const { return kind_; }
  bool is_abelian() const { return kind_ == GroupKind::abelian; }

  // n for R^n and H^n.
  int rank() const { return rank_; }

  // Topological dimension N = sum of strata dimensions.
  int dim() const { return is_abelian() ? rank_ : 2 * rank_ + 1; }

  // n_1 = dim V_1.
  int horizontal_dim() const { return is_abelian() ? rank_ : 2 * rank_; }

  // Homogeneous dimension nu = sum_i i * dim V_i.
  int hom_dim() const { return is_abelian() ? rank_ : 2 * rank_ + 2; }

  std::vector<int> strata_dims() const
  {
    if (is_abelian()) return {rank_};
    return {2 * rank_, 1};
  }

  // Stratum (1 or 2) that a coordinate belongs to; dilations scale it by t^weight.
  int weight(int coord) const { return (!is_abelian() && coord == dim() - 1) ? 2 : 1; }

  // Constant c in rho(a b) <= c (rho(a) + rho(b)). Both the Euclidean norm and
  // the Koranyi gauge for this group law are genuine metrics, so c = 1;
  // measured_triangle_constant() checks it empirically.
  double triangle_constant() const { return 1.0; }

  std::string name() const { return (is_abelian() ? "R" : "H") + std::to_string(rank_); }

  Point identity() const { return Point::Zero(dim()); }

  void check(const Point& a) const
  {
    require(a.size() == dim(), ErrorCode::dimension_mismatch,
            "point of dimension " + std::to_string(a.size()) + " used with group " + name());
    require(a.allFinite(), ErrorCode::non_finite, "point has non-finite coordinates");
  }

  friend bool operator==(const Group& a, const Group& b) { return a.kind_ == b.kind_ && a.rank_ == b.rank_; }

 private:
  Group(GroupKind kind, int rank) : kind_(kind), rank_(rank) {}

  GroupKind kind_;
  int rank_;
};

inline Point compose(const Group& g, const Point& a, const Point& b)
{
  g.check(a);
  g.check(b);
  Point c = a + b;
  if (!g.is_abelian()) {
    const int n = g.rank();
    double twist = 0.0;
    for (int i = 0; i < n; ++i) twist += b[i] * a[n + i] - a[i] * b[n + i];
    c[2 * n] += 2.0 * twist;
  }
  return c;
}

// The symplectic twist is antisymmetric, so inversion is plain negation for
// both supported groups.
inline Point inverse(const Group& g, const Point& a)
{
  g.check(a);
  return -a;
}

inline Point dilate(const Group& g, double t, const Point& a)
{
  require(t > 0.0, ErrorCode::invalid_argument, "dilation factor must be positive");
  g.check(a);
  Point b = a;
  for (int k = 0; k < g.dim(); ++k) b[k] *= g.weight(k) == 2 ? t * t : t;
  return b;
}

// Euclidean norm on R^n; Koranyi gauge ((|x|^2 + |y|^2)^2 + t^2)^(1/4) on H^n.
inline double gauge_norm(const Group& g, const Point& a)
{
  g.check(a);
  if (g.is_abelian()) return a.norm();
  const int m = g.horizontal_dim();
  const double z2 = a.head(m).squaredNorm();
  const double t = a[m];
  return std::sqrt(std::sqrt(z2 * z2 + t * t));
}

// Left-invariant gauge distance rho(a^-1 b).
inline double distance(const Group& g, const Point& a, const Point& b)
{
  return gauge_norm(g, compose(g, inverse(g, a), b));
}

// Coordinate coefficients of the horizontal frame at a, as an N x n_1 matrix
// whose column j is X_j(a).
// Surface area of the unit sphere in R^n.
inline double unit_sphere_area(int n) { return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n); }

inline SmallMatrix horizontal_frame(const Group& g, const Point& a)
{
  g.check(a);
  const int n1 = g.horizontal_dim();
  SmallMatrix frame = SmallMatrix::Zero(g.dim(), n1);
  frame.topRows(n1).setIdentity();
  if (!g.is_abelian()) {
    const int n = g.rank();
    for (int i = 0; i < n; ++i) {
      frame(2 * n, i) = 2.0 * a[n + i];
      frame(2 * n, n + i) = -2.0 * a[i];
    }
  }
  return frame;
}

using ScalarField = std::function<double(const Point&)>;

// X_j u(x) by a central difference along the flow s -> x exp(s e_j).
inline double frame_derivative(const Group& g, const ScalarField& u, const Point& x, int j, double h)
{
  Point step = Point::Zero(g.dim());
  step[j] = h;
  return (u(compose(g, x, step)) - u(compose(g, x, -step))) / (2.0 * h);
}

// [X_i, X_j] u(x) from nested central differences; O(h^2) for smooth u.
inline double frame_commutator(const Group& g, const ScalarField& u, const Point& x, int i, int j, double h)
{
  const ScalarField xj = [&](const Point& y) { return frame_derivative(g, u, y, j, h); };
  const ScalarField xi = [&](const Point& y) { return frame_derivative(g, u, y, i, h); };
  return frame_derivative(g, xj, x, i, h) - frame_derivative(g, xi, x, j, h);
}

// Central difference along the last coordinate (d/dt on H^n).
inline double vertical_derivative(const Group& g, const ScalarField& u, const Point& x, double h)
{
  Point e = Point::Zero(g.dim());
  e[g.dim() - 1] = h;
  return (u(x + e) - u(x - e)) / (2.0 * h);
}

// Axis-aligned box containing the closed gauge ball B(0, r).
inline std::pair<Point, Point> gauge_ball_bounds(const Group& g, double r)
{
  Point hi(g.dim());
  for (int k = 0; k < g.dim(); ++k) hi[k] = g.weight(k) == 2 ? r * r : r;
  return {-hi, hi};
}

struct VolumeEstimate
{
  double value = 0.0;
  double std_error = 0.0;
  std::size_t samples = 0;
};

// Monte Carlo Haar (= Lebesgue) volume of the gauge ball B(0, r).
inline VolumeEstimate ball_volume(const Group& g, double r, std::size_t samples, Rng& rng)
{
  require(samples > 0, ErrorCode::invalid_argument, "ball_volume needs at least one sample");
  require(r >= 0.0, ErrorCode::invalid_argument, "ball radius must be nonnegative");
  VolumeEstimate out;
  out.samples = samples;
  if (r == 0.0) return out;
  const auto [lo, hi] = gauge_ball_bounds(g, r);
  double box = 1.0;
  for (int k = 0; k < g.dim(); ++k) box *= hi[k] - lo[k];
  std::size_t inside = 0;
  Point x(g.dim());
  for (std::size_t i = 0; i < samples; ++i) {
    for (int k = 0; k < g.dim(); ++k) x[k] = rng.uniform(lo[k], hi[k]);
    if (gauge_norm(g, x) <= r) ++inside;
  }
  const double frac = static_cast<double>(inside) / static_cast<double>(samples);
  out.value = box * frac;
  out.std_error = box * std::sqrt(frac * (1.0 - frac) / static_cast<double>(samples));
  return out;
}

// Empirical sup of rho(a b) / (rho(a) + rho(b)): random pairs over several
// scales, then a local random search from the best candidates.
inline double measured_triangle_constant(const Group& g, std::size_t pairs, Rng& rng)
{
  require(pairs > 0, ErrorCode::invalid_argument, "need at least one pair");
  const int dim = g.dim();
  auto random_point = [&]() {
    Point a(dim);
    const double scale = std::exp(rng.uniform(-2.0, 2.0));
    for (int k = 0; k < dim; ++k) a[k] = rng.uniform(-1.0, 1.0);
    return dilate(g, scale, a);
  };
  auto ratio = [&](const Point& a, const Point& b) {
    const double denom = gauge_norm(g, a) + gauge_norm(g, b);
    return denom > 0.0 ? gauge_norm(g, compose(g, a, b)) / denom : 0.0;
  };

  struct Candidate
  {
    double value;
    Point a, b;
  };
  std::vector<Candidate> best;
  const std::size_t keep = 8;
  for (std::size_t i = 0; i < pairs; ++i) {
    Point a = random_point();
    Point b = random_point();
    const double v = ratio(a, b);
    if (best.size() < keep || v > best.back().value) {
      best.push_back({v, a, b});
      std::sort(best.begin(), best.end(), [](const Candidate& x, const Candidate& y) { return x.value > y.value; });
      if (best.size() > keep) best.pop_back();
    }
  }

  double sup = 0.0;
  for (auto& c : best) {
    double step = 0.1;
    for (int iter = 0; iter < 400; ++iter) {
      Point a = c.a, b = c.b;
      const double sa = std::max(gauge_norm(g, a), 1e-12), sb = std::max(gauge_norm(g, b), 1e-12);
      for (int k = 0; k < dim; ++k) {
        a[k] += step * (g.weight(k) == 2 ? sa * sa : sa) * rng.uniform(-1.0, 1.0);
        b[k] += step * (g.weight(k) == 2 ? sb * sb : sb) * rng.uniform(-1.0, 1.0);
      }
      const double v = ratio(a, b);
      if (v > c.value) {
        c = {v, a, b};
      } else if (iter % 40 == 39) {
        step *= 0.5;
      }
    }
    sup = std::max(sup, c.value);
  }
  return sup;
}

}  // namespace carnot
