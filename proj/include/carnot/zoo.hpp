#pragma once

// Example mappings with closed-form differentials, Jacobians, preimages and
// branch data, plus a registry addressable by name, e.g. "winding(k=3)".

#include "carnot/calculus.hpp"
#include "carnot/common.hpp"
#include "carnot/format.hpp"
#include "carnot/group.hpp"
#include "carnot/mapping.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace carnot
{

namespace detail
{
// Bounds of an affine map's image of a box are attained at corners.
inline Box corner_image_bounds(const Mapping& f, const Box& box)
{
  const int d = box.dim();
  Box out{Point::Constant(d, INFINITY), Point::Constant(d, -INFINITY)};
  for (int c = 0; c < (1 << d); ++c) {
    Point x(d);
    for (int a = 0; a < d; ++a) x[a] = (c >> a) & 1 ? box.hi[a] : box.lo[a];
    const Point y = f.eval(x);
    out.lo = out.lo.cwiseMin(y);
    out.hi = out.hi.cwiseMax(y);
  }
  return out;
}
}  // namespace detail

class IdentityMap final : public Mapping
{
 public:
  explicit IdentityMap(Group g) : Mapping(g) {}
  std::string name() const override { return "identity"; }
  Point eval(const Point& x) const override { return x; }
  SmallMatrix hdiff(const Point&) const override
  {
    const int n1 = source().horizontal_dim();
    return SmallMatrix::Identity(n1, n1);
  }
  double jacobian(const Point&) const override { return 1.0; }
  std::vector<Point> preimages(const Point& y) const override { return {y}; }
  std::optional<Box> image_bounds(const Box& b) const override { return b; }
  bool is_identity() const override { return true; }
};

// x -> a . x; the frame is left-invariant, so D_H f = I.
class LeftTranslation final : public Mapping
{
 public:
  LeftTranslation(Group g, Point a) : Mapping(g), a_(std::move(a)) { g.check(a_); }
  std::string name() const override
  {
    std::string s = "translation(";
    for (int i = 0; i < a_.size(); ++i) s += (i ? "," : "") + format_double(a_[i]);
    return s + ")";
  }
  Point eval(const Point& x) const override { return compose(source(), a_, x); }
  SmallMatrix hdiff(const Point&) const override
  {
    const int n1 = source().horizontal_dim();
    return SmallMatrix::Identity(n1, n1);
  }
  double jacobian(const Point&) const override { return 1.0; }
  std::vector<Point> preimages(const Point& y) const override { return {compose(source(), inverse(source(), a_), y)}; }
  std::optional<Box> image_bounds(const Box& b) const override { return detail::corner_image_bounds(*this, b); }

 private:
  Point a_;
};

class DilationMap final : public Mapping
{
 public:
  DilationMap(Group g, double t) : Mapping(g), t_(t)
  {
    require(t > 0.0, ErrorCode::invalid_argument, "dilation factor must be positive");
  }
  std::string name() const override { return "dilation(t=" + format_double(t_) + ")"; }
  double factor() const { return t_; }
  Point eval(const Point& x) const override { return dilate(source(), t_, x); }
  SmallMatrix hdiff(const Point&) const override
  {
    const int n1 = source().horizontal_dim();
    return t_ * SmallMatrix::Identity(n1, n1);
  }
  double jacobian(const Point&) const override { return std::pow(t_, source().hom_dim()); }
  std::vector<Point> preimages(const Point& y) const override { return {dilate(source(), 1.0 / t_, y)}; }
  std::optional<Box> image_bounds(const Box& b) const override { return detail::corner_image_bounds(*this, b); }

 private:
  double t_;
};

// Rotation by theta in the (x_1, x_2) plane of R^n, or in every (x_i, y_i)
// plane of H^n (a unitary automorphism fixing t).
class RotationMap final : public Mapping
{
 public:
  RotationMap(Group g, double theta) : Mapping(g), theta_(theta)
  {
    require(!g.is_abelian() || g.rank() >= 2, ErrorCode::invalid_argument, "rotation needs R^n with n >= 2");
  }
  std::string name() const override { return "rotation(theta=" + format_double(theta_) + ")"; }
  Point eval(const Point& x) const override { return apply(x, theta_); }
  SmallMatrix hdiff(const Point&) const override
  {
    const int n1 = source().horizontal_dim();
    SmallMatrix m = SmallMatrix::Identity(n1, n1);
    const double c = std::cos(theta_), s = std::sin(theta_);
    for (auto [i, j] : planes()) {
      m(i, i) = c;
      m(i, j) = -s;
      m(j, i) = s;
      m(j, j) = c;
    }
    return m;
  }
  double jacobian(const Point&) const override { return 1.0; }
  std::vector<Point> preimages(const Point& y) const override { return {apply(y, -theta_)}; }
  std::optional<Box> image_bounds(const Box& b) const override { return detail::corner_image_bounds(*this, b); }

 private:
  std::vector<std::pair<int, int>> planes() const
  {
    if (source().is_abelian()) return {{0, 1}};
    std::vector<std::pair<int, int>> out;
    for (int i = 0; i < source().rank(); ++i) out.emplace_back(i, source().rank() + i);
    return out;
  }
  Point apply(const Point& x, double theta) const
  {
    Point y = x;
    const double c = std::cos(theta), s = std::sin(theta);
    for (auto [i, j] : planes()) {
      y[i] = c * x[i] - s * x[j];
      y[j] = s * x[i] + c * x[j];
    }
    return y;
  }

  double theta_;
};

class LinearMap final : public Mapping
{
 public:
  LinearMap(Group g, SmallMatrix a) : Mapping(g), a_(std::move(a))
  {
    require(g.is_abelian(), ErrorCode::invalid_argument, "linear maps are defined on R^n only");
    require(a_.rows() == g.dim() && a_.cols() == g.dim(), ErrorCode::dimension_mismatch, "matrix size does not match group");
    require(a_.allFinite(), ErrorCode::non_finite, "matrix has non-finite entries");
    det_ = a_.determinant();
    require(det_ > 0.0, ErrorCode::sense_reversing, "linear map needs det A > 0");
    inv_ = a_.inverse();
  }
  std::string name() const override
  {
    bool diagonal = true;
    for (int i = 0; i < a_.rows(); ++i)
      for (int j = 0; j < a_.cols(); ++j)
        if (i != j && a_(i, j) != 0.0) diagonal = false;
    std::string s = diagonal ? "diag(" : "linear(";
    bool first = true;
    for (int i = 0; i < a_.rows(); ++i)
      for (int j = 0; j < a_.cols(); ++j) {
        if (diagonal && i != j) continue;
        s += (first ? "" : ",") + format_double(a_(i, j));
        first = false;
      }
    return s + ")";
  }
  const SmallMatrix& matrix() const { return a_; }
  Point eval(const Point& x) const override { return a_ * x; }
  SmallMatrix hdiff(const Point&) const override { return a_; }
  double jacobian(const Point&) const override { return det_; }
  std::vector<Point> preimages(const Point& y) const override { return {inv_ * y}; }
  std::optional<Box> image_bounds(const Box& b) const override { return detail::corner_image_bounds(*this, b); }

 private:
  SmallMatrix a_, inv_;
  double det_ = 1.0;
};

// Planar winding (rho, theta) -> (rho, k theta): open, discrete, k-to-1 off
// the origin, branch set {0} with index k. Singular values (1, k), J = k.
class WindingMap final : public Mapping
{
 public:
  WindingMap(Group g, int k) : Mapping(g), k_(k)
  {
    require(g.is_abelian() && g.rank() == 2, ErrorCode::invalid_argument, "winding map is planar (R2)");
    require(k >= 2, ErrorCode::invalid_argument, "winding map needs k >= 2");
  }
  std::string name() const override { return "winding(k=" + std::to_string(k_) + ")"; }
  int k() const { return k_; }
  Point eval(const Point& x) const override
  {
    const double r = std::hypot(x[0], x[1]);
    if (r == 0.0) return Point::Zero(2);
    const double th = k_ * std::atan2(x[1], x[0]);
    Point y(2);
    y << r * std::cos(th), r * std::sin(th);
    return y;
  }
  // R(k theta) diag(1, k) R(-theta) in the Cartesian frame; at the origin
  // the angle is taken as 0.
  SmallMatrix hdiff(const Point& x) const override
  {
    const double th = (x[0] == 0.0 && x[1] == 0.0) ? 0.0 : std::atan2(x[1], x[0]);
    const double c1 = std::cos(th), s1 = std::sin(th), ck = std::cos(k_ * th), sk = std::sin(k_ * th);
    SmallMatrix rk(2, 2), r1t(2, 2), d(2, 2);
    rk << ck, -sk, sk, ck;
    r1t << c1, s1, -s1, c1;
    d << 1.0, 0.0, 0.0, static_cast<double>(k_);
    return rk * d * r1t;
  }
  double jacobian(const Point&) const override { return k_; }
  int index(const Point& x) const override { return (x[0] == 0.0 && x[1] == 0.0) ? k_ : 1; }
  std::vector<Point> preimages(const Point& y) const override
  {
    const double r = std::hypot(y[0], y[1]);
    if (r == 0.0) return {Point::Zero(2)};
    const double phi = std::atan2(y[1], y[0]);
    std::vector<Point> out;
    for (int j = 0; j < k_; ++j) {
      const double th = (phi + 2.0 * std::numbers::pi * j) / k_;
      Point z(2);
      z << r * std::cos(th), r * std::sin(th);
      out.push_back(z);
    }
    return out;
  }
  bool is_homeomorphism() const override { return false; }
  // The image of a box is the disk of its farthest corner, clipped.
  std::optional<Box> image_bounds(const Box& b) const override
  {
    double r = 0.0;
    for (int c = 0; c < 4; ++c) r = std::max(r, std::hypot(c & 1 ? b.hi[0] : b.lo[0], c & 2 ? b.hi[1] : b.lo[1]));
    return Box{Point::Constant(2, -r), Point::Constant(2, r)};
  }

 private:
  int k_;
};

// x -> x |x|^(alpha - 1) on R^n. Singular values alpha |x|^(alpha-1) (radial)
// and |x|^(alpha-1) (tangential); J = alpha |x|^(n (alpha - 1)).
class RadialPowerMap final : public Mapping
{
 public:
  RadialPowerMap(Group g, double alpha) : Mapping(g), alpha_(alpha)
  {
    require(g.is_abelian(), ErrorCode::invalid_argument, "radial power map is defined on R^n only");
    require(alpha > 0.0, ErrorCode::invalid_argument, "radial power needs alpha > 0");
  }
  std::string name() const override { return "radial_power(alpha=" + format_double(alpha_) + ")"; }
  double alpha() const { return alpha_; }
  Point eval(const Point& x) const override
  {
    const double r = x.norm();
    if (r == 0.0) return x;
    return x * std::pow(r, alpha_ - 1.0);
  }
  SmallMatrix hdiff(const Point& x) const override
  {
    const int n = source().dim();
    const double r = x.norm();
    if (r == 0.0) {
      if (alpha_ == 1.0) return SmallMatrix::Identity(n, n);
      if (alpha_ > 1.0) return SmallMatrix::Zero(n, n);
      fail(ErrorCode::non_finite, "radial power with alpha < 1 is not differentiable at the origin");
    }
    const Point u = x / r;
    return std::pow(r, alpha_ - 1.0) * (SmallMatrix::Identity(n, n) + (alpha_ - 1.0) * u * u.transpose());
  }
  double jacobian(const Point& x) const override
  {
    const double r = x.norm();
    const int n = source().dim();
    if (r == 0.0) {
      if (alpha_ == 1.0) return 1.0;
      if (alpha_ > 1.0) return 0.0;
      fail(ErrorCode::non_finite, "radial power with alpha < 1 is not differentiable at the origin");
    }
    return alpha_ * std::pow(r, n * (alpha_ - 1.0));
  }
  std::vector<Point> preimages(const Point& y) const override
  {
    const double r = y.norm();
    if (r == 0.0) return {y};
    return {y * std::pow(r, 1.0 / alpha_ - 1.0)};
  }
  // |f(x)| = |x|^alpha and f preserves directions: each coordinate's range is
  // bounded by the image of the farthest corner.
  std::optional<Box> image_bounds(const Box& b) const override
  {
    double r = 0.0;
    const int d = b.dim();
    for (int c = 0; c < (1 << d); ++c) {
      Point x(d);
      for (int a = 0; a < d; ++a) x[a] = (c >> a) & 1 ? b.hi[a] : b.lo[a];
      r = std::max(r, x.norm());
    }
    const double ra = std::pow(r, alpha_);
    return Box{Point::Constant(d, -ra), Point::Constant(d, ra)};
  }

 private:
  double alpha_;
};

// (x, y, t) -> (a x, b y, a b t) on H^n: a contact non-conformal map with
// D_H f = diag(a I, b I), J = (a b)^(n+1).
class HeisenbergAnisotropic final : public Mapping
{
 public:
  HeisenbergAnisotropic(Group g, double a, double b) : Mapping(g), a_(a), b_(b)
  {
    require(!g.is_abelian(), ErrorCode::invalid_argument, "anisotropic map is defined on H^n only");
    require(a > 0.0 && b > 0.0, ErrorCode::invalid_argument, "anisotropic map needs a, b > 0");
  }
  std::string name() const override { return "anisotropic(a=" + format_double(a_) + ",b=" + format_double(b_) + ")"; }
  Point eval(const Point& x) const override { return scale(x, a_, b_); }
  SmallMatrix hdiff(const Point&) const override
  {
    const int n = source().rank();
    SmallMatrix m = SmallMatrix::Zero(2 * n, 2 * n);
    for (int i = 0; i < n; ++i) {
      m(i, i) = a_;
      m(n + i, n + i) = b_;
    }
    return m;
  }
  double jacobian(const Point&) const override { return std::pow(a_ * b_, source().rank() + 1); }
  std::vector<Point> preimages(const Point& y) const override { return {scale(y, 1.0 / a_, 1.0 / b_)}; }
  std::optional<Box> image_bounds(const Box& b) const override { return detail::corner_image_bounds(*this, b); }

 private:
  Point scale(const Point& x, double a, double b) const
  {
    const int n = source().rank();
    Point y = x;
    for (int i = 0; i < n; ++i) {
      y[i] *= a;
      y[n + i] *= b;
    }
    y[2 * n] *= a * b;
    return y;
  }

  double a_, b_;
};

struct ZooEntry
{
  std::string name;
  std::string family;
  MappingPtr map;
  std::string admissible;  // exponent range with bounded (p, q)-distortion
  std::string kp_formula;
  std::function<double(const Point&, double)> kp;  // analytic K_p(x, f)
  std::function<bool(double, double)> admits;      // (p, q) in range
  std::string notes;
};

namespace detail
{

struct ZooCall
{
  std::string family;
  std::vector<double> positional;
  std::map<std::string, double> named;

  double get(const std::string& key, std::size_t position, std::optional<double> fallback = std::nullopt) const
  {
    if (auto it = named.find(key); it != named.end()) return it->second;
    if (position < positional.size()) return positional[position];
    if (fallback) return *fallback;
    fail(ErrorCode::config, "zoo entry '" + family + "' needs parameter '" + key + "'");
  }
};

inline std::string trim(std::string_view s)
{
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

inline ZooCall parse_zoo_call(std::string_view text)
{
  ZooCall call;
  const std::string s = trim(text);
  const auto open = s.find('(');
  if (open == std::string::npos) {
    call.family = s;
    return call;
  }
  if (s.back() != ')') fail(ErrorCode::config, "bad zoo spec '" + s + "'");
  call.family = trim(std::string_view(s).substr(0, open));
  const std::string args = s.substr(open + 1, s.size() - open - 2);
  std::size_t start = 0;
  while (start <= args.size()) {
    auto comma = args.find(',', start);
    if (comma == std::string::npos) comma = args.size();
    const std::string item = trim(std::string_view(args).substr(start, comma - start));
    if (!item.empty()) {
      const auto eq = item.find('=');
      if (eq == std::string::npos) {
        if (!call.named.empty()) fail(ErrorCode::config, "positional argument after named one in '" + s + "'");
        call.positional.push_back(parse_double(item));
      } else {
        call.named[trim(std::string_view(item).substr(0, eq))] = parse_double(trim(std::string_view(item).substr(eq + 1)));
      }
    }
    start = comma + 1;
  }
  return call;
}

}  // namespace detail

inline ZooEntry zoo_identity(const Group& g)
{
  return {"identity", "identity", std::make_shared<IdentityMap>(g), "1 <= q <= p", "K_p = 1",
          [](const Point&, double) { return 1.0; }, [](double p, double q) { return 1.0 <= q && q <= p; }, ""};
}

inline ZooEntry zoo_left_translation(const Group& g, const Point& a)
{
  auto f = std::make_shared<LeftTranslation>(g, a);
  return {f->name(), "translation", f, "1 <= q <= p", "K_p = 1", [](const Point&, double) { return 1.0; },
          [](double p, double q) { return 1.0 <= q && q <= p; }, "isometry of the gauge distance"};
}

inline ZooEntry zoo_dilation(const Group& g, double t)
{
  auto f = std::make_shared<DilationMap>(g, t);
  const double nu = g.hom_dim();
  return {f->name(), "dilation", f, "1 <= q <= p", "K_p = t^(1 - nu/p)",
          [t, nu](const Point&, double p) { return std::pow(t, 1.0 - nu / p); },
          [](double p, double q) { return 1.0 <= q && q <= p; }, "conformal at p = nu"};
}

inline ZooEntry zoo_rotation(const Group& g, double theta)
{
  auto f = std::make_shared<RotationMap>(g, theta);
  return {f->name(), "rotation", f, "1 <= q <= p", "K_p = 1", [](const Point&, double) { return 1.0; },
          [](double p, double q) { return 1.0 <= q && q <= p; }, ""};
}

inline ZooEntry zoo_linear(const Group& g, const SmallMatrix& a)
{
  auto f = std::make_shared<LinearMap>(g, a);
  const double norm = operator_norm_horizontal(a), det = a.determinant();
  return {f->name(), "linear", f, "1 <= q <= p", "K_p = |A| / det(A)^(1/p)",
          [norm, det](const Point&, double p) { return norm / std::pow(det, 1.0 / p); },
          [](double p, double q) { return 1.0 <= q && q <= p; }, ""};
}

inline ZooEntry zoo_winding(const Group& g, int k)
{
  auto f = std::make_shared<WindingMap>(g, k);
  return {f->name(), "winding", f, "1 <= q <= p", "K_p = k^(1 - 1/p)",
          [k](const Point&, double p) { return std::pow(k, 1.0 - 1.0 / p); },
          [](double p, double q) { return 1.0 <= q && q <= p; }, "branch set {0}, i(0) = k, N = k on annuli about 0"};
}

// K_p(x) = c |x|^beta with c = max(alpha, 1) / alpha^(1/p) and
// beta = (alpha - 1)(1 - n/p).
inline double radial_power_kp(int n, double alpha, double p, double r)
{
  const double c = std::max(alpha, 1.0) / std::pow(alpha, 1.0 / p);
  const double beta = (alpha - 1.0) * (1.0 - n / p);
  return c * std::pow(r, beta);
}

// K_p in L_kappa near the origin iff kappa beta + n > 0 (always when p == q and
// beta >= 0).
inline bool radial_power_admits(int n, double alpha, double p, double q)
{
  if (!(1.0 <= q && q <= p)) return false;
  const double beta = (alpha - 1.0) * (1.0 - n / p);
  if (p == q) return beta >= 0.0;
  const double kappa = p * q / (p - q);
  return kappa * beta + n > 0.0;
}

// ||K_p | L_kappa(B(0, R))||^kappa from the one-dimensional radial integral.
inline double radial_power_kappa_integral(int n, double alpha, double p, double q, double R)
{
  require(q < p, ErrorCode::invalid_argument, "radial integral needs q < p");
  require(radial_power_admits(n, alpha, p, q), ErrorCode::precondition, "K_p is not kappa-integrable");
  const double kappa = p * q / (p - q);
  const double c = std::max(alpha, 1.0) / std::pow(alpha, 1.0 / p);
  const double beta = (alpha - 1.0) * (1.0 - n / p);
  const double e = kappa * beta + n;
  return std::pow(c, kappa) * unit_sphere_area(n) * std::pow(R, e) / e;
}

inline ZooEntry zoo_radial_power(const Group& g, double alpha)
{
  auto f = std::make_shared<RadialPowerMap>(g, alpha);
  const int n = g.dim();
  return {f->name(), "radial_power", f, "q <= p, kappa (alpha-1)(1-n/p) + n > 0 (p = q: (alpha-1)(1-n/p) >= 0)",
          "K_p = max(alpha,1)/alpha^(1/p) |x|^((alpha-1)(1-n/p))",
          [n, alpha](const Point& x, double p) { return radial_power_kp(n, alpha, p, x.norm()); },
          [n, alpha](double p, double q) { return radial_power_admits(n, alpha, p, q); }, "constant K_p at p = n"};
}

inline ZooEntry zoo_heisenberg_anisotropic(const Group& g, double a, double b)
{
  auto f = std::make_shared<HeisenbergAnisotropic>(g, a, b);
  const int n = g.rank();
  return {f->name(), "anisotropic", f, "1 <= q <= p", "K_p = max(a,b) / (ab)^((n+1)/p)",
          [a, b, n](const Point&, double p) { return std::max(a, b) / std::pow(a * b, (n + 1.0) / p); },
          [](double p, double q) { return 1.0 <= q && q <= p; }, "contact, not conformal unless a = b"};
}

// Builds an entry from text: "identity", "translation(1,0,0)",
// "dilation(t=2)", "rotation(theta=0.5)", "diag(2,1)", "linear(a11,a12,a21,a22)",
// "winding(k=3)" or "winding(3)", "radial_power(alpha=2)", "anisotropic(a=2,b=1)".
inline ZooEntry make_zoo_entry(const Group& g, std::string_view text)
{
  const detail::ZooCall call = detail::parse_zoo_call(text);
  const std::string& fam = call.family;
  if (fam == "identity") return zoo_identity(g);
  if (fam == "translation") {
    require(static_cast<int>(call.positional.size()) == g.dim(), ErrorCode::config,
            "translation needs " + std::to_string(g.dim()) + " coordinates");
    Point a(g.dim());
    for (int i = 0; i < g.dim(); ++i) a[i] = call.positional[i];
    return zoo_left_translation(g, a);
  }
  if (fam == "dilation") return zoo_dilation(g, call.get("t", 0));
  if (fam == "rotation") return zoo_rotation(g, call.get("theta", 0));
  if (fam == "diag" || fam == "linear") {
    const int n = g.dim();
    SmallMatrix a = SmallMatrix::Zero(n, n);
    if (fam == "diag") {
      require(static_cast<int>(call.positional.size()) == n, ErrorCode::config, "diag needs " + std::to_string(n) + " entries");
      for (int i = 0; i < n; ++i) a(i, i) = call.positional[i];
    } else {
      require(static_cast<int>(call.positional.size()) == n * n, ErrorCode::config,
              "linear needs " + std::to_string(n * n) + " entries (row-major)");
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = call.positional[i * n + j];
    }
    return zoo_linear(g, a);
  }
  if (fam == "winding") {
    const double k = call.get("k", 0);
    require(k == std::round(k), ErrorCode::config, "winding number must be an integer");
    return zoo_winding(g, static_cast<int>(k));
  }
  if (fam == "radial_power") return zoo_radial_power(g, call.get("alpha", 0));
  if (fam == "anisotropic") return zoo_heisenberg_anisotropic(g, call.get("a", 0), call.get("b", 1));
  fail(ErrorCode::config, "unknown zoo entry '" + fam + "'");
}

// Default-parameter entries valid on g, in a fixed order.
inline std::vector<ZooEntry> zoo_list(const Group& g)
{
  std::vector<std::string> names{"identity"};
  if (g.is_abelian()) {
    names.push_back("translation(" + std::string(g.dim() == 1 ? "1" : g.dim() == 2 ? "1,0" : "1,0,0") + ")");
  } else if (g.rank() == 1) {
    names.push_back("translation(1,0,0)");
  }
  names.push_back("dilation(t=2)");
  if (!g.is_abelian() || g.rank() >= 2) names.push_back("rotation(theta=0.5)");
  if (g.is_abelian() && g.rank() == 2) {
    names.insert(names.end(), {"diag(2,1)", "winding(k=2)", "winding(k=3)"});
  }
  if (g.is_abelian()) names.push_back("radial_power(alpha=2)");
  if (!g.is_abelian()) names.push_back("anisotropic(a=2,b=1)");
  std::vector<ZooEntry> out;
  for (const auto& n : names) out.push_back(make_zoo_entry(g, n));
  return out;
}

}  // namespace carnot
