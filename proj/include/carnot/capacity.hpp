#pragma once

// Variational p-capacity of condensers:
//
//   cp_p(F0, F1; D) = inf over admissible v of the integral over D of |grad_H v|^p,
//
// v = 0 on F0 and v = 1 on F1, computed as the minimum of the discrete
// p-energy (see kuhn.hpp) over nodal fields with those values pinned.

#include "carnot/calculus.hpp"
#include "carnot/common.hpp"
#include "carnot/grid.hpp"
#include "carnot/group.hpp"
#include "carnot/kuhn.hpp"
#include "carnot/mapping.hpp"
#include "carnot/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <future>
#include <map>
#include <mutex>
#include <numbers>
#include <string>
#include <thread>
#include <vector>

namespace carnot
{

// A condenser (F0, F1; D). Nodes in F1 are pinned to 1, nodes in F0 to 0,
// nodes in D are free and anything else is outside the problem (cells
// touching it carry no energy). The plates are closed regions: v = 1 on all
// of F1 is admissible, so F1 may be "filled in".
struct Condenser
{
  Box box;
  Predicate domain;
  Predicate plate0;
  Predicate plate1;
  std::string label;
  // Optional per-axis spacing at the box center for sinh-graded grids;
  // empty means uniform grids.
  std::vector<double> center_spacing;

  // (U, C) = (complement of U, C; U) for an open set U and a compact C in U.
  static Condenser open_set(Box box, Predicate u, Predicate c, std::string label)
  {
    Condenser out;
    out.box = std::move(box);
    out.domain = u;
    out.plate0 = [u](const Point& x) { return !u(x); };
    out.plate1 = std::move(c);
    out.label = std::move(label);
    return out;
  }

  Grid make_grid(int resolution) const
  {
    if (center_spacing.empty()) return Grid::uniform(box, resolution);
    std::vector<std::vector<double>> axes(box.dim());
    for (int a = 0; a < box.dim(); ++a) axes[a] = graded_axis(box.lo[a], box.hi[a], resolution, center_spacing[a]);
    return Grid::from_axes(std::move(axes));
  }
};

// Gauge ring {r < rho < R} about the identity as the condenser
// (B(0, R), closed B(0, r)), on the smallest box holding B(0, R).
inline Condenser ring_condenser(const Group& g, double r, double R)
{
  require(r > 0.0 && r < R, ErrorCode::invalid_argument, "ring condenser needs 0 < r < R");
  auto [lo, hi] = gauge_ball_bounds(g, R);
  Condenser c = Condenser::open_set(
      Box{lo, hi}, [g, R](const Point& x) { return gauge_norm(g, x) < R; },
      [g, r](const Point& x) { return gauge_norm(g, x) <= r; },
      "ring(r=" + format_double(r) + ",R=" + format_double(R) + ")");
  return c;
}

// delta_t applied to every part of the condenser, including the box and grading.
inline Condenser dilated(const Condenser& c, const Group& g, double t)
{
  require(t > 0.0, ErrorCode::invalid_argument, "dilation factor must be positive");
  Condenser out;
  out.box = Box{dilate(g, t, c.box.lo), dilate(g, t, c.box.hi)};
  auto back = [g, t](const Point& y) { return dilate(g, 1.0 / t, y); };
  out.domain = [d = c.domain, back](const Point& y) { return d(back(y)); };
  out.plate0 = [d = c.plate0, back](const Point& y) { return d(back(y)); };
  out.plate1 = [d = c.plate1, back](const Point& y) { return d(back(y)); };
  out.label = "dilate[" + format_double(t) + "](" + c.label + ")";
  out.center_spacing = c.center_spacing;
  for (std::size_t a = 0; a < out.center_spacing.size(); ++a)
    out.center_spacing[a] *= g.weight(static_cast<int>(a)) == 2 ? t * t : t;
  return out;
}

// f(E) for a condenser of the form (U, C): (f(U), f(C)) with the zero plate
// the complement of f(U). Image sets are preimage tests.
inline Condenser image_condenser(const MappingPtr& f, const Condenser& c)
{
  if (f->is_identity()) return c;
  Condenser out;
  out.box = image_box(*f, c.box);
  auto image_of = [f](Predicate set) {
    return [f, set](const Point& y) {
      for (const Point& z : f->preimages(y))
        if (set(z)) return true;
      return false;
    };
  };
  out.domain = image_of(c.domain);
  out.plate0 = [u = out.domain](const Point& y) { return !u(y); };
  out.plate1 = image_of(c.plate1);
  out.label = f->name() + "(" + c.label + ")";
  out.center_spacing = c.center_spacing;
  for (std::size_t a = 0; a < out.center_spacing.size(); ++a)
    out.center_spacing[a] *= (out.box.hi[a] - out.box.lo[a]) / (c.box.hi[a] - c.box.lo[a]);
  return out;
}

enum class NodeState : std::uint8_t
{
  free = 0,
  zero = 1,
  one = 2,
  outside = 3,
};

struct DiscreteCondenser
{
  Grid grid;
  std::vector<NodeState> state;
  std::vector<double> cell_weight;  // 1 on cells carrying energy, 0 otherwise
  std::size_t free_nodes = 0;
  std::size_t zero_nodes = 0;
  std::size_t one_nodes = 0;
  std::size_t outside_nodes = 0;
};

// Classifies nodes and checks that the discrete problem is well posed: both
// plates nonempty and disjoint, a nonempty free set, and each plate adjacent
// to the free set (the discrete form of F_i lying in the closure of D).
inline DiscreteCondenser discretize(const Condenser& c, const Group& g, const Grid& grid)
{
  require(grid.dim() == g.dim(), ErrorCode::dimension_mismatch, "grid dimension does not match group");
  DiscreteCondenser out{grid, std::vector<NodeState>(grid.node_count(), NodeState::outside), {}, 0, 0, 0, 0};
  for (std::size_t i = 0; i < grid.node_count(); ++i) {
    const Point x = grid.node(i);
    const bool one = c.plate1(x);
    const bool zero = c.plate0(x);
    if (one && zero)
      fail(ErrorCode::discretization, "condenser plates share a grid node (resolution too coarse or plates intersect)");
    if (one) {
      out.state[i] = NodeState::one;
      ++out.one_nodes;
    } else if (zero) {
      out.state[i] = NodeState::zero;
      ++out.zero_nodes;
    } else if (c.domain(x)) {
      out.state[i] = NodeState::free;
      ++out.free_nodes;
    } else {
      ++out.outside_nodes;
    }
  }
  require(out.one_nodes > 0, ErrorCode::discretization, "plate F1 contains no grid node");
  require(out.zero_nodes > 0, ErrorCode::discretization, "plate F0 contains no grid node");
  require(out.free_nodes > 0, ErrorCode::discretization, "condenser has no free grid node");

  const int d = grid.dim();
  bool one_touches = false, zero_touches = false;
  int multi[kMaxDim];
  for (std::size_t i = 0; i < grid.node_count() && !(one_touches && zero_touches); ++i) {
    if (out.state[i] != NodeState::free) continue;
    grid.multi_index(i, multi);
    for (int a = 0; a < d; ++a) {
      for (int side : {-1, 1}) {
        const int k = multi[a] + side;
        if (k < 0 || k > grid.cells(a)) continue;
        const NodeState s = out.state[side < 0 ? i - grid.stride(a) : i + grid.stride(a)];
        one_touches |= s == NodeState::one;
        zero_touches |= s == NodeState::zero;
      }
    }
  }
  require(one_touches, ErrorCode::discretization, "plate F1 does not meet the closure of the domain");
  require(zero_touches, ErrorCode::discretization, "plate F0 does not meet the closure of the domain");

  out.cell_weight.assign(grid.cell_count(), 0.0);
  std::vector<std::size_t> offset(1u << d, 0);
  for (unsigned m = 0; m < offset.size(); ++m)
    for (int a = 0; a < d; ++a)
      if (m & (1u << a)) offset[m] += grid.stride(a);
  std::vector<int> cell(d, 0);
  for (std::size_t ci = 0; ci < grid.cell_count(); ++ci) {
    if (ci > 0) {
      for (int a = d - 1; a >= 0; --a) {
        if (++cell[a] < grid.cells(a)) break;
        cell[a] = 0;
      }
    }
    std::size_t base = 0;
    for (int a = 0; a < d; ++a) base += static_cast<std::size_t>(cell[a]) * grid.stride(a);
    bool any_outside = false, any_free = false, any_zero = false, any_one = false;
    for (std::size_t off : offset) {
      switch (out.state[base + off]) {
        case NodeState::outside: any_outside = true; break;
        case NodeState::free: any_free = true; break;
        case NodeState::zero: any_zero = true; break;
        case NodeState::one: any_one = true; break;
      }
    }
    // Cells pinned to a single constant carry no energy.
    if (!any_outside && (any_free || (any_zero && any_one))) out.cell_weight[ci] = 1.0;
  }
  return out;
}

inline DiscreteCondenser discretize(const Condenser& c, const Group& g, int resolution)
{
  return discretize(c, g, c.make_grid(resolution));
}

struct SolverOptions
{
  // Stop when max over free nodes of |dE/dv_i| / H_ii (a Jacobi-scaled
  // correction, in units of v) drops below tol.
  double tol = 1e-6;
  // Tolerance used on the coarser nested levels.
  double coarse_tol = 1e-5;
  // Also stop when the energy decreased by less than energy_rtol (relative)
  // over the last 10 iterations.
  double energy_rtol = 1e-6;
  int max_iters = 20000;
  // Regularization eps = eps_factor * box diameter / resolution.
  double eps_factor = 1e-8;
  // Coarsen while every axis keeps at least this many cells.
  int coarsest_cells = 8;
  bool nested = true;
};

struct CapacityResult
{
  double value = 0.0;
  GridFunction minimizer;
  double p = 0.0;
  int iterations = 0;         // on the finest level
  int total_iterations = 0;   // summed over nested levels
  double grad_residual = 0.0;
  int resolution = 0;
  int levels = 1;
  double eps = 0.0;
  bool converged = false;
  std::string status;
};

namespace detail
{

struct LevelOutcome
{
  int iterations = 0;
  double residual = 0.0;
  bool converged = false;
};

// Jacobi-preconditioned projected nonlinear CG (Polak-Ribiere+) on the free
// nodes, box constraint 0 <= v <= 1, Newton step along each direction with
// Armijo backtracking.
inline LevelOutcome minimize_level(const KuhnEnergy& energy, const std::vector<NodeState>& state,
                                   std::vector<double>& v, double tol, double energy_rtol, int max_iters)
{
  const std::size_t n = v.size();
  std::vector<std::size_t> free;
  for (std::size_t i = 0; i < n; ++i)
    if (state[i] == NodeState::free) free.push_back(i);

  std::vector<double> grad(n), diag(n), pg(n, 0.0), z(n, 0.0), dir(n, 0.0), pg_old(n, 0.0), z_old(n, 0.0), trial(n),
      grad_trial(n);
  for (std::size_t i : free) v[i] = std::clamp(v[i], 0.0, 1.0);
  double e = energy.value_and_gradient(v, grad);

  LevelOutcome out;
  double diag_floor = 0.0;
  auto refresh_diagonal = [&]() {
    energy.hessian_diagonal(v, diag);
    double mean = 0.0;
    for (std::size_t i : free) mean += diag[i];
    mean /= static_cast<double>(free.size());
    diag_floor = std::max(mean * 1e-3, 1e-300);
  };
  refresh_diagonal();

  std::vector<double> history;
  bool restart = true;
  for (int it = 0; it < max_iters; ++it) {
    // Projected gradient, preconditioned direction and residual.
    double residual = 0.0;
    for (std::size_t i : free) {
      double gi = grad[i];
      if ((v[i] <= 0.0 && gi > 0.0) || (v[i] >= 1.0 && gi < 0.0)) gi = 0.0;
      pg[i] = gi;
      z[i] = gi / std::max(diag[i], diag_floor);
      residual = std::max(residual, std::abs(z[i]));
    }
    out.residual = residual;
    out.iterations = it;
    if (residual < tol) {
      out.converged = true;
      return out;
    }
    history.push_back(e);
    if (history.size() > 10 && history[history.size() - 11] - e <= energy_rtol * std::abs(e)) {
      out.converged = true;
      return out;
    }

    double beta = 0.0;
    if (!restart) {
      double num = 0.0, den = 0.0;
      for (std::size_t i : free) {
        num += z[i] * (pg[i] - pg_old[i]);
        den += z_old[i] * pg_old[i];
      }
      beta = den > 0.0 ? std::max(0.0, num / den) : 0.0;
    }
    double slope = 0.0;
    for (std::size_t i : free) {
      dir[i] = -z[i] + beta * dir[i];
      if ((v[i] <= 0.0 && dir[i] < 0.0) || (v[i] >= 1.0 && dir[i] > 0.0)) dir[i] = 0.0;
      slope += grad[i] * dir[i];
    }
    if (slope >= 0.0) {
      slope = 0.0;
      for (std::size_t i : free) {
        dir[i] = -z[i];
        slope += grad[i] * dir[i];
      }
    }
    if (slope >= 0.0) {
      out.converged = true;
      return out;
    }
    for (std::size_t i : free) {
      pg_old[i] = pg[i];
      z_old[i] = z[i];
    }

    const double curv = energy.curvature(v, dir);
    double alpha = curv > 0.0 ? -slope / curv : 1.0;
    bool accepted = false;
    bool clamped = false;
    double e_trial = e;
    for (int back = 0; back < 40; ++back) {
      trial = v;
      clamped = false;
      double decrease = 0.0;
      for (std::size_t i : free) {
        const double raw = v[i] + alpha * dir[i];
        const double t = std::clamp(raw, 0.0, 1.0);
        clamped |= t != raw;
        trial[i] = t;
        decrease += grad[i] * (t - v[i]);
      }
      e_trial = energy.value_and_gradient(trial, grad_trial);
      if (e_trial <= e + 1e-4 * decrease) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      // No descent along the direction at round-off level.
      out.converged = residual < 100.0 * tol;
      return out;
    }
    v.swap(trial);
    grad.swap(grad_trial);
    e = e_trial;
    restart = clamped;
    if (it % 25 == 24) {
      refresh_diagonal();
      restart = true;
    }
  }
  out.iterations = max_iters;
  return out;
}

inline void apply_pins(const DiscreteCondenser& dc, std::vector<double>& v)
{
  for (std::size_t i = 0; i < v.size(); ++i) {
    switch (dc.state[i]) {
      case NodeState::zero: v[i] = 0.0; break;
      case NodeState::one: v[i] = 1.0; break;
      case NodeState::outside: v[i] = 0.0; break;
      case NodeState::free: v[i] = std::clamp(v[i], 0.0, 1.0); break;
    }
  }
}

}  // namespace detail

inline double regularization_eps(const Grid& grid, double eps_factor)
{
  return eps_factor * grid.box().diameter() / grid.min_cells();
}

// Minimizes the discrete p-energy over admissible nodal fields; the nested
// variant solves on successively refined grids and prolongates.
inline CapacityResult solve_capacity(const Condenser& c, const Group& g, double p, int resolution,
                                     const SolverOptions& options = {})
{
  require(p > 1.0, ErrorCode::invalid_argument, "capacity solver needs p > 1");
  require(resolution >= 2, ErrorCode::invalid_argument, "resolution must be at least 2");

  std::vector<Grid> grids{c.make_grid(resolution)};
  if (options.nested) {
    while (grids.back().can_coarsen() && grids.back().min_cells() / 2 >= options.coarsest_cells)
      grids.push_back(grids.back().coarsened());
  }
  std::vector<DiscreteCondenser> problems;
  for (const Grid& grid : grids) {
    if (problems.empty()) {
      problems.push_back(discretize(c, g, grid));
      continue;
    }
    try {
      problems.push_back(discretize(c, g, grid));
    } catch (const Error&) {
      break;  // plates not resolved any coarser
    }
  }

  CapacityResult result;
  result.p = p;
  result.resolution = resolution;
  result.levels = static_cast<int>(problems.size());
  result.eps = regularization_eps(problems.front().grid, options.eps_factor);

  std::vector<double> v;
  GridFunction previous;
  for (int level = static_cast<int>(problems.size()) - 1; level >= 0; --level) {
    const DiscreteCondenser& dc = problems[level];
    if (previous.size() == 0) {
      v.assign(dc.grid.node_count(), 0.5);
    } else {
      v = previous.resampled(dc.grid).values();
    }
    detail::apply_pins(dc, v);
    const KuhnEnergy energy(g, dc.grid, p, regularization_eps(dc.grid, options.eps_factor), dc.cell_weight);
    const double tol = level == 0 ? options.tol : options.coarse_tol;
    const auto outcome = detail::minimize_level(energy, dc.state, v, tol, options.energy_rtol, options.max_iters);
    result.total_iterations += outcome.iterations;
    if (level == 0) {
      result.iterations = outcome.iterations;
      result.grad_residual = outcome.residual;
      result.converged = outcome.converged;
    }
    previous = GridFunction(dc.grid, v);
  }

  const DiscreteCondenser& fine = problems.front();
  result.minimizer = GridFunction(fine.grid, std::move(v));
  result.value = KuhnEnergy(g, fine.grid, p, 0.0, fine.cell_weight).value(result.minimizer.values());
  result.status = result.converged ? "converged" : "max_iters";
  return result;
}

struct CapacityJob
{
  Condenser condenser;
  Group group = Group::abelian(2);
  double p = 2.0;
  int resolution = 64;
  SolverOptions options;
};

// Independent solves run concurrently; results come back in job order.
inline std::vector<CapacityResult> solve_capacity_batch(const std::vector<CapacityJob>& jobs, unsigned threads = 0)
{
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  std::vector<CapacityResult> results(jobs.size());
  if (threads <= 1 || jobs.size() <= 1) {
    for (std::size_t i = 0; i < jobs.size(); ++i)
      results[i] = solve_capacity(jobs[i].condenser, jobs[i].group, jobs[i].p, jobs[i].resolution, jobs[i].options);
    return results;
  }
  std::size_t next = 0;
  std::mutex lock;
  auto worker = [&]() {
    for (;;) {
      std::size_t i;
      {
        std::lock_guard<std::mutex> guard(lock);
        if (next >= jobs.size()) return;
        i = next++;
      }
      results[i] = solve_capacity(jobs[i].condenser, jobs[i].group, jobs[i].p, jobs[i].resolution, jobs[i].options);
    }
  };
  std::vector<std::future<void>> pool;
  for (unsigned t = 0; t < std::min<std::size_t>(threads, jobs.size()); ++t)
    pool.push_back(std::async(std::launch::async, worker));
  for (auto& f : pool) f.get();
  return results;
}

// Memoizes solves by (group, condenser label, p, resolution). Labels must
// identify the geometry.
class CapacityCache
{
 public:
  explicit CapacityCache(SolverOptions options = {}) : options_(options) {}

  const CapacityResult& solve(const Condenser& c, const Group& g, double p, int resolution)
  {
    const std::string key = g.name() + "|" + c.label + "|" + format_double(p) + "|" + std::to_string(resolution);
    {
      std::lock_guard<std::mutex> guard(lock_);
      auto it = cache_.find(key);
      if (it != cache_.end()) return it->second;
    }
    CapacityResult r = solve_capacity(c, g, p, resolution, options_);
    std::lock_guard<std::mutex> guard(lock_);
    return cache_.emplace(key, std::move(r)).first->second;
  }

  std::size_t size() const { return cache_.size(); }

 private:
  SolverOptions options_;
  std::mutex lock_;
  std::map<std::string, CapacityResult> cache_;
};

// Exact p-capacity of the Euclidean spherical ring r < |x| < R in R^n, from
// the radial extremal.
inline double ring_capacity_oracle(int n, double p, double r, double R)
{
  require(n >= 1 && p > 1.0, ErrorCode::invalid_argument, "ring oracle needs n >= 1 and p > 1");
  require(r > 0.0 && r < R, ErrorCode::invalid_argument, "ring oracle needs 0 < r < R");
  const double omega = unit_sphere_area(n);
  if (std::abs(p - n) < 1e-12) return omega * std::pow(std::log(R / r), 1.0 - n);
  const double a = (p - n) / (p - 1.0);
  return omega * std::pow(std::abs(n - p) / (p - 1.0), p - 1.0) * std::pow(std::abs(std::pow(R, a) - std::pow(r, a)), 1.0 - p);
}

// cp_p(delta_t E) against t^(nu - p) cp_p(E), both solved on grids that are
// dilates of each other.
inline VerificationReport capacity_scaling_check(const Condenser& c, const Group& g, double p, double t, int resolution,
                                                 double tolerance = 0.05, const SolverOptions& options = {})
{
  const CapacityResult base = solve_capacity(c, g, p, resolution, options);
  const CapacityResult scaled = solve_capacity(dilated(c, g, t), g, p, resolution, options);
  VerificationReport r;
  r.property = "capacity_scaling";
  r.kind = VerificationReport::Kind::agreement;
  r.lhs = scaled.value;
  r.rhs = std::pow(t, g.hom_dim() - p) * base.value;
  r.slack = tolerance;
  r.inputs = {g.name(), "dilation(" + format_double(t) + ")", c.label, p, p, resolution};
  r.notes = "ratio=" + format_double(r.lhs / base.value) + " expected=" + format_double(std::pow(t, g.hom_dim() - p));
  if (!base.converged || !scaled.converged) r.reason = "solver_failure";
  r.finish();
  return r;
}

}  // namespace carnot
