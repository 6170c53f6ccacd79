#pragma once

// Batch front-end: an ExperimentConfig names one task; run() dispatches it,
// writes one CSV table and returns an exit status:
//   0  everything ran and every check passed
//   1  some inequality or agreement check failed (also non-finite or
//      sense-reversing distortion)
//   2  configuration error (bad keys, unknown maps, exponents outside the
//      task's range, grid too coarse to resolve the geometry)
//   3  capacity solver did not converge
//
// CSV layout: a "# carnot-csv v1 task=<task>" comment line, a column header,
// then rows. Columns per task are listed next to each writer below.

#include "carnot/capacity.hpp"
#include "carnot/common.hpp"
#include "carnot/config.hpp"
#include "carnot/distortion.hpp"
#include "carnot/estimates.hpp"
#include "carnot/format.hpp"
#include "carnot/group.hpp"
#include "carnot/report.hpp"
#include "carnot/rng.hpp"
#include "carnot/verify.hpp"
#include "carnot/zoo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <ostream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace carnot
{

inline constexpr const char* kCsvVersion = "carnot-csv v1";

enum class Task
{
  capacity,
  distort,
  cov,
  push,
  verify,
  zoo,
  liouville,
};

inline Task parse_task(const std::string& s)
{
  if (s == "capacity") return Task::capacity;
  if (s == "distort" || s == "distortion") return Task::distort;
  if (s == "cov" || s == "cov_check") return Task::cov;
  if (s == "push" || s == "pushforward") return Task::push;
  if (s == "verify" || s == "verify_suite") return Task::verify;
  if (s == "zoo" || s == "zoo_list") return Task::zoo;
  if (s == "liouville") return Task::liouville;
  fail(ErrorCode::config, "unknown task '" + s + "'");
}

inline std::string task_name(Task t)
{
  switch (t) {
    case Task::capacity: return "capacity";
    case Task::distort: return "distort";
    case Task::cov: return "cov";
    case Task::push: return "push";
    case Task::verify: return "verify";
    case Task::zoo: return "zoo";
    case Task::liouville: return "liouville";
  }
  return "unknown";
}

inline int exit_code_for(ErrorCode code)
{
  switch (code) {
    case ErrorCode::solver_failure: return 3;
    case ErrorCode::non_finite:
    case ErrorCode::sense_reversing: return 1;
    default: return 2;
  }
}

struct ExponentPair
{
  double p = 2.0;
  double q = 2.0;
};

struct ExperimentConfig
{
  Task task = Task::capacity;
  std::string group = "R2";
  std::string map = "identity";
  double inner = 1.0;                // ring inner radius
  double outer = std::numbers::e;    // ring outer radius; radius of the box domain
  double scale = 1.0;                // capacity of delta_scale(E)
  double p = 2.0;
  double q = 2.0;
  int resolution = 64;
  double slack = 0.10;
  std::uint64_t seed = 1;
  std::size_t samples = 200000;
  int distortion_resolution = 0;     // 0: same as resolution
  SolverOptions solver;
  std::vector<std::string> checks{"capacity_distortion", "capacity_pushforward", "capacity_multiplicity", "pushforward_norm", "composition_bound"};
  std::vector<std::string> maps;     // empty: {map}
  std::vector<ExponentPair> exponents;  // empty: {(p, q)}
  double core = 0.75;                // radius of C for liouville
  std::vector<double> radii{1, 2, 4, 8, 16, 32};
  std::string filter;
  unsigned threads = 1;
  std::string out;

  static ExperimentConfig from(const Config& c)
  {
    ExperimentConfig e;
    e.task = parse_task(c.get("task", "capacity"));
    e.group = c.get("group", e.group);
    e.map = c.get("map", e.map);
    e.inner = c.get_double("geometry.inner", e.inner);
    e.outer = c.get_double("geometry.outer", e.outer);
    e.scale = c.get_double("geometry.scale", e.scale);
    e.p = c.get_double("p", e.p);
    e.q = c.get_double("q", e.q);
    e.resolution = static_cast<int>(c.get_int("resolution", e.resolution));
    e.slack = c.get_double("slack", e.slack);
    const long long seed = c.get_int("seed", 1);
    if (seed < 0) fail(ErrorCode::config, "seed must be non-negative");
    e.seed = static_cast<std::uint64_t>(seed);
    const long long samples = c.get_int("samples", static_cast<long long>(e.samples));
    if (samples < 2) fail(ErrorCode::config, "samples must be at least 2");
    e.samples = static_cast<std::size_t>(samples);
    e.distortion_resolution = static_cast<int>(c.get_int("distortion_resolution", 0));
    e.solver.tol = c.get_double("solver.tol", e.solver.tol);
    e.solver.coarse_tol = c.get_double("solver.coarse_tol", e.solver.coarse_tol);
    e.solver.energy_rtol = c.get_double("solver.energy_rtol", e.solver.energy_rtol);
    e.solver.max_iters = static_cast<int>(c.get_int("solver.max_iters", e.solver.max_iters));
    e.solver.nested = c.get_bool("solver.nested", e.solver.nested);
    e.checks = c.get_list("suite.checks", ',', e.checks);
    e.maps = c.get_list("suite.maps", ';');
    for (const auto& item : c.get_list("suite.exponents", ';')) {
      const auto colon = item.find(':');
      if (colon == std::string::npos) fail(ErrorCode::config, "exponent pair '" + item + "' is not p:q");
      try {
        e.exponents.push_back({parse_double(item.substr(0, colon)), parse_double(item.substr(colon + 1))});
      } catch (const Error&) {
        fail(ErrorCode::config, "exponent pair '" + item + "' is not numeric");
      }
    }
    e.core = c.get_double("liouville.c", e.core);
    e.radii = c.get_doubles("liouville.radii", e.radii);
    e.filter = c.get("zoo.filter", "");
    const long long threads = c.get_int("threads", 1);
    if (threads < 0) fail(ErrorCode::config, "threads must be non-negative");
    e.threads = static_cast<unsigned>(threads);
    e.out = c.get("out", "");
    e.validate();
    return e;
  }

  Config to_config() const
  {
    Config c;
    c.set("task", task_name(task));
    c.set("group", group);
    c.set("map", map);
    c.set("geometry.inner", format_double(inner));
    c.set("geometry.outer", format_double(outer));
    c.set("geometry.scale", format_double(scale));
    c.set("p", format_double(p));
    c.set("q", format_double(q));
    c.set("resolution", std::to_string(resolution));
    c.set("slack", format_double(slack));
    c.set("seed", std::to_string(seed));
    c.set("samples", std::to_string(samples));
    c.set("distortion_resolution", std::to_string(distortion_resolution));
    c.set("solver.tol", format_double(solver.tol));
    c.set("solver.coarse_tol", format_double(solver.coarse_tol));
    c.set("solver.energy_rtol", format_double(solver.energy_rtol));
    c.set("solver.max_iters", std::to_string(solver.max_iters));
    c.set("solver.nested", solver.nested ? "true" : "false");
    std::string list;
    for (const auto& s : checks) list += (list.empty() ? "" : ",") + s;
    c.set("suite.checks", list);
    list.clear();
    for (const auto& s : maps) list += (list.empty() ? "" : "; ") + s;
    if (!list.empty()) c.set("suite.maps", list);
    list.clear();
    for (const auto& x : exponents) list += (list.empty() ? "" : "; ") + format_double(x.p) + ":" + format_double(x.q);
    if (!list.empty()) c.set("suite.exponents", list);
    list.clear();
    for (double r : radii) list += (list.empty() ? "" : ",") + format_double(r);
    c.set("liouville.radii", list);
    c.set("liouville.c", format_double(core));
    if (!filter.empty()) c.set("zoo.filter", filter);
    c.set("threads", std::to_string(threads));
    if (!out.empty()) c.set("out", out);
    return c;
  }

  Group make_group() const { return Group::parse(group); }

  std::vector<std::string> map_list() const { return maps.empty() ? std::vector<std::string>{map} : maps; }

  std::vector<ExponentPair> exponent_list() const
  {
    return exponents.empty() ? std::vector<ExponentPair>{{p, q}} : exponents;
  }

  int quadrature_resolution() const { return distortion_resolution > 0 ? distortion_resolution : resolution; }

  void validate() const
  {
    const Group g = make_group();
    const double nu = g.hom_dim();
    require(resolution >= 2, ErrorCode::config, "resolution must be at least 2");
    require(slack >= 0.0 && std::isfinite(slack), ErrorCode::config, "slack must be non-negative");
    require(0.0 < inner && inner < outer, ErrorCode::config, "geometry needs 0 < inner < outer");
    require(scale > 0.0, ErrorCode::config, "geometry.scale must be positive");
    require(solver.max_iters >= 1 && solver.tol > 0.0, ErrorCode::config, "bad solver settings");
    if (task == Task::zoo) return;

    auto check_range = [&](const std::string& what, double pp, double qq, bool strict_q) {
      const std::string tag = " (p=" + format_double(pp) + ", q=" + format_double(qq) + ")";
      require(pp > 1.0 && qq >= 1.0 && qq <= pp, ErrorCode::config, what + " needs 1 <= q <= p and p > 1" + tag);
      if (strict_q)
        require(qq > nu - 1.0, ErrorCode::config,
                what + " needs q > nu - 1 = " + format_double(nu - 1.0) + tag);
    };

    std::vector<std::string> needs_strict;
    switch (task) {
      case Task::capacity: require(p > 1.0, ErrorCode::config, "capacity needs p > 1"); return;
      case Task::cov: break;
      case Task::distort: check_range("distortion", p, q, false); break;
      case Task::push: check_range("push-forward norm bound", p, q, true); break;
      case Task::liouville:
        check_range("liouville", p, q, true);
        require(radii.size() >= 2, ErrorCode::config, "liouville needs at least two radii");
        require(core > 0.0, ErrorCode::config, "liouville.c must be positive");
        for (double r : radii) require(r > core, ErrorCode::config, "liouville radii must exceed liouville.c");
        break;
      case Task::verify:
        for (const auto& check : checks) {
          require(check == "capacity_distortion" || check == "capacity_pushforward" || check == "capacity_multiplicity" || check == "pushforward_norm" ||
                      check == "composition_bound" || check == "scaling",
                  ErrorCode::config, "unknown check '" + check + "'");
          const bool strict = check == "capacity_pushforward" || check == "capacity_multiplicity" || check == "pushforward_norm";
          for (const auto& x : exponent_list()) check_range(check, x.p, x.q, strict);
        }
        break;
      case Task::zoo: break;
    }
    for (const auto& name : map_list()) {
      ZooEntry entry;
      try {
        entry = make_zoo_entry(g, name);
      } catch (const Error& err) {
        fail(ErrorCode::config, "map '" + name + "': " + err.what());
      }
      if (task == Task::cov) continue;
      for (const auto& x : task == Task::verify ? exponent_list() : std::vector<ExponentPair>{{p, q}})
        require(entry.admits(x.p, x.q), ErrorCode::config,
                "map '" + name + "' has no bounded distortion at p=" + format_double(x.p) + ", q=" + format_double(x.q) +
                    " (admissible: " + entry.admissible + ")");
    }
  }
};

// Smooth bump exp(1 - 1/(1 - s^2)) on s < 1, zero elsewhere; value 1 at s = 0.
inline double bump(double s)
{
  if (s >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - s * s));
}

struct TestFunction
{
  std::string label;
  std::function<double(const Point&)> fn;
};

// Three smooth functions supported inside B(0, 0.8 radius): a radial bump, an
// off-center bump and a coordinate product bump.
inline std::vector<TestFunction> test_functions(const Group& g, double radius)
{
  std::vector<TestFunction> out;
  out.push_back({"radial", [g, radius](const Point& x) { return bump(gauge_norm(g, x) / (0.8 * radius)); }});
  Point c = g.identity();
  c[0] = 0.4 * radius;
  const Point c_inv = inverse(g, c);
  out.push_back({"shifted", [g, c_inv, radius](const Point& x) {
                   return bump(gauge_norm(g, compose(g, c_inv, x)) / (0.35 * radius));
                 }});
  out.push_back({"product", [g, radius](const Point& x) {
                   double v = 1.0;
                   for (int a = 0; a < g.dim(); ++a) {
                     const double w = g.weight(a) == 1 ? 0.5 * radius : 0.25 * radius * radius;
                     v *= bump(std::abs(x[a]) / w);
                   }
                   return v;
                 }});
  return out;
}

struct RunResult
{
  int exit_code = 0;
  std::string reason;  // machine-readable, empty on success
  std::string message;
};

namespace detail
{

inline void csv_preamble(std::ostream& os, Task task, const char* columns)
{
  os << "# " << kCsvVersion << " task=" << task_name(task) << '\n' << columns << '\n';
}

inline int report_exit_code(const std::vector<VerificationReport>& reports)
{
  bool failed = false;
  for (const auto& r : reports) {
    if (r.reason == "solver_failure") return 3;
    failed = failed || !r.pass;
  }
  return failed ? 1 : 0;
}

// group,geometry,p,resolution,value,oracle,iterations,total_iterations,residual,eps,levels,converged
inline int run_capacity(const ExperimentConfig& e, std::ostream& os)
{
  const Group g = e.make_group();
  Condenser c = ring_condenser(g, e.inner, e.outer);
  if (e.scale != 1.0) c = dilated(c, g, e.scale);
  const CapacityResult r = solve_capacity(c, g, e.p, e.resolution, e.solver);
  double oracle = NAN;
  if (g.is_abelian()) oracle = ring_capacity_oracle(g.dim(), e.p, e.scale * e.inner, e.scale * e.outer);
  csv_preamble(os, e.task, "group,geometry,p,resolution,value,oracle,iterations,total_iterations,residual,eps,levels,converged");
  os << g.name() << ',' << csv_escape(c.label) << ',' << format_double(e.p) << ',' << e.resolution << ','
     << format_double(r.value) << ',' << format_double(oracle) << ',' << r.iterations << ',' << r.total_iterations << ','
     << format_double(r.grad_residual) << ',' << format_double(r.eps) << ',' << r.levels << ','
     << (r.converged ? 1 : 0) << '\n';
  return r.converged ? 0 : 3;
}

// group,map,region,p,q,kappa,resolution,coefficient,measure,field_max,kp_formula
inline int run_distort(const ExperimentConfig& e, std::ostream& os)
{
  const Group g = e.make_group();
  const ZooEntry entry = make_zoo_entry(g, e.map);
  const Region a = condenser_hull(ring_condenser(g, e.inner, e.outer));
  const DistortionReport d = distortion_coefficient(*entry.map, a, e.p, e.q, e.resolution);
  csv_preamble(os, e.task, "group,map,region,p,q,kappa,resolution,coefficient,measure,field_max,kp_formula");
  os << g.name() << ',' << csv_escape(entry.name) << ",ball(R=" << format_double(e.outer) << ")," << format_double(e.p)
     << ',' << format_double(e.q) << ',' << (d.kappa ? d.kappa->str() : std::string("inf")) << ',' << e.resolution << ','
     << format_double(d.coefficient) << ',' << format_double(d.measure) << ',' << format_double(d.field_max) << ','
     << csv_escape(entry.kp_formula) << '\n';
  return 0;
}

inline Region ball_domain(const Group& g, double radius) { return gauge_ball_region(g, g.identity(), radius); }

inline int run_cov(const ExperimentConfig& e, std::ostream& os)
{
  const Group g = e.make_group();
  Rng rng(e.seed);
  std::vector<VerificationReport> reports;
  const Region a = ball_domain(g, e.outer);
  for (const auto& name : e.map_list()) {
    const ZooEntry entry = make_zoo_entry(g, name);
    for (const auto& u : test_functions(g, e.outer)) {
      Rng job = rng.fork(entry.name + "/" + u.label);
      VerificationReport r = change_of_variables_check(entry.map, a, u.fn, e.samples, job);
      r.id = "cov/" + entry.name + "/" + u.label;
      r.inputs.resolution = 0;
      reports.push_back(std::move(r));
    }
  }
  csv_preamble(os, e.task, report_csv_header());
  for (const auto& r : reports) write_report_row(os, r);
  return report_exit_code(reports);
}

inline int run_push(const ExperimentConfig& e, std::ostream& os)
{
  const Group g = e.make_group();
  VerifyContext ctx{e.slack, e.solver, nullptr};
  std::vector<VerificationReport> reports;
  const Region d = ball_domain(g, e.outer);
  for (const auto& name : e.map_list()) {
    const ZooEntry entry = make_zoo_entry(g, name);
    for (const auto& u : test_functions(g, e.outer)) {
      VerificationReport r = verify_pushforward_norm(entry.map, u.fn, d, e.p, e.q, e.resolution, ctx);
      r.id += "/" + u.label;
      reports.push_back(std::move(r));
    }
  }
  std::sort(reports.begin(), reports.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  csv_preamble(os, e.task, report_csv_header());
  for (const auto& r : reports) write_report_row(os, r);
  return report_exit_code(reports);
}

}  // namespace detail

// Every (check, map, exponents) job of a verify suite. Reports come back
// sorted by id; the order of execution does not affect the output.
inline std::vector<VerificationReport> run_verify_suite(const ExperimentConfig& e, CapacityCache* shared_cache = nullptr)
{
  const Group g = e.make_group();
  CapacityCache local_cache(e.solver);
  VerifyContext ctx{e.slack, e.solver, shared_cache ? shared_cache : &local_cache};
  const Condenser ring = ring_condenser(g, e.inner, e.outer);
  const Region d = detail::ball_domain(g, e.outer);
  const auto functions = test_functions(g, e.outer);

  std::vector<std::function<std::vector<VerificationReport>()>> jobs;
  for (const auto& name : e.map_list()) {
    const ZooEntry entry = make_zoo_entry(g, name);
    for (const auto& x : e.exponent_list()) {
      for (const auto& check : e.checks) {
        const int res = e.resolution;
        if (check == "capacity_distortion") {
          jobs.push_back([=, &ctx] { return std::vector{verify_capacity_distortion(entry.map, ring, x.p, x.q, res, ctx)}; });
        } else if (check == "capacity_pushforward") {
          jobs.push_back([=, &ctx] { return std::vector{verify_capacity_pushforward(entry.map, ring, x.p, x.q, res, ctx)}; });
        } else if (check == "capacity_multiplicity") {
          jobs.push_back([=, &ctx] { return std::vector{verify_capacity_multiplicity(entry.map, ring, x.p, x.q, res, ctx)}; });
        } else if (check == "pushforward_norm") {
          jobs.push_back([=, &ctx, &functions, &d] {
            std::vector<VerificationReport> out;
            for (const auto& u : functions) {
              out.push_back(verify_pushforward_norm(entry.map, u.fn, d, x.p, x.q, res, ctx));
              out.back().id += "/" + u.label;
            }
            return out;
          });
        } else if (check == "composition_bound") {
          jobs.push_back([=, &ctx, &functions, &d] {
            std::vector<VerificationReport> out;
            for (const auto& u : functions) out.push_back(verify_composition_bound(entry.map, u.fn, d, x.p, x.q, res, ctx, u.label));
            return out;
          });
        } else if (check == "scaling" && name == e.map_list().front()) {
          jobs.push_back([=, &ring] {
            VerificationReport r = capacity_scaling_check(ring, g, x.p, 2.0, res, 0.05, e.solver);
            r.id += "/" + detail::pq_tag(x.p, x.q);
            return std::vector{r};
          });
        }
      }
    }
  }

  std::vector<std::vector<VerificationReport>> results(jobs.size());
  const unsigned threads = e.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : e.threads;
  if (threads <= 1 || jobs.size() <= 1) {
    for (std::size_t i = 0; i < jobs.size(); ++i) results[i] = jobs[i]();
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(jobs.size());
    auto worker = [&]() {
      for (std::size_t i = next++; i < jobs.size(); i = next++) {
        try {
          results[i] = jobs[i]();
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    };
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < std::min<std::size_t>(threads, jobs.size()); ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    for (const auto& err : errors)
      if (err) std::rethrow_exception(err);
  }

  std::vector<VerificationReport> reports;
  for (auto& batch : results)
    for (auto& r : batch) reports.push_back(std::move(r));
  std::stable_sort(reports.begin(), reports.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  return reports;
}

namespace detail
{

inline int run_verify(const ExperimentConfig& e, std::ostream& os)
{
  const auto reports = run_verify_suite(e);
  csv_preamble(os, e.task, report_csv_header());
  for (const auto& r : reports) write_report_row(os, r);
  return report_exit_code(reports);
}

// name,family,admissible,kp_formula,notes
inline int run_zoo(const ExperimentConfig& e, std::ostream& os)
{
  const Group g = e.make_group();
  csv_preamble(os, e.task, "group,name,family,admissible,kp_formula,notes");
  for (const auto& entry : zoo_list(g)) {
    if (!e.filter.empty() && entry.name.find(e.filter) == std::string::npos &&
        entry.family.find(e.filter) == std::string::npos)
      continue;
    os << g.name() << ',' << csv_escape(entry.name) << ',' << csv_escape(entry.family) << ','
       << csv_escape(entry.admissible) << ',' << csv_escape(entry.kp_formula) << ',' << csv_escape(entry.notes) << '\n';
  }
  return 0;
}

// group,map,p,q,s,c,radius,capacity,in_hypothesis,nonincreasing,decay_factor,converged,note
inline int run_liouville(const ExperimentConfig& e, std::ostream& os)
{
  const Group g = e.make_group();
  const ZooEntry entry = make_zoo_entry(g, e.map);
  CapacityCache cache(e.solver);
  VerifyContext ctx{e.slack, e.solver, &cache};
  const LiouvilleResult r = liouville_decay_experiment(entry.map, e.core, e.radii, e.p, e.q, e.resolution, ctx);
  csv_preamble(os, e.task, "group,map,p,q,s,c,radius,capacity,in_hypothesis,nonincreasing,decay_factor,converged,note");
  for (std::size_t i = 0; i < r.capacities.size(); ++i) {
    os << g.name() << ',' << csv_escape(entry.name) << ',' << format_double(e.p) << ',' << format_double(e.q) << ','
       << format_double(r.s) << ',' << format_double(e.core) << ',' << format_double(r.radii[i]) << ','
       << format_double(r.capacities[i]) << ',' << (r.in_hypothesis ? 1 : 0) << ',' << (r.nonincreasing ? 1 : 0) << ','
       << format_double(r.decay_factor) << ',' << (r.converged ? 1 : 0) << ',' << csv_escape(r.note) << '\n';
  }
  if (!r.converged) return 3;
  return r.in_hypothesis && !r.nonincreasing ? 1 : 0;
}

}  // namespace detail

// Runs one task. Errors are caught and turned into exit codes; the reason is
// written to `log` as "error reason=<code>: <message>".
inline RunResult run(const ExperimentConfig& e, std::ostream& os, std::ostream& log)
{
  RunResult result;
  try {
    switch (e.task) {
      case Task::capacity: result.exit_code = detail::run_capacity(e, os); break;
      case Task::distort: result.exit_code = detail::run_distort(e, os); break;
      case Task::cov: result.exit_code = detail::run_cov(e, os); break;
      case Task::push: result.exit_code = detail::run_push(e, os); break;
      case Task::verify: result.exit_code = detail::run_verify(e, os); break;
      case Task::zoo: result.exit_code = detail::run_zoo(e, os); break;
      case Task::liouville: result.exit_code = detail::run_liouville(e, os); break;
    }
    if (result.exit_code == 1) result.reason = "check_failed";
    if (result.exit_code == 3) result.reason = "solver_failure";
  } catch (const Error& err) {
    result.exit_code = exit_code_for(err.code());
    result.reason = std::string(to_string(err.code()));
    result.message = err.what();
  } catch (const std::exception& err) {
    result.exit_code = 2;
    result.reason = "internal";
    result.message = err.what();
  }
  if (!result.message.empty()) log << "error reason=" << result.reason << ": " << result.message << '\n';
  return result;
}

}  // namespace carnot
