#include "carnot/config.hpp"
#include "carnot/runner.hpp"

#include <gtest/gtest.h>

using namespace carnot;

namespace
{

const char* kSample = R"(# capacity of the planar ring
task = capacity
group = R2
p = 2

[geometry]
inner = 1
outer = 2.718281828459045

[suite]
maps = identity; diag(2,1); winding(k=2)
exponents = 2:2; 3:2
)";

}  // namespace

TEST(Config, ParsesSectionsIntoDottedKeys)
{
  const Config c = Config::parse(kSample);
  EXPECT_EQ(c.get("task", ""), "capacity");
  EXPECT_EQ(c.get_double("geometry.outer", 0.0), 2.718281828459045);
  EXPECT_EQ(c.get_list("suite.maps", ';').size(), 3u);
  EXPECT_EQ(c.get_list("suite.maps", ';')[1], "diag(2,1)");
  EXPECT_FALSE(c.has("inner"));
}

TEST(Config, SerializeIsIdempotent)
{
  const Config c = Config::parse(kSample);
  const std::string once = c.serialize();
  const Config back = Config::parse(once);
  EXPECT_EQ(back, c);
  EXPECT_EQ(back.serialize(), once);
}

TEST(Config, ExperimentRoundTrip)
{
  const ExperimentConfig e = ExperimentConfig::from(Config::parse(kSample));
  const Config c = e.to_config();
  const ExperimentConfig again = ExperimentConfig::from(Config::parse(c.serialize()));
  EXPECT_EQ(again.to_config(), c);
  EXPECT_EQ(again.map_list().size(), 3u);
  EXPECT_EQ(again.exponent_list()[1].p, 3.0);
}

TEST(Config, TypedAccessorsReportConfigErrors)
{
  const Config c = Config::parse("a = x\nb = 1.5\nc = maybe\n");
  auto code_of = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::invalid_argument;
  };
  EXPECT_EQ(code_of([&] { c.get_double("a", 0.0); }), ErrorCode::config);
  EXPECT_EQ(code_of([&] { c.get_int("b", 0); }), ErrorCode::config);
  EXPECT_EQ(code_of([&] { c.get_bool("c", false); }), ErrorCode::config);
  EXPECT_EQ(code_of([&] { c.require_string("missing"); }), ErrorCode::config);
  EXPECT_EQ(c.get_double("missing", 4.0), 4.0);
}

TEST(Config, SyntaxErrors)
{
  EXPECT_THROW(Config::parse("just words\n"), Error);
  EXPECT_THROW(Config::parse("[open\n"), Error);
  EXPECT_THROW(Config::parse("Bad Key = 1\n"), Error);
  EXPECT_THROW(Config::parse("= 1\n"), Error);
  EXPECT_NO_THROW(Config::parse("; comment\n\n  key=value  \n"));
}

TEST(Config, EnvironmentOverrides)
{
  EXPECT_EQ(Config::env_name("geometry.outer"), "CARNOT_GEOMETRY__OUTER");
  EXPECT_EQ(Config::key_from_env("CARNOT_SOLVER__MAX_ITERS"), "solver.max_iters");
  Config c = Config::parse("p = 2\n");
  std::string a = "CARNOT_P=3", b = "CARNOT_GEOMETRY__OUTER=5", other = "HOME=/root";
  char* env[] = {a.data(), b.data(), other.data(), nullptr};
  c.apply_environment(env);
  EXPECT_EQ(c.get("p", ""), "3");
  EXPECT_EQ(c.get("geometry.outer", ""), "5");
  EXPECT_FALSE(c.has("home"));
}

TEST(ExperimentConfigValidation, RejectsBadSettings)
{
  auto code_for = [](const std::string& text) {
    try {
      ExperimentConfig::from(Config::parse(text));
    } catch (const Error& e) {
      return exit_code_for(e.code());
    }
    return 0;
  };
  EXPECT_EQ(code_for("task = capacity\n"), 0);
  EXPECT_EQ(code_for("task = frobnicate\n"), 2);
  EXPECT_EQ(code_for("task = push\np = 2\nq = 1\n"), 2);
  EXPECT_EQ(code_for("task = push\ngroup = H1\np = 4\nq = 3\n"), 2);
  EXPECT_EQ(code_for("task = verify\ngroup = H1\n[suite]\nchecks = capacity_distortion, capacity_pushforward\nmaps = identity\nexponents = 4:2.5\n"), 2);
  EXPECT_EQ(code_for("task = verify\ngroup = H1\n[suite]\nchecks = capacity_distortion\nmaps = identity\nexponents = 4:2.5\n"), 0);
  EXPECT_EQ(code_for("task = verify\n[suite]\nchecks = bogus\n"), 2);
  EXPECT_EQ(code_for("task = verify\nmap = winding(k=2)\ngroup = H1\np = 4\nq = 4\n"), 2);
  EXPECT_EQ(code_for("task = distort\nmap = radial_power(alpha=0.5)\np = 4\nq = 4\n"), 2);
  EXPECT_EQ(code_for("task = capacity\nresolution = 1\n"), 2);
  EXPECT_EQ(code_for("task = capacity\n[geometry]\ninner = 3\nouter = 2\n"), 2);
  EXPECT_EQ(code_for("task = liouville\n[liouville]\nc = 2\nradii = 1,4\n"), 2);
}
