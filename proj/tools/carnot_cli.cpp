// carnot: command-line front-end for the capacity/distortion toolkit.
//
//   carnot <capacity|distort|cov|push|verify|zoo|liouville> [--config PATH]
//          [--out PATH] [--seed N] [--resolution N] [--slack X] [--set key=value]...
//
// Settings are layered: built-in defaults, then the config file, then
// CARNOT_* environment variables, then command-line flags.

#include "carnot/config.hpp"
#include "carnot/runner.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

extern char** environ;

int main(int argc, char** argv)
{
  CLI::App app{"carnot: capacities and (p,q)-distortion on R^n and H^n"};
  app.require_subcommand(1);

  std::string config_path, out_path, seed, resolution, slack;
  std::vector<std::string> overrides;
  app.add_option("--config", config_path, "config file (key = value, [section] prefixes)");
  app.add_option("--out", out_path, "CSV output path (default: stdout)");
  app.add_option("--seed", seed, "seed for Monte Carlo sampling");
  app.add_option("--resolution", resolution, "cells per axis");
  app.add_option("--slack", slack, "multiplicative slack on inequality right-hand sides");
  app.add_option("--set", overrides, "extra key=value settings");

  const std::vector<std::pair<std::string, std::string>> commands{
      {"capacity", "p-capacity of a ring condenser"},
      {"distort", "(p,q)-distortion coefficient of a zoo map"},
      {"cov", "Monte Carlo change-of-variables check"},
      {"push", "push-forward norm bound"},
      {"verify", "capacity and norm inequality suite"},
      {"zoo", "list the mapping zoo"},
      {"liouville", "capacity decay over an exhaustion"},
  };
  for (const auto& [name, help] : commands) app.add_subcommand(name, help)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    carnot::Config cfg = config_path.empty() ? carnot::Config{} : carnot::Config::load(config_path);
    cfg.apply_environment(environ);
    cfg.set("task", app.get_subcommands().front()->get_name());
    if (!out_path.empty()) cfg.set("out", out_path);
    if (!seed.empty()) cfg.set("seed", seed);
    if (!resolution.empty()) cfg.set("resolution", resolution);
    if (!slack.empty()) cfg.set("slack", slack);
    for (const auto& kv : overrides) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos || eq == 0) carnot::fail(carnot::ErrorCode::config, "--set expects key=value, got '" + kv + "'");
      cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    const carnot::ExperimentConfig experiment = carnot::ExperimentConfig::from(cfg);

    std::ostringstream csv;
    const carnot::RunResult result = carnot::run(experiment, csv, std::cerr);
    if (experiment.out.empty()) {
      std::cout << csv.str();
    } else {
      std::ofstream f(experiment.out, std::ios::binary);
      if (!f) {
        std::cerr << "error reason=config: cannot write '" << experiment.out << "'\n";
        return 2;
      }
      f << csv.str();
    }
    return result.exit_code;
  } catch (const carnot::Error& e) {
    std::cerr << "error reason=" << carnot::to_string(e.code()) << ": " << e.what() << '\n';
    return carnot::exit_code_for(e.code());
  }
}
