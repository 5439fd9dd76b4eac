// Command-line driver.
//
//   tve run --config F [--tau X] [--tend X] [--out DIR] [--vtk-every K] [--threads N]
//   tve check --config F
//   tve converge --config F --levels N [--tau X] [--tend X]
//   tve defaults NAME
//
// Exit codes: 0 ok, 1 config error, 2 step failure, 3 balance violation.
#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "tve/config.hpp"
#include "tve/convergence.hpp"
#include "tve/io.hpp"
#include "tve/scenario.hpp"
#include "tve/stepper.hpp"

namespace fs = std::filesystem;
using namespace tve;

namespace {

enum Exit { kOk = 0, kConfig = 1, kStep = 2, kBalance = 3 };

struct Overrides {
  std::optional<double> tau, tend;
  std::optional<int> vtk_every, threads;
  std::optional<std::string> out;
};

RunConfig load_with_overrides(const std::string& path, const Overrides& o) {
  RunConfig cfg = load_config(path);
  if (o.tau) cfg.step.tau = *o.tau;
  if (o.tend) cfg.t_end = *o.tend;
  if (o.vtk_every) cfg.output.vtk_every = *o.vtk_every;
  if (o.threads) cfg.step.threads = *o.threads;
  if (o.out) cfg.output.dir = *o.out;
  validate_config(cfg);
  return cfg;
}

void print_report(const StepReport& r) {
  std::fprintf(stderr, "  newton iterations %d, substeps %d, deepest halving %d, smallest tau %.3e\n", r.iterations,
               r.substeps, r.halvings, r.smallest_tau);
  std::fprintf(stderr, "  last residual norm %.3e; failure: %s\n", r.residual_norm, r.failure.c_str());
  std::fprintf(stderr, "  residual history:");
  const std::size_t first = r.residual_history.size() > 12 ? r.residual_history.size() - 12 : 0;
  for (std::size_t i = first; i < r.residual_history.size(); ++i) std::fprintf(stderr, " %.2e", r.residual_history[i]);
  std::fprintf(stderr, "\n");
}

int cmd_run(const std::string& config, const Overrides& o) {
  RunConfig cfg;
  Problem problem;
  try {
    cfg = load_with_overrides(config, o);
    problem = build_scenario(cfg);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfig;
  }
  const fs::path dir = cfg.output.dir;
  fs::create_directories(dir);
  {
    std::ofstream echo(dir / "config.ini");
    echo << dump_config(cfg);
  }
  const auto t0 = std::chrono::steady_clock::now();
  Trajectory tr;
  int code = kOk;
  try {
    run_into(tr, problem.grid, problem.physics, problem.step, problem.initial, problem.t_end);
  } catch (const StepFailure& e) {
    std::fprintf(stderr, "step failure: %s\n", e.what());
    print_report(e.report());
    code = kStep;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_csv(tr.ledger, (dir / cfg.output.csv).string());
  if (cfg.output.vtk_every > 0) {
    for (std::size_t k = 0; k < tr.size(); ++k) {
      if (k % static_cast<std::size_t>(cfg.output.vtk_every) != 0 && k + 1 != tr.size()) continue;
      char name[32];
      std::snprintf(name, sizeof name, "state_%05zu.vtk", k);
      write_vtk(problem.grid, tr.states[k], (dir / name).string());
    }
  }
  int its = 0, halvings = 0;
  for (const StepReport& r : tr.reports) {
    its += r.iterations;
    halvings = std::max(halvings, r.halvings);
  }
  std::printf("scenario %s: %zu steps to t=%.6g in %.2f s, %d Newton iterations, deepest tau-halving %d\n",
              problem.name.c_str(), tr.reports.size(), tr.empty() ? 0.0 : tr.states.back().t, secs, its, halvings);
  if (code != kOk) return code;

  const BalanceReport b =
      evaluate_balances(tr.ledger, balance_tolerance(problem.grid, problem.step), problem.energy_balances_apply);
  std::printf("mass drift %.3e, min rho %.6g, min theta %.6g\n", b.worst_mass_drift, b.min_rho, b.min_theta);
  std::printf("slack: mechanical min %.3e, total max %.3e (tolerance %.3e), entropy production min %.3e\n",
              b.min_slack_mech, b.max_slack_total, b.tolerance, b.min_entropy_prod);
  for (const std::string& f : b.findings) std::printf("finding: %s\n", f.c_str());
  std::printf("ledger written to %s\n", (dir / cfg.output.csv).string().c_str());
  return b.ok() ? kOk : kBalance;
}

int cmd_check(const std::string& config) {
  try {
    const RunConfig cfg = load_config(config);
    const Problem p = build_scenario(cfg);
    const ExponentCheck ex = admissible_exponents(cfg.material.alpha, cfg.heat.beta, cfg.step.lambda);
    std::printf("config ok: scenario %s on %dx%dx%d cells, tau %.6g, t_end %.6g\n", p.name.c_str(), p.grid.n(0),
                p.grid.n(1), p.grid.n(2), cfg.step.tau, cfg.t_end);
    if (ex.admissible)
      std::printf("exponents admissible, mu_max = %.6g\n", ex.mu_max);
    else
      std::printf("exponents not admissible (%s); running under override\n", ex.reason.c_str());
    return kOk;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfig;
  }
}

int cmd_converge(const std::string& config, int levels, const Overrides& o) {
  Problem problem;
  try {
    problem = build_scenario(load_with_overrides(config, o));
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfig;
  }
  if (levels < 3) {
    std::fprintf(stderr, "config error: --levels must be at least 3\n");
    return kConfig;
  }
  try {
    const ConvergenceTable t = convergence_study(problem, levels);
    std::printf("%s", format_convergence(t).c_str());
  } catch (const StepFailure& e) {
    std::fprintf(stderr, "step failure: %s\n", e.what());
    print_report(e.report());
    return kStep;
  }
  return kOk;
}

int cmd_defaults(const std::string& name) {
  try {
    std::printf("%s", dump_config(scenario_defaults(name)).c_str());
    return kOk;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfig;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Backward-Euler thermo-visco-elastodynamics on a structured box"};
  app.require_subcommand(1);

  std::string config;
  Overrides o;
  int levels = 3;
  std::string scenario;

  auto add_time = [&](CLI::App* sub) {
    sub->add_option("--tau", o.tau, "Time step");
    sub->add_option("--tend", o.tend, "Final time");
  };
  CLI::App* run = app.add_subcommand("run", "Run a scenario and write the ledger CSV (and VTK snapshots)");
  run->add_option("--config", config, "Config file")->required();
  add_time(run);
  run->add_option("--out", o.out, "Output directory");
  run->add_option("--vtk-every", o.vtk_every, "Write a VTK snapshot every K steps (0: never)");
  run->add_option("--threads", o.threads, "Threads for Jacobian assembly");

  CLI::App* check = app.add_subcommand("check", "Validate a config file");
  check->add_option("--config", config, "Config file")->required();

  CLI::App* conv = app.add_subcommand("converge", "Temporal convergence study under tau-halving");
  conv->add_option("--config", config, "Config file")->required();
  conv->add_option("--levels", levels, "Number of levels (>= 3)")->required();
  add_time(conv);

  CLI::App* defaults = app.add_subcommand("defaults", "Print the full default config of a scenario");
  defaults->add_option("name", scenario, "Scenario name")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }
  try {
    if (*run) return cmd_run(config, o);
    if (*check) return cmd_check(config);
    if (*conv) return cmd_converge(config, levels, o);
    if (*defaults) return cmd_defaults(scenario);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kStep;
  }
  return kOk;
}
