// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "tve/convergence.hpp"
#include "tve/io.hpp"
#include "tve/scenario.hpp"

using namespace tve;
using namespace tve::testing;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double rel(double a, double b) { return std::fabs(a - b) / std::max(std::fabs(b), 1e-300); }

// ---------------------------------------------------------------------------

Outcome tensor_identities() {
  Rng rng(1);
  double worst_comm = 0.0, worst_split = 0.0, worst_box = 0.0;
  for (int k = 0; k < 10000; ++k) {
    const Eigen::Matrix3d q = random_rotation(rng);
    const Sym3d s = rotated_diag(q, Eigen::Vector3d::Random());
    const Sym3d e = rotated_diag(q, Eigen::Vector3d::Random());
    const Mat3d l = random_mat(rng);
    const double scale = norm(s) * norm(e) * std::sqrt(ddot(l, l));
    worst_comm = std::max(worst_comm, std::fabs(commutator_contraction(s, e, l)) / scale);

    const Sym3d a = random_sym(rng);
    const auto split = trace_sph_dev(a);
    const Sym3d d = split.dev.full();
    worst_split = std::max({worst_split, max_abs(split.sph + d - a), std::fabs(trace(d)),
                            max_abs(dev(d).full() - d), std::fabs(split.trace - trace(a))});

    const Third3d g = random_third(rng);
    const double tc = triple_contraction(g, g);
    worst_box = std::max(worst_box, std::fabs(trace(boxtimes(g)) - tc) / tc);
  }
  const double worst = std::max({worst_comm, worst_split, worst_box});
  return {worst <= 1e-12, fmt("max violation %.2e (commutator %.2e, dev/sph %.2e, boxtimes trace %.2e)", worst,
                              worst_comm, worst_split, worst_box)};
}

Outcome gibbs_suite() {
  Rng rng(2);
  double fd = 0.0, alg = 0.0;
  for (int k = 0; k < 100; ++k) {
    ThermoCreepMaterial tm;
    tm.bulk_modulus = uniform(rng, 0.5, 3.0);
    tm.shear_modulus = uniform(rng, 0.5, 3.0);
    tm.expansion = uniform(rng, 0.0, 0.5);
    tm.heat_capacity = uniform(rng, 0.5, 2.0);
    tm.alpha = uniform(rng, 0.2, 1.5);
    tm.maxwell_modulus = uniform(rng, 0.5, 3.0);
    tm.maxwell_activation = uniform(rng, 0.0, 1.0);
    const MaterialModel m = tm.material();
    DissipationModel d;
    d.maxwell = tm.maxwell_law();
    const Sym3d e = random_sym(rng, 0.2);
    const double th = uniform(rng, 0.2, 3.0), h = 1e-5;

    const double eta_fd = -(free_energy(m, e, th + h) - free_energy(m, e, th - h)) / (2 * h);
    fd = std::max(fd, rel(entropy(m, e, th), eta_fd));
    const double c_fd = (thermal_energy(m, th + h) - thermal_energy(m, th - h)) / (2 * h);
    fd = std::max(fd, rel(heat_capacity(m, th), c_fd));

    alg = std::max(alg, rel(internal_energy(m, e, th), free_energy(m, e, th) + th * entropy(m, e, th)));
    const Sym3d dev_t = dev(cauchy_stress(m, e, th)).full();
    const Sym3d dev_0 = dev(cauchy_stress(m, e, 0.0)).full();
    alg = std::max(alg, max_abs(dev_t - dev_0) / max_abs(dev_0));
    const Sym3d flow = maxwell_stress(d, th, creep_rate(m, d, e, th));
    alg = std::max(alg, max_abs(flow - dev_t) / max_abs(dev_t));
  }
  return {fd <= 1e-6 && alg <= 1e-10, fmt("max rel. error FD %.2e, algebraic %.2e over 100 samples", fd, alg)};
}

Outcome exponent_region() {
  int mismatches = 0;
  double first_bad = -1.0;
  for (int k = 0; k <= 1000; ++k) {
    const double a = k * 1e-3;
    const bool expect = a < 0.5;
    if (admissible_exponents(a, 0.0, 1e-9).admissible != expect) {
      if (mismatches++ == 0) first_bad = a;
    }
  }
  const ExponentCheck c = admissible_exponents(1.0, 1.5, 1.0);
  const bool ok = mismatches == 0 && c.admissible && std::fabs(c.mu_max - 1.7) < 1e-12;
  return {ok, fmt("%d mismatches on the alpha scan%s; mu_max(1, 1.5, 1) = %.12g", mismatches,
                  mismatches ? fmt(" (first at %.3f)", first_bad).c_str() : "", c.mu_max)};
}

// ---------------------------------------------------------------------------
// Scenario runs shared by the mass, positivity and ledger criteria.

struct ScenarioRun {
  Problem problem;
  Trajectory tr;
  double seconds = 0.0;
  std::string failure;
};

std::map<std::string, ScenarioRun>& scenario_runs() {
  static std::map<std::string, ScenarioRun> runs = [] {
    std::map<std::string, ScenarioRun> out;
    for (const std::string& name : scenario_names()) {
      ScenarioRun r;
      r.problem = build_scenario(scenario_defaults(name));
      const auto t0 = std::chrono::steady_clock::now();
      try {
        run_into(r.tr, r.problem.grid, r.problem.physics, r.problem.step, r.problem.initial, r.problem.t_end);
      } catch (const StepFailure& e) {
        r.failure = e.what();
      }
      r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      out.emplace(name, std::move(r));
    }
    return out;
  }();
  return runs;
}

Outcome mass_conservation() {
  double worst_step = 0.0, worst_run = 0.0, slowest = 0.0;
  std::string issues;
  for (const auto& [name, r] : scenario_runs()) {
    if (!r.failure.empty()) issues += " " + name + " failed;";
    slowest = std::max(slowest, r.seconds);
    const auto& rows = r.tr.ledger;
    for (std::size_t k = 1; k < rows.size(); ++k) {
      worst_step = std::max(worst_step, rel(rows[k].mass, rows[k - 1].mass));
      worst_run = std::max(worst_run, rel(rows[k].mass, rows[0].mass));
    }
  }
  const bool ok = issues.empty() && worst_step <= 1e-12 && worst_run <= 1e-12 && slowest < 60.0;
  return {ok, fmt("%zu scenarios: per-step drift %.2e, full-run drift %.2e, slowest run %.1f s%s",
                  scenario_runs().size(), worst_step, worst_run, slowest, issues.c_str())};
}

Outcome positivity() {
  double min_rho = INFINITY, min_theta = INFINITY;
  for (const auto& [name, r] : scenario_runs())
    for (const State& s : r.tr.states) {
      const MassPositivity mp = mass_and_positivity(r.problem.grid, s);
      min_rho = std::min(min_rho, mp.min_rho);
      min_theta = std::min(min_theta, mp.min_theta);
    }
  const ScenarioRun& stress = scenario_runs().at("compression_stress");
  int halvings = 0;
  for (const StepReport& rep : stress.tr.reports) halvings = std::max(halvings, rep.halvings);
  const bool completed = stress.failure.empty() && !stress.tr.empty() &&
                         std::fabs(stress.tr.states.back().t - stress.problem.t_end) < 1e-12;
  const bool ok = min_rho > 0.0 && min_theta > 0.0 && halvings > 0 && completed;
  return {ok, fmt("min rho %.4g, min theta %.4g; compression_stress used %d tau-halvings and %s", min_rho,
                  min_theta, halvings, completed ? "reached t_end" : "did not reach t_end")};
}

bool insulated_without_gravity(const Problem& p) {
  const HeatModel& h = p.physics.heat;
  bool none = h.a1 == 0.0 && h.a2 == 0.0 && h.source == 0.0;
  for (double x : h.h_ext) none = none && x == 0.0;
  for (int i = 0; i < 3; ++i) none = none && p.physics.gravity[i] == 0.0;
  return none && p.energy_balances_apply;
}

Outcome energy_ledgers() {
  double worst_total = -INFINITY, min_prod = INFINITY;
  std::string names;
  bool ok = true;
  for (const auto& [name, r] : scenario_runs()) {
    const double tol = balance_tolerance(r.problem.grid, r.problem.step);
    for (std::size_t k = 1; k < r.tr.ledger.size(); ++k) min_prod = std::min(min_prod, r.tr.ledger[k].entropy_prod);
    if (!insulated_without_gravity(r.problem)) continue;
    names += " " + name;
    for (std::size_t k = 1; k < r.tr.ledger.size(); ++k) {
      const double s = r.tr.ledger[k].slack_total;
      worst_total = std::max(worst_total, s - tol);
      if (s > tol) ok = false;
    }
  }
  ok = ok && min_prod >= -1e-10 && !names.empty();
  return {ok, fmt("insulated g=0 runs [%s ]: max(slack - tolerance) %.2e; min entropy production %.2e", names.c_str(),
                  worst_total, min_prod)};
}

// ---------------------------------------------------------------------------

Outcome creep_closed_form() {
  const auto t0 = std::chrono::steady_clock::now();
  const RunConfig cfg = scenario_defaults("uniform_creep");
  const Problem p = build_scenario(cfg);
  const Trajectory tr = run(p.grid, p.physics, p.step, p.initial, p.t_end);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const double factor = 1.0 + 2.0 * cfg.material.shear_modulus * cfg.step.tau / cfg.material.maxwell_modulus;
  double err = 0.0;
  for (std::size_t k = 0; k < tr.size(); ++k) {
    const Sym3d expect = cfg.scenario.strain * std::pow(factor, -static_cast<double>(k));
    for (std::size_t n = 0; n < p.grid.size(); ++n) err = std::max(err, max_abs(tr.states[k].E[n] - expect));
  }
  const std::size_t steps = tr.size() - 1;
  const bool ok = steps == 50 && err <= 1e-10 && secs < 5.0;
  return {ok, fmt("%zu steps (G=%g, M=%g, tau=%g), max |E^k - E0/%.2f^k| = %.2e, %.2f s", steps,
                  cfg.material.shear_modulus, cfg.material.maxwell_modulus, cfg.step.tau, factor, err, secs)};
}

Outcome corotationality() {
  const auto t0 = std::chrono::steady_clock::now();
  const RunConfig cfg = scenario_defaults("rigid_rotation");
  std::vector<double> drift, taus;
  for (int j = 0; j < 3; ++j) {
    RunConfig c = cfg;
    c.step.tau = cfg.step.tau / std::ldexp(1.0, j);
    const Problem p = build_scenario(c);
    const Trajectory tr = run(p.grid, p.physics, p.step, p.initial, p.t_end);
    taus.push_back(c.step.tau);
    drift.push_back(rotation_eigenvalue_drift(p, tr.states.back()));
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const double o1 = std::log2(drift[0] / drift[1]), o2 = std::log2(drift[1] / drift[2]);
  const bool ok = o1 >= 0.9 && o2 >= 0.9 && secs < 60.0;
  return {ok, fmt("drift over one period at tau = T/%.0f, T/%.0f, T/%.0f: %.3e, %.3e, %.3e; orders %.3f, %.3f; %.1f s",
                  cfg.t_end / taus[0], cfg.t_end / taus[1], cfg.t_end / taus[2], drift[0], drift[1], drift[2], o1, o2,
                  secs)};
}

Outcome temporal_convergence() {
  const auto t0 = std::chrono::steady_clock::now();
  const Problem creep = build_scenario(scenario_defaults("uniform_creep"));
  const ConvergenceTable tc = convergence_study(creep, 3);
  const Problem bump = build_scenario(scenario_defaults("heat_bump"));
  const ConvergenceTable tb = convergence_study(bump, 3);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const double oc = tc.order_total.at(0), ob = tb.order_total.at(0);
  const bool grid_ok = bump.grid.n(0) == 16 && bump.grid.n(1) == 16 && bump.grid.n(2) == 1;
  const bool ok = std::fabs(oc - 1.0) <= 0.05 && ob >= 0.7 && ob <= 1.3 && grid_ok && secs < 300.0;
  return {ok, fmt("uniform_creep order %.4f; heat_bump (%dx%dx%d) order %.4f; %.1f s", oc, bump.grid.n(0),
                  bump.grid.n(1), bump.grid.n(2), ob, secs)};
}

Outcome jacobian_correctness() {
  const auto t0 = std::chrono::steady_clock::now();
  Rng rng(10);
  const Grid g({1.0, 1.0, 1.0}, {4, 4, 1});
  const Physics ph = coupled_physics();
  StepConfig cfg;
  const char* names[] = {"mass", "momentum", "strain", "heat"};
  const int lo[] = {0, 1, 4, 10}, hi[] = {1, 4, 10, 11};
  double worst[4] = {0, 0, 0, 0};
  for (int sample = 0; sample < 20; ++sample) {
    const State prev = random_state(g, rng);
    const State cur = random_state(g, rng);
    const Eigen::MatrixXd ad = Eigen::MatrixXd(jacobian(g, ph, cfg, 0.1, prev, cur));
    const Eigen::MatrixXd fd = jacobian_fd(g, ph, cfg, 0.1, prev, cur);
    for (int b = 0; b < 4; ++b) {
      double err = 0.0, scale = 0.0;
      for (Eigen::Index r = 0; r < ad.rows(); ++r) {
        const int s = static_cast<int>(r % kComponents);
        if (s < lo[b] || s >= hi[b]) continue;
        for (Eigen::Index c = 0; c < ad.cols(); ++c) {
          err = std::max(err, std::fabs(ad(r, c) - fd(r, c)));
          scale = std::max(scale, std::fabs(fd(r, c)));
        }
      }
      worst[b] = std::max(worst[b], err / scale);
    }
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  bool ok = secs < 60.0;
  std::string detail;
  for (int b = 0; b < 4; ++b) {
    ok = ok && worst[b] <= 1e-5;
    detail += fmt("%s %.2e, ", names[b], worst[b]);
  }
  return {ok, "20 random 4x4x1 states, max rel. block error: " + detail + fmt("%.1f s", secs)};
}

Outcome determinism() {
  std::vector<std::string> checked;
  bool ok = true;
  for (const std::string& name : {std::string("thermal_expansion"), std::string("gravity_settle"),
                                  std::string("heat_bump")}) {
    std::string reference;
    for (int threads : {1, 4, 1, 3}) {
      RunConfig cfg = scenario_defaults(name);
      cfg.step.threads = threads;
      const Problem p = build_scenario(cfg);
      const std::string csv = format_csv(run(p.grid, p.physics, p.step, p.initial, p.t_end).ledger);
      if (reference.empty())
        reference = csv;
      else if (csv != reference)
        ok = false;
    }
    checked.push_back(name);
  }
  std::string list;
  for (const auto& n : checked) list += " " + n;
  return {ok, fmt("CSV %s across repeats with threads 1, 4, 1, 3 for%s", ok ? "bit-identical" : "DIFFERS",
                  list.c_str())};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"tensor identities", tensor_identities},
      {"constitutive Gibbs suite", gibbs_suite},
      {"exponent region", exponent_region},
      {"mass conservation", mass_conservation},
      {"positivity", positivity},
      {"energy ledgers", energy_ledgers},
      {"creep closed form", creep_closed_form},
      {"corotationality", corotationality},
      {"temporal convergence", temporal_convergence},
      {"Jacobian correctness", jacobian_correctness},
      {"determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += o.pass ? 0 : 1;
    std::printf("%s  %2zu %-26s %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu criteria, %d failed\n", criteria.size(), failed);
  return failed;
}
