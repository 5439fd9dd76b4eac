#include "tve/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace tve {

namespace {

double pressure_like_power(const MaterialModel& m, const Sym3d& e, double theta, double div_v) {
  return adiabatic_coefficient(m, e, theta) * div_v;
}

double cell_dissipation(const Grid& g, const Physics& ph, const State& s, std::size_t n, const Mat3d& grad_v) {
  const DissipationModel& d = ph.dissipation;
  const DevTensor3<double> pi = creep_rate(ph.material, d, s.E[n], s.theta[n]);
  const Third3d h = d.hyper_mu > 0.0 ? second_gradient_at(g, s.v, g.cell(n)) : Third3d{};
  return dissipation_rate(d, s.theta[n], sym(grad_v), pi, h);
}

double boundary_sum(const Grid& g, const std::function<double(Face, std::size_t)>& fn) {
  return surface_integrate(g, fn);
}

}  // namespace

StepIntegrals step_integrals(const Grid& g, const Physics& ph, const State& cur, double tau, double lambda) {
  StepIntegrals r;
  const double vol = g.cell_volume();
  for (std::size_t n = 0; n < g.size(); ++n) {
    const CellIndex c = g.cell(n);
    const Mat3d gv = velocity_gradient_at(g, cur.v, c);
    const double xi = cell_dissipation(g, ph, cur, n, gv);
    const double th = cur.theta[n];
    const Vec3d gt = gradient_at(g, cur.theta, c);
    r.diss += xi * vol;
    r.grav_power += cur.rho[n] * dot(ph.gravity, cur.v[n]) * vol;
    r.adiab_power += pressure_like_power(ph.material, cur.E[n], th, trace(gv)) * vol;
    r.source += ph.heat.source * vol;
    r.entropy_prod += (xi / std::pow(th, lambda) +
                       conductivity(ph.heat, th) * dot(gt, gt) / std::pow(th, 1.0 + lambda)) * vol;
  }
  r.bnd_in = boundary_sum(g, [&](Face f, std::size_t) { return ph.heat.h_ext[static_cast<int>(f)]; });
  r.bnd_out = boundary_sum(g, [&](Face, std::size_t n) { return boundary_outflux(ph.heat, cur.theta[n]); });
  r.diss *= tau;
  r.grav_power *= tau;
  r.adiab_power *= tau;
  r.source *= tau;
  r.entropy_prod *= tau;
  r.bnd_in *= tau;
  r.bnd_out *= tau;
  return r;
}

double total_mass(const Grid& g, const State& s) { return integrate(g, s.rho); }

double kinetic_energy(const Grid& g, const State& s) {
  const Field<Vec3d> p = momentum(s);
  double k = 0.0;
  for (std::size_t n = 0; n < g.size(); ++n) k += 0.5 * dot(p[n], p[n]) / s.rho[n];
  return k * g.cell_volume();
}

double kinetic_energy_from_velocity(const Grid& g, const State& s) {
  double k = 0.0;
  for (std::size_t n = 0; n < g.size(); ++n) k += 0.5 * s.rho[n] * dot(s.v[n], s.v[n]);
  return k * g.cell_volume();
}

double stored_energy_total(const Grid& g, const MaterialModel& m, const State& s) {
  double e = 0.0;
  for (std::size_t n = 0; n < g.size(); ++n) e += stored_energy(m, s.E[n]);
  return e * g.cell_volume();
}

double thermal_energy_total(const Grid& g, const MaterialModel& m, const State& s) {
  double e = 0.0;
  for (std::size_t n = 0; n < g.size(); ++n) e += thermal_energy(m, s.theta[n]);
  return e * g.cell_volume();
}

double entropy_total(const Grid& g, const MaterialModel& m, const State& s) {
  double e = 0.0;
  for (std::size_t n = 0; n < g.size(); ++n) e += entropy(m, s.E[n], s.theta[n]);
  return e * g.cell_volume();
}

MassPositivity mass_and_positivity(const Grid& g, const State& s) {
  MassPositivity r;
  r.mass = total_mass(g, s);
  r.min_rho = std::numeric_limits<double>::infinity();
  r.min_theta = std::numeric_limits<double>::infinity();
  for (std::size_t n = 0; n < g.size(); ++n) {
    r.min_rho = std::min(r.min_rho, s.rho[n]);
    r.min_theta = std::min(r.min_theta, s.theta[n]);
  }
  r.max_sparsity = 1.0 / r.min_rho;
  return r;
}

double mechanical_energy_check(const Grid& g, const Physics& ph, const State& prev, const State& cur, double tau) {
  const StepIntegrals si = step_integrals(g, ph, cur, tau, 1.0);
  const double before = kinetic_energy(g, prev) + stored_energy_total(g, ph.material, prev);
  const double after = kinetic_energy(g, cur) + stored_energy_total(g, ph.material, cur);
  return before - after - si.diss + si.grav_power - si.adiab_power;
}

double total_energy_check(const Grid& g, const Physics& ph, const State& prev, const State& cur, double tau) {
  const StepIntegrals si = step_integrals(g, ph, cur, tau, 1.0);
  const MaterialModel& m = ph.material;
  const double before = kinetic_energy(g, prev) + stored_energy_total(g, m, prev) + thermal_energy_total(g, m, prev);
  const double after = kinetic_energy(g, cur) + stored_energy_total(g, m, cur) + thermal_energy_total(g, m, cur);
  return after - before + si.bnd_out - si.grav_power - si.bnd_in - si.source;
}

EntropyCheck entropy_production_check(const Grid& g, const Physics& ph, const State& prev, const State& cur,
                                      double tau, double lambda) {
  const MaterialModel& m = ph.material;
  if (!(lambda >= 0.0 && lambda < 1.0 + m.alpha))
    throw DomainError("entropy test exponent lambda must satisfy 0 <= lambda < 1 + alpha");
  EntropyCheck r;
  r.production = step_integrals(g, ph, cur, tau, lambda).entropy_prod;

  // Test the discrete heat equation with theta^(-lambda) and use concavity of
  // the generalized entropy in u.
  const std::size_t N = g.size();
  const double vol = g.cell_volume();
  Field<double> kappa(g);
  Field<Vec3d> uv(g);
  for (std::size_t n = 0; n < N; ++n) {
    kappa[n] = conductivity(ph.heat, cur.theta[n]);
    uv[n] = cur.v[n] * thermal_energy(m, cur.theta[n]);
  }
  const Field<double> cond = conduction(g, cur.theta, kappa);
  const Field<double> robin = robin_heat_flux(g, cur.theta, ph.heat, cur.t);
  const Field<double> div_uv = conservative_div_flux(g, uv);
  double budget = 0.0, prod = 0.0;
  for (std::size_t n = 0; n < N; ++n) {
    const CellIndex c = g.cell(n);
    const double th = cur.theta[n];
    const double w = std::pow(th, -lambda);
    const Mat3d gv = velocity_gradient_at(g, cur.v, c);
    const double xi = cell_dissipation(g, ph, cur, n, gv);
    const double d_eta = generalized_entropy_of_energy(m, thermal_energy(m, th), lambda) -
                         generalized_entropy_of_energy(m, thermal_energy(m, prev.theta[n]), lambda);
    budget += d_eta / tau - w * (-div_uv[n] + robin[n] + pressure_like_power(m, cur.E[n], th, trace(gv)) +
                                 ph.heat.source);
    prod += w * (xi + cond[n]);
  }
  r.discrete_production = tau * prod * vol;
  r.slack = tau * budget * vol - r.discrete_production;
  return r;
}

double balance_tolerance(const Grid& g, const StepConfig& cfg) {
  return std::max(1e-10, 10.0 * cfg.newton_tol * g.volume());
}

MonitorExponents monitor_exponents(const Physics& ph, const StepConfig& cfg) {
  MonitorExponents ex;
  ex.p = ph.dissipation.hyper_p;
  ex.r = cfg.rho_exponent;
  ex.s = cfg.strain_exponent;
  const ExponentCheck chk = admissible_exponents(ph.material.alpha, ph.heat.beta, cfg.lambda);
  ex.mu = chk.admissible ? chk.mu_max : 2.0;
  return ex;
}

NormMonitors MonitorTracker::add(const Grid& g, const State& cur, double tau) {
  NormMonitors r;
  const double vol = g.cell_volume();
  const double a = ph_.material.alpha;
  double kin = 0.0, el2 = 0.0, emax = 0.0, th = 0.0, eps = 0.0, hess = 0.0, gth = 0.0, grho = 0.0, ge = 0.0;
  const Field<Vec3d> p = momentum(cur);
  for (std::size_t n = 0; n < g.size(); ++n) {
    const CellIndex c = g.cell(n);
    kin += dot(p[n], p[n]) / cur.rho[n];
    const double e2 = norm2(cur.E[n]);
    el2 += e2;
    emax = std::max(emax, std::sqrt(e2));
    th += std::pow(cur.theta[n], 1.0 + a);
    const Sym3d e = sym(velocity_gradient_at(g, cur.v, c));
    eps += norm2(e);
    const Third3d h = second_gradient_at(g, cur.v, c);
    hess += std::pow(triple_contraction(h, h), 0.5 * ex_.p);
    const Vec3d gt = gradient_at(g, cur.theta, c);
    gth += std::pow(dot(gt, gt), 0.5 * ex_.mu);
    const Vec3d gr = gradient_at(g, cur.rho, c);
    grho += std::pow(dot(gr, gr), 0.5 * ex_.r);
    double ge2 = 0.0;
    for (int d = 0; d < 3; ++d) {
      const Sym3d de = central_diff(g, d, c, [&](const CellIndex& m) { return at(g, cur.E, m); });
      ge2 += norm2(de);
    }
    ge += std::pow(ge2, 0.5 * ex_.s);
  }
  eps_sq_ += tau * eps * vol;
  hess_p_ += tau * hess * vol;
  grad_theta_mu_ += tau * gth * vol;
  r.kin_l2 = std::sqrt(kin * vol);
  r.E_l2 = std::sqrt(el2 * vol);
  r.E_max = emax;
  r.theta_l1a = std::pow(th * vol, 1.0 / (1.0 + a));
  r.eps_l2_int = std::sqrt(eps_sq_);
  r.hess_lp_int = std::pow(hess_p_, 1.0 / ex_.p);
  r.gradtheta_lmu_int = std::pow(grad_theta_mu_, 1.0 / ex_.mu);
  r.gradrho_lr = std::pow(grho * vol, 1.0 / ex_.r);
  r.gradE_ls = std::pow(ge * vol, 1.0 / ex_.s);
  return r;
}

const std::vector<std::string>& ledger_columns() {
  static const std::vector<std::string> cols = {
      "t", "mass", "E_kin", "E_stored", "E_therm", "diss", "grav_power", "adiab_power", "bnd_in", "bnd_out",
      "entropy", "entropy_prod", "min_rho", "min_theta", "slack_mech", "slack_total", "max_sparsity",
      "nm_kin_l2", "nm_E_l2", "nm_E_max", "nm_theta_l1a", "nm_eps_l2_int", "nm_hess_lp_int",
      "nm_gradtheta_lmu_int", "nm_gradrho_lr", "nm_gradE_ls"};
  return cols;
}

std::vector<double> ledger_values(const LedgerRow& r) {
  const NormMonitors& m = r.monitors;
  return {r.t, r.mass, r.E_kin, r.E_stored, r.E_therm, r.diss, r.grav_power, r.adiab_power, r.bnd_in,
          r.bnd_out, r.entropy, r.entropy_prod, r.min_rho, r.min_theta, r.slack_mech, r.slack_total,
          r.max_sparsity, m.kin_l2, m.E_l2, m.E_max, m.theta_l1a, m.eps_l2_int, m.hess_lp_int,
          m.gradtheta_lmu_int, m.gradrho_lr, m.gradE_ls};
}

LedgerBuilder::LedgerBuilder(const Grid& g, const Physics& ph, const StepConfig& cfg)
    : g_(g), ph_(ph), lambda_(cfg.lambda), tracker_(ph, monitor_exponents(ph, cfg)) {}

LedgerRow LedgerBuilder::snapshot(const State& s) const {
  LedgerRow r;
  r.t = s.t;
  const MassPositivity mp = mass_and_positivity(g_, s);
  r.mass = mp.mass;
  r.min_rho = mp.min_rho;
  r.min_theta = mp.min_theta;
  r.max_sparsity = mp.max_sparsity;
  r.E_kin = kinetic_energy(g_, s);
  r.E_stored = stored_energy_total(g_, ph_.material, s);
  r.E_therm = thermal_energy_total(g_, ph_.material, s);
  r.entropy = entropy_total(g_, ph_.material, s);
  return r;
}

LedgerRow LedgerBuilder::initial(const State& s) {
  LedgerRow r = snapshot(s);
  r.monitors = tracker_.add(g_, s, 0.0);
  pending_ = LedgerRow{};
  return r;
}

void LedgerBuilder::substep(const State& prev, const State& cur, double tau) {
  const StepIntegrals si = step_integrals(g_, ph_, cur, tau, lambda_);
  pending_.diss += si.diss;
  pending_.grav_power += si.grav_power;
  pending_.adiab_power += si.adiab_power;
  pending_.bnd_in += si.bnd_in;
  pending_.bnd_out += si.bnd_out;
  pending_.source += si.source;
  pending_.entropy_prod += si.entropy_prod;
  pending_.slack_mech += mechanical_energy_check(g_, ph_, prev, cur, tau);
  pending_.slack_total += total_energy_check(g_, ph_, prev, cur, tau);
  pending_.slack_entropy += entropy_production_check(g_, ph_, prev, cur, tau, lambda_).slack;
  pending_.monitors = tracker_.add(g_, cur, tau);
}

LedgerRow LedgerBuilder::finish_step(const State& cur) {
  LedgerRow r = snapshot(cur);
  r.diss = pending_.diss;
  r.grav_power = pending_.grav_power;
  r.adiab_power = pending_.adiab_power;
  r.bnd_in = pending_.bnd_in;
  r.bnd_out = pending_.bnd_out;
  r.source = pending_.source;
  r.entropy_prod = pending_.entropy_prod;
  r.slack_mech = pending_.slack_mech;
  r.slack_total = pending_.slack_total;
  r.slack_entropy = pending_.slack_entropy;
  r.monitors = pending_.monitors;
  pending_ = LedgerRow{};
  return r;
}

BalanceReport evaluate_balances(const std::vector<LedgerRow>& rows, double tolerance, bool energy_balances_apply) {
  BalanceReport b;
  b.tolerance = tolerance;
  if (rows.empty()) return b;
  const double m0 = rows.front().mass;
  b.min_rho = b.min_theta = std::numeric_limits<double>::infinity();
  b.min_slack_mech = b.min_slack_entropy = b.min_entropy_prod = std::numeric_limits<double>::infinity();
  b.max_slack_total = -std::numeric_limits<double>::infinity();
  char buf[256];
  bool total_reported = false;
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const LedgerRow& r = rows[k];
    const double drift = std::fabs(r.mass - m0) / std::fabs(m0);
    b.worst_mass_drift = std::max(b.worst_mass_drift, drift);
    b.min_rho = std::min(b.min_rho, r.min_rho);
    b.min_theta = std::min(b.min_theta, r.min_theta);
    if (k == 0) continue;
    b.min_slack_mech = std::min(b.min_slack_mech, r.slack_mech);
    b.max_slack_total = std::max(b.max_slack_total, r.slack_total);
    b.min_slack_entropy = std::min(b.min_slack_entropy, r.slack_entropy);
    b.min_entropy_prod = std::min(b.min_entropy_prod, r.entropy_prod);
    if (drift > 1e-12 && b.mass_ok) {
      b.mass_ok = false;
      std::snprintf(buf, sizeof buf, "mass drift %.3e at t=%.6g", drift, r.t);
      b.findings.emplace_back(buf);
    }
    if (!(r.min_rho > 0.0 && r.min_theta > 0.0) && b.positivity_ok) {
      b.positivity_ok = false;
      std::snprintf(buf, sizeof buf, "non-positive density or temperature at t=%.6g", r.t);
      b.findings.emplace_back(buf);
    }
    if (r.slack_mech < -tolerance && b.mechanical_ok) {
      b.mechanical_ok = false;
      std::snprintf(buf, sizeof buf, "mechanical energy inequality violated by %.3e at t=%.6g", -r.slack_mech, r.t);
      b.findings.emplace_back(buf);
    }
    if (r.slack_total > tolerance && !total_reported) {
      total_reported = true;
      b.total_ok = !energy_balances_apply;
      std::snprintf(buf, sizeof buf, "total energy grew by %.3e beyond the supplied work at t=%.6g%s", r.slack_total,
                    r.t, energy_balances_apply ? "" : " (prescribed velocity, not asserted)");
      b.findings.emplace_back(buf);
    }
    if (r.entropy_prod < -1e-10 && b.entropy_ok) {
      b.entropy_ok = false;
      std::snprintf(buf, sizeof buf, "negative entropy production %.3e at t=%.6g", r.entropy_prod, r.t);
      b.findings.emplace_back(buf);
    }
  }
  if (!energy_balances_apply) b.mechanical_ok = true;
  if (rows.size() == 1) b.min_slack_mech = b.min_slack_entropy = b.min_entropy_prod = b.max_slack_total = 0.0;
  return b;
}

}  // namespace tve
