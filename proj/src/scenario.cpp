#include "tve/scenario.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace tve {

namespace {

/// 1 below r1, 0 above r2, cubic smoothstep in between.
double cutoff(double r, double r1, double r2) {
  if (r <= r1) return 1.0;
  if (r >= r2) return 0.0;
  const double u = (r - r1) / (r2 - r1);
  return 1.0 - u * u * (3.0 - 2.0 * u);
}

/// int_0^r s cutoff(s) ds in closed form.
double cutoff_moment(double r, double r1, double r2) {
  if (r <= r1) return 0.5 * r * r;
  const double d = r2 - r1;
  const double u = std::min(1.0, (r - r1) / d);
  const double u2 = u * u, u3 = u2 * u, u4 = u3 * u, u5 = u4 * u;
  return 0.5 * r1 * r1 + d * (r1 * (u - u3 + 0.5 * u4) + d * (0.5 * u2 - 0.75 * u4 + 0.4 * u5));
}

Vec3d box_centre(const Grid& g) {
  const auto& L = g.lengths();
  return Vec3d{{0.5 * L[0], 0.5 * L[1], 0.5 * L[2]}};
}

double planar_radius(const Vec3d& x, const Vec3d& c) { return std::hypot(x[0] - c[0], x[1] - c[1]); }

Sym3d rotate_z(const Sym3d& e, double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  Mat3d R;
  R(0, 0) = c;
  R(0, 1) = -s;
  R(1, 0) = s;
  R(1, 1) = c;
  R(2, 2) = 1.0;
  Sym3d out;
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) {
      double acc = 0.0;
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) acc += R(i, k) * e(k, l) * R(j, l);
      out(i, j) = acc;
    }
  return out;
}

void set_all_faces(RunConfig& c, double h_ext) {
  for (double& x : c.heat.h_ext) x = h_ext;
}

}  // namespace

const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names = {"rest_equilibrium", "uniform_creep",  "thermal_expansion",
                                                 "heat_bump",        "gravity_settle", "wave_attenuation",
                                                 "rigid_rotation",   "compression_stress"};
  return names;
}

RunConfig scenario_defaults(const std::string& name) {
  RunConfig c;
  c.scenario.name = name;
  c.step.tau = 0.1;
  c.t_end = 1.0;
  if (name == "rest_equilibrium") {
    c.heat.a1 = 0.1;
    set_all_faces(c, 0.1);  // h(theta0) with theta0 = 1
  } else if (name == "uniform_creep") {
    c.grid.cells = {4, 4, 1};
    c.material.shear_modulus = 1.0;
    c.material.maxwell_modulus = 2.0;
    c.scenario.strain = Sym3d::diag(0.1, -0.05, -0.05);
    c.t_end = 5.0;
  } else if (name == "thermal_expansion") {
    c.material.expansion = 0.1;
    c.heat.a1 = 0.05;
    c.heat.h_ext[static_cast<int>(Face::XMinus)] = 0.5;
  } else if (name == "heat_bump") {
    c.grid.cells = {16, 16, 1};
    c.scenario.amplitude = 0.5;
    c.scenario.width = 0.15;
  } else if (name == "gravity_settle") {
    c.material.bulk_modulus = 10.0;
    c.material.shear_modulus = 5.0;
    c.gravity = Vec3d{{0.0, -1.0, 0.0}};
  } else if (name == "wave_attenuation") {
    c.grid.lengths = {1.0, 0.25, 1.0};
    c.grid.cells = {16, 4, 1};
    c.material.creep = false;
    c.dissipation.shear_viscosity = 0.0;
    c.dissipation.bulk_viscosity = 0.0;
    c.dissipation.hyper_mu = 1e-2;
    c.scenario.amplitude = 0.05;
    c.scenario.wavenumber = 2.0;
    c.step.tau = 0.05;
    c.t_end = 2.0;
  } else if (name == "rigid_rotation") {
    c.grid.cells = {11, 11, 1};
    c.material.creep = false;
    c.scenario.omega = 1.0;
    c.scenario.strain = Sym3d{};
    c.scenario.strain(0, 2) = 0.01;
    c.t_end = 2.0 * std::numbers::pi;
    c.step.tau = c.t_end / 160.0;
  } else if (name == "compression_stress") {
    c.material.bulk_modulus = 0.1;
    c.material.shear_modulus = 0.1;
    c.dissipation.shear_viscosity = 0.01;
    c.dissipation.bulk_viscosity = 0.01;
    c.scenario.amplitude = 2.0;
    c.step.tau = 0.2;
    c.t_end = 0.4;
  } else {
    std::string known;
    for (const auto& n : scenario_names()) known += (known.empty() ? "" : ", ") + n;
    throw std::invalid_argument("unknown scenario '" + name + "' (known: " + known + ")");
  }
  return c;
}

Physics make_physics(const RunConfig& cfg) {
  ThermoCreepMaterial tm;
  tm.bulk_modulus = cfg.material.bulk_modulus;
  tm.shear_modulus = cfg.material.shear_modulus;
  tm.expansion = cfg.material.expansion;
  tm.heat_capacity = cfg.material.heat_capacity;
  tm.alpha = cfg.material.alpha;
  tm.maxwell_modulus = cfg.material.maxwell_modulus;
  tm.maxwell_activation = cfg.material.maxwell_activation;
  Physics ph;
  ph.material = tm.material();
  ph.dissipation.shear_viscosity = cfg.dissipation.shear_viscosity;
  ph.dissipation.bulk_viscosity = cfg.dissipation.bulk_viscosity;
  ph.dissipation.hyper_mu = cfg.dissipation.hyper_mu;
  ph.dissipation.hyper_p = cfg.dissipation.p;
  ph.dissipation.maxwell = tm.maxwell_law();
  ph.dissipation.creep = cfg.material.creep;
  ph.heat.kappa0 = cfg.heat.kappa0;
  ph.heat.beta = cfg.heat.beta;
  ph.heat.a1 = cfg.heat.a1;
  ph.heat.a2 = cfg.heat.a2;
  ph.heat.h_ext = cfg.heat.h_ext;
  ph.heat.source = cfg.heat.source;
  ph.gravity = cfg.gravity;
  return ph;
}

Problem build_scenario(const RunConfig& cfg) {
  validate_config(cfg);
  Problem p;
  p.name = cfg.scenario.name;
  p.grid = Grid(cfg.grid.lengths, cfg.grid.cells);
  p.physics = make_physics(cfg);
  p.step = cfg.step;
  p.t_end = cfg.t_end;
  const Grid& g = p.grid;
  const ScenarioSpec& sc = cfg.scenario;
  State s(g);
  for (std::size_t n = 0; n < g.size(); ++n) {
    s.rho[n] = sc.rho0;
    s.theta[n] = sc.theta0;
  }
  const Vec3d c = box_centre(g);
  const auto& L = g.lengths();
  const double pi = std::numbers::pi;

  if (p.name == "rest_equilibrium" || p.name == "thermal_expansion" || p.name == "gravity_settle") {
    // Uniform state at rest.
  } else if (p.name == "uniform_creep") {
    for (std::size_t n = 0; n < g.size(); ++n) s.E[n] = sc.strain;
  } else if (p.name == "heat_bump") {
    p.physics.prescribed_velocity = [](const Vec3d&, double) { return Vec3d{}; };
    for (std::size_t n = 0; n < g.size(); ++n) {
      const Vec3d x = g.center(n);
      double r2 = 0.0;
      for (int d = 0; d < 3; ++d)
        if (g.active(d)) r2 += (x[d] - c[d]) * (x[d] - c[d]);
      s.theta[n] = sc.theta0 + sc.amplitude * std::exp(-r2 / (sc.width * sc.width));
    }
  } else if (p.name == "wave_attenuation") {
    for (std::size_t n = 0; n < g.size(); ++n)
      s.v[n][2] = sc.amplitude * std::cos(sc.wavenumber * pi * g.center(n)[0] / L[0]);
  } else if (p.name == "compression_stress") {
    for (std::size_t n = 0; n < g.size(); ++n) s.v[n][0] = sc.amplitude * std::sin(2.0 * pi * g.center(n)[0] / L[0]);
  } else if (p.name == "rigid_rotation") {
    if (!(sc.core_radius > 0.0 && sc.outer_radius > sc.core_radius && sc.support_radius > 0.0))
      throw ConfigError("scenario: rigid_rotation needs 0 < core_radius < outer_radius and support_radius > 0");
    const double omega = sc.omega, r1 = sc.core_radius, r2 = sc.outer_radius;
    const double hx = g.h(0), hy = g.h(1);
    auto psi = [=](double x, double y) { return -omega * cutoff_moment(std::hypot(x - c[0], y - c[1]), r1, r2); };
    // Central differences of the stream function make the field discretely
    // divergence-free; inside the core it is exactly omega e_z x (x - c).
    p.physics.prescribed_velocity = [=](const Vec3d& x, double) {
      return Vec3d{{(psi(x[0], x[1] + hy) - psi(x[0], x[1] - hy)) / (2.0 * hy),
                    -(psi(x[0] + hx, x[1]) - psi(x[0] - hx, x[1])) / (2.0 * hx), 0.0}};
    };
    const Sym3d e0 = sc.strain;
    const double rs = sc.support_radius;
    auto initial_strain = [=](const Vec3d& x) { return e0 * cutoff(planar_radius(x, c), 0.5 * rs, rs); };
    p.reference_strain = [=](const Vec3d& x, double t) {
      const double a = omega * t, ca = std::cos(a), sa = std::sin(a);
      const Vec3d back{{c[0] + ca * (x[0] - c[0]) + sa * (x[1] - c[1]), c[1] - sa * (x[0] - c[0]) + ca * (x[1] - c[1]),
                        x[2]}};
      return rotate_z(initial_strain(back), a);
    };
    p.energy_balances_apply = false;
    for (std::size_t n = 0; n < g.size(); ++n) {
      s.E[n] = initial_strain(g.center(n));
      s.v[n] = p.physics.prescribed_velocity(g.center(n), 0.0);
    }
  } else {
    throw ConfigError("unknown scenario '" + p.name + "'");
  }
  p.initial = std::move(s);
  return p;
}

double rotation_eigenvalue_drift(const Problem& problem, const State& s) {
  if (!problem.reference_strain) throw std::invalid_argument("scenario has no reference strain");
  const Grid& g = problem.grid;
  const Vec3d c = box_centre(g);
  const double radius = 0.75 * std::min(g.h(0), g.h(1));
  double drift = 0.0;
  for (std::size_t n = 0; n < g.size(); ++n) {
    const Vec3d x = g.center(n);
    if (planar_radius(x, c) > radius) continue;
    const Sym3d ref = problem.reference_strain(x, s.t);
    Eigen::Matrix3d a, b;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        a(i, j) = s.E[n](i, j);
        b(i, j) = ref(i, j);
      }
    const Eigen::Vector3d ea = Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(a, Eigen::EigenvaluesOnly).eigenvalues();
    const Eigen::Vector3d eb = Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(b, Eigen::EigenvaluesOnly).eigenvalues();
    drift = std::max(drift, (ea - eb).cwiseAbs().maxCoeff());
  }
  return drift;
}

}  // namespace tve
