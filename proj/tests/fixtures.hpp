// Random samples and small fixtures shared by the test binaries.
#pragma once

#include <Eigen/Dense>
#include <random>

#include "tve/constitutive.hpp"
#include "tve/stepper.hpp"
#include "tve/tensor.hpp"

namespace tve::testing {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); }

inline Sym3d random_sym(Rng& rng, double scale = 1.0) {
  Sym3d s;
  for (double& x : s.c) x = uniform(rng, -scale, scale);
  return s;
}

inline Mat3d random_mat(Rng& rng, double scale = 1.0) {
  Mat3d m;
  for (double& x : m.c) x = uniform(rng, -scale, scale);
  return m;
}

inline Third3d random_third(Rng& rng, double scale = 1.0) {
  Third3d h;
  for (double& x : h.c) x = uniform(rng, -scale, scale);
  return h;
}

inline Eigen::Matrix3d random_rotation(Rng& rng) {
  Eigen::Matrix3d a;
  for (int i = 0; i < 9; ++i) a(i) = uniform(rng, -1.0, 1.0);
  Eigen::HouseholderQR<Eigen::Matrix3d> qr(a);
  return qr.householderQ();
}

/// Q diag(d) Q^T.
inline Sym3d rotated_diag(const Eigen::Matrix3d& q, const Eigen::Vector3d& d) {
  const Eigen::Matrix3d m = q * d.asDiagonal() * q.transpose();
  Sym3d s;
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) s(i, j) = 0.5 * (m(i, j) + m(j, i));
  return s;
}

inline double max_abs(const Sym3d& s) {
  double m = 0.0;
  for (double x : s.c) m = std::max(m, std::fabs(x));
  return m;
}

/// Fully coupled physics for Jacobian and residual checks: thermal expansion,
/// Arrhenius creep, Stokes and hyper viscosity, Robin heat exchange, gravity.
inline Physics coupled_physics() {
  ThermoCreepMaterial tm;
  tm.bulk_modulus = 2.0;
  tm.shear_modulus = 1.5;
  tm.expansion = 0.3;
  tm.heat_capacity = 1.2;
  tm.alpha = 1.0;
  tm.maxwell_modulus = 2.0;
  tm.maxwell_activation = 0.5;
  Physics ph;
  ph.material = tm.material();
  ph.dissipation.maxwell = tm.maxwell_law();
  ph.dissipation.shear_viscosity = 0.1;
  ph.dissipation.bulk_viscosity = 0.05;
  ph.dissipation.hyper_mu = 1e-3;
  ph.dissipation.hyper_p = 4.0;
  ph.heat.kappa0 = 0.05;
  ph.heat.beta = 1.5;
  ph.heat.a1 = 0.1;
  ph.heat.a2 = 0.01;
  ph.heat.h_ext = {0.2, 0.0, 0.1, 0.05, 0.0, 0.0};
  ph.heat.source = 0.01;
  ph.gravity = Vec3d{{0.1, -0.5, 0.0}};
  return ph;
}

/// Smooth-ish random state around rho = theta = 1.
inline State random_state(const Grid& g, Rng& rng, double amp = 0.1) {
  State s(g);
  for (std::size_t n = 0; n < g.size(); ++n) {
    s.rho[n] = 1.0 + uniform(rng, -amp, amp);
    s.theta[n] = 1.0 + uniform(rng, -amp, amp);
    for (int i = 0; i < 3; ++i) s.v[n][i] = uniform(rng, -amp, amp);
    s.E[n] = random_sym(rng, amp);
  }
  return s;
}

}  // namespace tve::testing
