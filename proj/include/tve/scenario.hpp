// Built-in scenarios on the unit box (pseudo-2D, nondimensional units).
//
//   rest_equilibrium    uniform rho0, theta0, v = E = 0; boundary inflow h_ext
//                       balances the out-flux h(theta0), so the state is steady
//   uniform_creep       spatially uniform deviatoric strain E0 relaxing by
//                       Maxwell creep; v stays 0, insulated
//   thermal_expansion   heating through the -x face of a thermally expanding
//                       body, cooling elsewhere
//   heat_bump           Gaussian temperature bump theta0 + A exp(-|x-c|^2/w^2)
//                       with the velocity frozen at 0, insulated
//   gravity_settle      body at rest released under gravity
//   wave_attenuation    standing anti-plane shear wave v_z = A cos(k pi x / Lx)
//   rigid_rotation      prescribed rotation v = curl(psi e_z) with angular
//                       velocity omega inside core_radius, decaying to 0 at
//                       outer_radius, carrying a strain E0 supported in the core
//   compression_stress  strong converging flow v_x = A sin(2 pi x / Lx) that
//                       drains the wall cells; exercises tau-halving
#pragma once

#include <functional>
#include <string>
#include <vector>

#include "tve/config.hpp"
#include "tve/state.hpp"

namespace tve {

const std::vector<std::string>& scenario_names();

/// Defaults of a scenario (grid, material, loading, time span). Throws
/// std::invalid_argument for an unknown name.
RunConfig scenario_defaults(const std::string& name);

Physics make_physics(const RunConfig& cfg);

struct Problem {
  std::string name;
  Grid grid;
  Physics physics;
  StepConfig step;
  State initial;
  double t_end = 0.0;
  /// False when a non-zero prescribed velocity does work on the body, so the
  /// energy ledgers cannot close.
  bool energy_balances_apply = true;
  /// Analytic strain field at (x, t) when known (rigid_rotation).
  std::function<Sym3d(const Vec3d&, double)> reference_strain;
};

/// Validates cfg and builds grid, physics and the initial state.
Problem build_scenario(const RunConfig& cfg);

/// Largest eigenvalue deviation of E from the reference strain over the cells
/// within 0.75 h of the rotation axis. On an odd grid this is the centre cell,
/// which the quarter-turn symmetry of the grid shields from the strain
/// generated in the shear layer. Requires problem.reference_strain.
double rotation_eigenvalue_drift(const Problem& problem, const State& s);

}  // namespace tve
