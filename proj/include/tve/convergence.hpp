// Temporal self-convergence under tau-halving on a fixed grid.
#pragma once

#include <string>
#include <vector>

#include "tve/scenario.hpp"
#include "tve/stepper.hpp"

namespace tve {

/// Distances between consecutive levels j and j+1 (tau_j = tau / 2^j),
/// measured on the piecewise-affine interpolants:
///   E, theta in L^inf(I; L^2), v in L^2(I; H^1).
/// total is the sum of the three. Orders are log2(d_j / d_(j+1)); an order is
/// NaN when either distance vanishes.
struct ConvergenceTable {
  std::vector<double> taus;
  std::vector<double> dist_E, dist_theta, dist_v, dist_total;
  std::vector<double> order_E, order_theta, order_v, order_total;
  std::vector<int> newton_iterations;  // per level
};

/// Distances between the affine interpolants of two trajectories, evaluated
/// at the nodes of the finer one (the difference is affine between them).
struct TrajectoryDistance {
  double E = 0.0;
  double theta = 0.0;
  double v = 0.0;
};
TrajectoryDistance trajectory_distance(const Grid& g, const Trajectory& coarse, const Trajectory& fine);

/// Runs `levels` >= 3 levels of the problem. Throws std::invalid_argument for
/// fewer levels and StepFailure when a level fails.
ConvergenceTable convergence_study(const Problem& problem, int levels);

std::string format_convergence(const ConvergenceTable& t);

}  // namespace tve
