#include "tve/convergence.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace tve {

namespace {

double l2_sq(const Grid& g, const State& a, const State& b, int which) {
  double acc = 0.0;
  for (std::size_t n = 0; n < g.size(); ++n) {
    if (which == 0) {
      const Sym3d d = a.E[n] - b.E[n];
      acc += ddot(d, d);
    } else {
      const double d = a.theta[n] - b.theta[n];
      acc += d * d;
    }
  }
  return acc * g.cell_volume();
}

/// H1 inner product of the velocity differences da = a1 - a2 and db = b1 - b2.
double h1_inner(const Grid& g, const Field<Vec3d>& da, const Field<Vec3d>& db) {
  const Field<Mat3d> ga = velocity_gradient(g, da);
  const Field<Mat3d> gb = velocity_gradient(g, db);
  double acc = 0.0;
  for (std::size_t n = 0; n < g.size(); ++n) {
    acc += dot(da[n], db[n]);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) acc += ga[n](i, j) * gb[n](i, j);
  }
  return acc * g.cell_volume();
}

Field<Vec3d> velocity_difference(const State& a, const State& b) {
  Field<Vec3d> d(a.v.size());
  for (std::size_t n = 0; n < d.size(); ++n) d[n] = a.v[n] - b.v[n];
  return d;
}

double order(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  return std::log2(a / b);
}

}  // namespace

TrajectoryDistance trajectory_distance(const Grid& g, const Trajectory& coarse, const Trajectory& fine) {
  TrajectoryDistance d;
  double e_max = 0.0, th_max = 0.0, v_int = 0.0;
  Field<Vec3d> prev_dv;
  double prev_t = 0.0;
  for (std::size_t k = 0; k < fine.size(); ++k) {
    const State& f = fine.states[k];
    const State c = coarse.affine_at(f.t);
    e_max = std::max(e_max, l2_sq(g, f, c, 0));
    th_max = std::max(th_max, l2_sq(g, f, c, 1));
    Field<Vec3d> dv = velocity_difference(f, c);
    if (k > 0) {
      // Exact integral of the squared norm of an affine function of t.
      const double dt = f.t - prev_t;
      v_int += dt / 3.0 * (h1_inner(g, prev_dv, prev_dv) + h1_inner(g, prev_dv, dv) + h1_inner(g, dv, dv));
    }
    prev_dv = std::move(dv);
    prev_t = f.t;
  }
  d.E = std::sqrt(e_max);
  d.theta = std::sqrt(th_max);
  d.v = std::sqrt(std::max(0.0, v_int));
  return d;
}

ConvergenceTable convergence_study(const Problem& problem, int levels) {
  if (levels < 3) throw std::invalid_argument("convergence study needs at least 3 levels");
  ConvergenceTable t;
  std::vector<Trajectory> runs;
  for (int j = 0; j < levels; ++j) {
    StepConfig cfg = problem.step;
    cfg.tau = problem.step.tau / std::ldexp(1.0, j);
    t.taus.push_back(cfg.tau);
    runs.push_back(run(problem.grid, problem.physics, cfg, problem.initial, problem.t_end));
    int its = 0;
    for (const StepReport& r : runs.back().reports) its += r.iterations;
    t.newton_iterations.push_back(its);
  }
  for (int j = 0; j + 1 < levels; ++j) {
    const TrajectoryDistance d = trajectory_distance(problem.grid, runs[j], runs[j + 1]);
    t.dist_E.push_back(d.E);
    t.dist_theta.push_back(d.theta);
    t.dist_v.push_back(d.v);
    t.dist_total.push_back(d.E + d.theta + d.v);
  }
  for (int j = 0; j + 2 < levels; ++j) {
    t.order_E.push_back(order(t.dist_E[j], t.dist_E[j + 1]));
    t.order_theta.push_back(order(t.dist_theta[j], t.dist_theta[j + 1]));
    t.order_v.push_back(order(t.dist_v[j], t.dist_v[j + 1]));
    t.order_total.push_back(order(t.dist_total[j], t.dist_total[j + 1]));
  }
  return t;
}

std::string format_convergence(const ConvergenceTable& t) {
  std::string out = "level,tau,newton_its,d_E,d_theta,d_v,d_total,order_E,order_theta,order_v,order_total\n";
  char buf[512];
  for (std::size_t j = 0; j < t.taus.size(); ++j) {
    auto val = [](const std::vector<double>& v, std::size_t i) {
      return i < v.size() ? v[i] : std::numeric_limits<double>::quiet_NaN();
    };
    std::snprintf(buf, sizeof buf, "%zu,%.6g,%d,%.6e,%.6e,%.6e,%.6e,%.4f,%.4f,%.4f,%.4f\n", j, t.taus[j],
                  t.newton_iterations[j], val(t.dist_E, j), val(t.dist_theta, j), val(t.dist_v, j),
                  val(t.dist_total, j), val(t.order_E, j), val(t.order_theta, j), val(t.order_v, j),
                  val(t.order_total, j));
    out += buf;
  }
  return out;
}

}  // namespace tve
