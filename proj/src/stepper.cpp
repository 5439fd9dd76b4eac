#include "tve/stepper.hpp"

#include <Eigen/SparseLU>
#ifdef TVE_HAVE_UMFPACK
#include <Eigen/UmfPackSupport>
#endif
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <thread>

namespace tve {

namespace {

using Lane = Jet<kComponents>;

StateT<Lane> lift(const State& s) {
  StateT<Lane> x;
  x.rho = Field<Lane>(s.rho.size());
  x.v = Field<Vec3<Lane>>(s.v.size());
  x.E = Field<SymTensor3<Lane>>(s.E.size());
  x.theta = Field<Lane>(s.theta.size());
  for (std::size_t n = 0; n < s.rho.size(); ++n) {
    x.rho[n] = s.rho[n];
    for (int i = 0; i < 3; ++i) x.v[n][i] = s.v[n][i];
    x.E[n] = SymTensor3<Lane>::from(s.E[n]);
    x.theta[n] = s.theta[n];
  }
  x.t = s.t;
  return x;
}

/// Reach of the residual stencil in cells. The stress divergence of the
/// momentum block is the only radius-2 coupling; with a prescribed velocity
/// everything else is nearest-neighbour.
int stencil_radius(const Physics& ph) { return ph.prescribed_velocity ? 1 : 2; }

int colour_period(const Grid& g, int d, int radius) { return g.active(d) ? std::min(2 * radius + 1, g.n(d)) : 1; }

/// The unique coordinate within the stencil radius of m carrying the given colour.
int source_coord(int m, int colour, int period, int n, int radius) {
  if (period == 1) return 0;
  for (int x = std::max(0, m - radius); x <= std::min(n - 1, m + radius); ++x)
    if (x % period == colour) return x;
  return -1;
}

template <class T>
Eigen::VectorXd flatten(const ResidualT<T>& r) {
  const std::size_t N = r.mass.size();
  Eigen::VectorXd out(static_cast<Eigen::Index>(N * kComponents));
  for (std::size_t n = 0; n < N; ++n)
    for (int s = 0; s < kComponents; ++s) out[static_cast<Eigen::Index>(n * kComponents + s)] = value(component(r, n, s));
  return out;
}

double inf_norm(const Eigen::VectorXd& v) { return v.size() ? v.lpNorm<Eigen::Infinity>() : 0.0; }

struct BlockSolveResult {
  bool ok = false;
  Eigen::VectorXd dx;
  std::string failure;
};

/// Solves J_bb dx_b = -r_b for the unknowns selected by mask (all when empty).
BlockSolveResult solve_block(const Eigen::SparseMatrix<double>& J, const Eigen::VectorXd& r,
                             const std::vector<int>& block_of_unknown, int block) {
  BlockSolveResult out;
  const Eigen::Index n = r.size();
  std::vector<Eigen::Index> map(static_cast<std::size_t>(n), -1);
  Eigen::Index m = 0;
  for (Eigen::Index i = 0; i < n; ++i)
    if (block < 0 || block_of_unknown[static_cast<std::size_t>(i)] == block) map[static_cast<std::size_t>(i)] = m++;
  Eigen::SparseMatrix<double> A;
  Eigen::VectorXd b(m);
  if (block < 0) {
    A = J;
    b = -r;
  } else {
    std::vector<Eigen::Triplet<double>> trip;
    for (int k = 0; k < J.outerSize(); ++k)
      for (Eigen::SparseMatrix<double>::InnerIterator it(J, k); it; ++it) {
        const Eigen::Index ri = map[static_cast<std::size_t>(it.row())];
        const Eigen::Index ci = map[static_cast<std::size_t>(it.col())];
        if (ri >= 0 && ci >= 0) trip.emplace_back(ri, ci, it.value());
      }
    A.resize(m, m);
    A.setFromTriplets(trip.begin(), trip.end());
    for (Eigen::Index i = 0; i < n; ++i)
      if (map[static_cast<std::size_t>(i)] >= 0) b[map[static_cast<std::size_t>(i)]] = -r[i];
  }
  A.makeCompressed();
#ifdef TVE_HAVE_UMFPACK
  Eigen::UmfPackLU<Eigen::SparseMatrix<double>> lu;
#else
  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
#endif
  lu.compute(A);
  if (lu.info() != Eigen::Success) {
    out.failure = "singular Jacobian";
    return out;
  }
  const Eigen::VectorXd y = lu.solve(b);
  if (lu.info() != Eigen::Success || !y.allFinite()) {
    out.failure = "linear solve failed";
    return out;
  }
  out.dx = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i)
    if (map[static_cast<std::size_t>(i)] >= 0) out.dx[i] = y[map[static_cast<std::size_t>(i)]];
  out.ok = true;
  return out;
}

/// Unknown blocks of the staggered sweep: density, mechanics (v, E), temperature.
std::vector<int> staggered_blocks(std::size_t cells) {
  std::vector<int> b(cells * kComponents);
  for (std::size_t n = 0; n < cells; ++n)
    for (int s = 0; s < kComponents; ++s) b[n * kComponents + s] = s == 0 ? 0 : (s == kComponents - 1 ? 2 : 1);
  return b;
}

}  // namespace

Eigen::VectorXd pack(const State& s) {
  const std::size_t N = s.rho.size();
  Eigen::VectorXd x(static_cast<Eigen::Index>(N * kComponents));
  for (std::size_t n = 0; n < N; ++n)
    for (int q = 0; q < kComponents; ++q) x[static_cast<Eigen::Index>(n * kComponents + q)] = component(s, n, q);
  return x;
}

void unpack(const Eigen::VectorXd& x, State& s) {
  const std::size_t N = s.rho.size();
  if (static_cast<std::size_t>(x.size()) != N * kComponents) throw std::invalid_argument("unpack: size mismatch");
  for (std::size_t n = 0; n < N; ++n)
    for (int q = 0; q < kComponents; ++q) component(s, n, q) = x[static_cast<Eigen::Index>(n * kComponents + q)];
}

Eigen::VectorXd residual_vector(const Grid& g, const Physics& ph, const StepConfig& cfg, double tau,
                                const State& prev, const State& cur) {
  return flatten(assemble_residual(g, ph, cfg, tau, prev, cur));
}

Eigen::SparseMatrix<double> jacobian(const Grid& g, const Physics& ph, const StepConfig& cfg, double tau,
                                     const State& prev, const State& cur) {
  const int radius = stencil_radius(ph);
  const int P0 = colour_period(g, 0, radius), P1 = colour_period(g, 1, radius), P2 = colour_period(g, 2, radius);
  const int colours = P0 * P1 * P2;
  const int passes = colours;
  const StateT<Lane> base = lift(cur);
  std::vector<std::vector<Eigen::Triplet<double>>> out(static_cast<std::size_t>(passes));

  // One pass per colour; lane q of the jet carries the derivative with
  // respect to component q of every cell of that colour.
  auto work = [&](int colour) {
    const int c0 = colour % P0, c1 = (colour / P0) % P1, c2 = colour / (P0 * P1);
    StateT<Lane> x = base;
    for (std::size_t n = 0; n < g.size(); ++n) {
      const CellIndex c = g.cell(n);
      if (c.i % P0 == c0 && c.j % P1 == c1 && c.k % P2 == c2)
        for (int q = 0; q < kComponents; ++q) component(x, n, q).d[q] = 1.0;
    }
    const ResidualT<Lane> R = assemble_residual(g, ph, cfg, tau, prev, x);
    auto& trip = out[static_cast<std::size_t>(colour)];
    for (std::size_t m = 0; m < g.size(); ++m) {
      const CellIndex cm = g.cell(m);
      const int si = source_coord(cm.i, c0, P0, g.n(0),radius);
      const int sj = source_coord(cm.j, c1, P1, g.n(1),radius);
      const int sk = source_coord(cm.k, c2, P2, g.n(2),radius);
      for (int s = 0; s < kComponents; ++s) {
        const Lane& rs = component(R, m, s);
        for (int q = 0; q < kComponents; ++q) {
          const double d = rs.d[q];
          if (d == 0.0) continue;
          if (si < 0 || sj < 0 || sk < 0) throw std::logic_error("jacobian: residual stencil wider than colouring");
          const std::size_t src = g.index(si, sj, sk);
          trip.emplace_back(static_cast<int>(m * kComponents + s), static_cast<int>(src * kComponents + q), d);
        }
      }
    }
  };

  const int nthreads = std::max(1, std::min(cfg.threads, passes));
  if (nthreads == 1) {
    for (int p = 0; p < passes; ++p) work(p);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(nthreads));
    for (int t = 0; t < nthreads; ++t)
      pool.emplace_back([&, t] {
        try {
          for (int p = t; p < passes; p += nthreads) work(p);
        } catch (...) {
          errors[static_cast<std::size_t>(t)] = std::current_exception();
        }
      });
    for (auto& th : pool) th.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  std::vector<Eigen::Triplet<double>> all;
  for (auto& v : out) all.insert(all.end(), v.begin(), v.end());
  const int n = static_cast<int>(g.size() * kComponents);
  Eigen::SparseMatrix<double> J(n, n);
  J.setFromTriplets(all.begin(), all.end());
  return J;
}

Eigen::MatrixXd jacobian_fd(const Grid& g, const Physics& ph, const StepConfig& cfg, double tau, const State& prev,
                            const State& cur, double h) {
  const Eigen::VectorXd x0 = pack(cur);
  const Eigen::Index n = x0.size();
  Eigen::MatrixXd J(n, n);
  State trial = cur;
  for (Eigen::Index j = 0; j < n; ++j) {
    const double hj = h * std::max(1.0, std::fabs(x0[j]));
    Eigen::VectorXd x = x0;
    x[j] = x0[j] + hj;
    unpack(x, trial);
    const Eigen::VectorXd rp = residual_vector(g, ph, cfg, tau, prev, trial);
    x[j] = x0[j] - hj;
    unpack(x, trial);
    const Eigen::VectorXd rm = residual_vector(g, ph, cfg, tau, prev, trial);
    J.col(j) = (rp - rm) / (2.0 * hj);
  }
  return J;
}

StepReport newton_step(const Grid& g, const Physics& ph, const StepConfig& cfg, double tau, const State& prev,
                       State& cur) {
  StepReport rep;
  Eigen::VectorXd r;
  try {
    r = residual_vector(g, ph, cfg, tau, prev, cur);
  } catch (const EvaluationError& e) {
    rep.failure = e.what();
    return rep;
  }
  double nr = inf_norm(r);
  rep.residual_history.push_back(nr);
  const bool staggered = cfg.mode == SolverMode::Staggered;
  const std::vector<int> blocks = staggered ? staggered_blocks(g.size()) : std::vector<int>{};

  for (int it = 0;; ++it) {
    rep.residual_norm = nr;
    if (!std::isfinite(nr)) {
      rep.failure = "non-finite residual";
      return rep;
    }
    if (nr <= cfg.newton_tol) {
      rep.converged = true;
      return rep;
    }
    if (it >= cfg.max_newton) {
      char buf[128];
      std::snprintf(buf, sizeof buf, "no convergence in %d Newton iterations (residual %.3e)", it, nr);
      rep.failure = buf;
      return rep;
    }
    const int nblocks = staggered ? 3 : 1;
    for (int b = 0; b < nblocks; ++b) {
      const int block = staggered ? b : -1;
      const Eigen::SparseMatrix<double> J = jacobian(g, ph, cfg, tau, prev, cur);
      const BlockSolveResult sol = solve_block(J, r, blocks, block);
      if (!sol.ok) {
        rep.failure = sol.failure;
        return rep;
      }
      auto merit = [&](const Eigen::VectorXd& res) {
        if (block < 0) return inf_norm(res);
        double m = 0.0;
        for (Eigen::Index i = 0; i < res.size(); ++i)
          if (blocks[static_cast<std::size_t>(i)] == block) m = std::max(m, std::fabs(res[i]));
        return m;
      };
      const double m0 = merit(r);
      const Eigen::VectorXd x = pack(cur);
      double alpha = 1.0;
      bool accepted = false;
      State trial = cur;
      for (int ls = 0; ls < 30; ++ls, alpha *= 0.5) {
        unpack(x + alpha * sol.dx, trial);
        try {
          Eigen::VectorXd rt = residual_vector(g, ph, cfg, tau, prev, trial);
          const double mt = merit(rt);
          if (std::isfinite(mt) && (mt < (1.0 - 1e-4 * alpha) * m0 || inf_norm(rt) <= cfg.newton_tol)) {
            cur = trial;
            r = std::move(rt);
            accepted = true;
            break;
          }
        } catch (const EvaluationError&) {
          // Backtrack into the admissible set.
        }
      }
      if (!accepted) {
        if (staggered && m0 <= cfg.newton_tol) continue;
        rep.failure = "line search failed";
        return rep;
      }
      rep.step_lengths.push_back(alpha);
    }
    ++rep.iterations;
    nr = inf_norm(r);
    rep.residual_history.push_back(nr);
  }
}

State advance(const Grid& g, const Physics& ph, const StepConfig& cfg, double tau, const State& prev,
              StepReport& report, const SubstepObserver& observer) {
  report = StepReport{};
  report.smallest_tau = tau;
  std::function<State(const State&, double, int)> attempt = [&](const State& from, double t_target,
                                                                int depth) -> State {
    const double dt = t_target - from.t;
    State guess = from;
    guess.t = t_target;
    const StepReport r = newton_step(g, ph, cfg, dt, from, guess);
    report.iterations += r.iterations;
    report.residual_history.insert(report.residual_history.end(), r.residual_history.begin(),
                                   r.residual_history.end());
    report.step_lengths.insert(report.step_lengths.end(), r.step_lengths.begin(), r.step_lengths.end());
    if (r.converged) {
      ++report.substeps;
      report.residual_norm = r.residual_norm;
      report.smallest_tau = std::min(report.smallest_tau, dt);
      if (observer) observer(from, guess, dt);
      return guess;
    }
    if (depth >= cfg.halving_cap) {
      report.failure = r.failure;
      char buf[256];
      std::snprintf(buf, sizeof buf, "step from t=%.9g failed after %d tau-halvings (tau=%.3e): %s", from.t, depth,
                    dt, r.failure.c_str());
      throw StepFailure(buf, report);
    }
    report.halvings = std::max(report.halvings, depth + 1);
    const State mid = attempt(from, from.t + 0.5 * dt, depth + 1);
    return attempt(mid, t_target, depth + 1);
  };
  State out = attempt(prev, prev.t + tau, 0);
  report.converged = true;
  return out;
}

std::size_t Trajectory::interval(double t) const {
  if (states.size() < 2) return 0;
  if (t <= states.front().t) return 0;
  for (std::size_t k = 1; k < states.size(); ++k)
    if (t <= states[k].t) return k;
  return states.size() - 1;
}

State Trajectory::constant_at(double t) const {
  if (states.empty()) throw std::out_of_range("empty trajectory");
  return states[interval(t)];
}

State Trajectory::affine_at(double t) const {
  if (states.empty()) throw std::out_of_range("empty trajectory");
  const std::size_t k = interval(t);
  if (k == 0) return states.front();
  const State& a = states[k - 1];
  const State& b = states[k];
  const double s = std::clamp((t - a.t) / (b.t - a.t), 0.0, 1.0);
  if (s == 1.0) return b;
  if (s == 0.0) return a;
  State r = combine(1.0 - s, a, s, b);
  r.t = t;
  return r;
}

State combine(double a, const State& x, double b, const State& y) {
  State r = x;
  for (std::size_t n = 0; n < x.rho.size(); ++n) {
    r.rho[n] = a * x.rho[n] + b * y.rho[n];
    r.v[n] = x.v[n] * a + y.v[n] * b;
    r.E[n] = x.E[n] * a + y.E[n] * b;
    r.theta[n] = a * x.theta[n] + b * y.theta[n];
  }
  r.t = a * x.t + b * y.t;
  return r;
}

Trajectory run(const Grid& g, const Physics& ph, const StepConfig& cfg, const State& initial, double t_end) {
  Trajectory tr;
  run_into(tr, g, ph, cfg, initial, t_end);
  return tr;
}

void run_into(Trajectory& tr, const Grid& g, const Physics& ph, const StepConfig& cfg, const State& initial,
              double t_end) {
  cfg.validate();
  require_admissible(initial);
  tr = Trajectory{};
  tr.states.push_back(initial);
  LedgerBuilder ledger(g, ph, cfg);
  tr.ledger.push_back(ledger.initial(initial));
  const double span = t_end - initial.t;
  const long steps = span > 0.0 ? static_cast<long>(std::ceil(span / cfg.tau - 1e-9)) : 0;
  for (long k = 1; k <= steps; ++k) {
    const double t_k = k == steps ? t_end : initial.t + static_cast<double>(k) * cfg.tau;
    const State& prev = tr.states.back();
    StepReport rep;
    State next = advance(g, ph, cfg, t_k - prev.t, prev, rep,
                         [&](const State& a, const State& b, double dt) { ledger.substep(a, b, dt); });
    next.t = t_k;
    tr.states.push_back(std::move(next));
    tr.reports.push_back(rep);
    tr.ledger.push_back(ledger.finish_step(tr.states.back()));
  }
}

}  // namespace tve
