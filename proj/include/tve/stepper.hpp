// Backward-Euler (Rothe) time stepping: Newton solve of the coupled residual
// per step, tau-halving on failure, and the Rothe interpolants.
#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Sparse>

#include "tve/diagnostics.hpp"
#include "tve/residual.hpp"
#include "tve/state.hpp"

namespace tve {

/// Flattened unknown vector; cell n occupies entries [11 n, 11 n + 11).
Eigen::VectorXd pack(const State& s);
void unpack(const Eigen::VectorXd& x, State& s);

Eigen::VectorXd residual_vector(const Grid& g, const Physics& ph, const StepConfig& cfg, double tau,
                                const State& prev, const State& cur);

/// Exact Jacobian of the residual by forward-mode differentiation. Cells are
/// coloured by index modulo 2R+1 in each active direction, R being the
/// residual stencil radius (2, or 1 with a prescribed velocity), so one
/// multi-lane pass per colour (a lane per unknown component) recovers every
/// column. Colour passes run on cfg.threads threads and are merged in a fixed
/// order.
Eigen::SparseMatrix<double> jacobian(const Grid& g, const Physics& ph, const StepConfig& cfg, double tau,
                                     const State& prev, const State& cur);

/// Central finite-difference Jacobian (dense); for verification only.
Eigen::MatrixXd jacobian_fd(const Grid& g, const Physics& ph, const StepConfig& cfg, double tau, const State& prev,
                            const State& cur, double h = 1e-6);

struct StepReport {
  bool converged = false;
  int iterations = 0;
  double residual_norm = 0.0;
  std::vector<double> residual_history;  // infinity norm before each update and at the end
  std::vector<double> step_lengths;      // accepted line-search factors
  int halvings = 0;                      // deepest tau-halving level used
  int substeps = 0;                      // accepted sub-steps
  double smallest_tau = 0.0;
  std::string failure;
};

/// Damped Newton from the guess in cur. On return cur holds the last iterate.
StepReport newton_step(const Grid& g, const Physics& ph, const StepConfig& cfg, double tau, const State& prev,
                       State& cur);

/// Called for every accepted sub-step.
using SubstepObserver = std::function<void(const State& prev, const State& cur, double tau)>;

class StepFailure : public std::runtime_error {
 public:
  StepFailure(const std::string& what, StepReport report) : std::runtime_error(what), report_(std::move(report)) {}
  const StepReport& report() const { return report_; }

 private:
  StepReport report_;
};

/// One global step of length tau from prev. Halves tau on failure, up to
/// cfg.halving_cap times, and sub-steps so that prev.t + tau is reached
/// exactly. Throws StepFailure when the cap is exceeded.
State advance(const Grid& g, const Physics& ph, const StepConfig& cfg, double tau, const State& prev,
              StepReport& report, const SubstepObserver& observer = {});

/// Accepted states at t_k = min(k tau, T) and the two Rothe interpolants.
class Trajectory {
 public:
  std::vector<State> states;
  std::vector<StepReport> reports;
  std::vector<LedgerRow> ledger;

  std::size_t size() const { return states.size(); }
  bool empty() const { return states.empty(); }
  /// Piecewise constant: the state at the right end of the interval holding t.
  State constant_at(double t) const;
  /// Piecewise affine interpolation between neighbouring levels.
  State affine_at(double t) const;

 private:
  std::size_t interval(double t) const;
};

Trajectory run(const Grid& g, const Physics& ph, const StepConfig& cfg, const State& initial, double t_end);

/// As run, but fills tr as steps are accepted, so a StepFailure leaves the
/// completed prefix in place.
void run_into(Trajectory& tr, const Grid& g, const Physics& ph, const StepConfig& cfg, const State& initial,
              double t_end);

/// Linear combination a x + b y, field by field.
State combine(double a, const State& x, double b, const State& y);

}  // namespace tve
