// Time-level state, physical problem data and step configuration.
#pragma once

#include <functional>
#include <optional>
#include <stdexcept>

#include "tve/constitutive.hpp"
#include "tve/grid.hpp"
#include "tve/tensor.hpp"

namespace tve {

/// One Rothe time level. Primal unknowns are (rho, v, E, theta); momentum
/// p = rho v and thermal energy u = U(theta) are derived.
template <class T>
struct StateT {
  Field<T> rho;
  Field<Vec3<T>> v;
  Field<SymTensor3<T>> E;
  Field<T> theta;
  double t = 0.0;

  StateT() = default;
  explicit StateT(const Grid& g)
      : rho(g, T(1.0)), v(g), E(g), theta(g, T(1.0)) {}

  friend bool operator==(const StateT&, const StateT&) = default;
};

using State = StateT<double>;

template <class T>
Field<Vec3<T>> momentum(const StateT<T>& s) {
  Field<Vec3<T>> p(s.v.size());
  for (std::size_t n = 0; n < s.v.size(); ++n) p[n] = s.v[n] * s.rho[n];
  return p;
}

/// Material, dissipation and heat laws plus loading.
struct Physics {
  MaterialModel material;
  DissipationModel dissipation;
  HeatModel heat;
  Vec3d gravity;
  /// When set, the momentum equation is replaced by v = prescribed(x, t)
  /// (kinematic mode; v = 0 freezes the mechanics).
  std::function<Vec3d(const Vec3d&, double)> prescribed_velocity;
};

enum class SolverMode { Monolithic, Staggered };

struct StepConfig {
  double tau = 0.1;
  double newton_tol = 1e-10;   // residual infinity norm
  int max_newton = 30;
  int halving_cap = 10;        // tau halvings per global step
  // Optional stabilizers (all off by default):
  //   rho:  -(delta/tau) div(|grad rho|^(r-2) grad rho)
  //   p:    +(eps/tau) |v|^(p-2) v + (delta/tau)|grad rho|^(r-2) (grad v) grad rho
  //   E:    -(eps/tau) div(|grad E|^(s-2) grad E)
  double delta = 0.0;
  double rho_exponent = 4.0;   // r
  double epsilon = 0.0;
  double strain_exponent = 4.0;  // s
  AdvectionMode advection = AdvectionMode::Central;
  SolverMode mode = SolverMode::Monolithic;
  double lambda = 1.0;         // exponent of the generalized-entropy ledger
  int threads = 1;

  void validate() const;
};

inline void StepConfig::validate() const {
  if (!(tau > 0.0)) throw std::invalid_argument("time step tau must be positive");
  if (!(newton_tol > 0.0)) throw std::invalid_argument("Newton tolerance must be positive");
  if (max_newton < 1) throw std::invalid_argument("max Newton iterations must be at least 1");
  if (halving_cap < 0) throw std::invalid_argument("halving cap must be non-negative");
  if (!(delta >= 0.0) || !(epsilon >= 0.0)) throw std::invalid_argument("stabilizer weights must be non-negative");
  if (delta > 0.0 && !(rho_exponent > 3.0)) throw std::invalid_argument("density stabilizer exponent r must exceed 3");
  if (epsilon > 0.0 && !(strain_exponent > 3.0))
    throw std::invalid_argument("strain stabilizer exponent s must exceed 3");
  if (threads < 1) throw std::invalid_argument("thread count must be at least 1");
}

/// Raised when a residual is evaluated at a state with non-positive density
/// or temperature; the Newton line search backtracks on it.
class EvaluationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Number of unknowns per cell: rho, v (3), E (6), theta.
inline constexpr int kComponents = 11;

}  // namespace tve
