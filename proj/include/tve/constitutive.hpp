// Thermomechanical material laws for the split free energy
//
//   psi(E, theta) = phi(E) + theta * coupling(tr E) + gamma(theta)
//
// with isotropic stored energy phi(E) = Phi_v(tr E) + Phi_d(|dev E|^2), and
// everything derived from it: Cauchy stress, entropy, internal and thermal
// energy, Maxwell creep rate, the extended dissipation rate, and the heat
// conduction / boundary out-flux laws.
#pragma once

#include <array>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>

#include "tve/dual.hpp"
#include "tve/tensor.hpp"

namespace tve {

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A scalar function with its first two derivatives. Lifting to a jet uses
/// the next derivative, so a law evaluated as f on a jet needs df, and its
/// derivative evaluated on a jet needs d2f.
struct ScalarLaw {
  std::function<double(double)> f;
  std::function<double(double)> df;
  std::function<double(double)> d2f;

  static ScalarLaw constant(double c);
  static ScalarLaw linear(double slope);
  static ScalarLaw quadratic(double half_coeff);  // x -> half_coeff * x^2
};

inline double law_value(const ScalarLaw& l, double x) { return l.f(x); }
template <int N>
Jet<N> law_value(const ScalarLaw& l, const Jet<N>& x) { return x.chain(l.f(x.v), l.df(x.v)); }
inline double law_slope(const ScalarLaw& l, double x) { return l.df(x); }
template <int N>
Jet<N> law_slope(const ScalarLaw& l, const Jet<N>& x) { return x.chain(l.df(x.v), l.d2f(x.v)); }

/// Closed-form data for gamma(theta) = -c_v theta^(1+alpha) / (alpha (1+alpha)).
struct PowerLawHeat {
  double c_v = 1.0;
  double alpha = 1.0;
};

struct MaterialModel {
  ScalarLaw vol_energy;  // Phi_v(tr E)
  ScalarLaw dev_energy;  // Phi_d(|dev E|^2)
  ScalarLaw coupling;    // tr E -> coupling(tr E)
  ScalarLaw thermal;     // gamma(theta), gamma(0) = gamma'(0) = 0
  double alpha = 1.0;    // heat-capacity growth exponent, c(theta) ~ theta^alpha
  std::optional<PowerLawHeat> power_law;  // enables closed forms
};

/// Isotropic Stokes viscosity D e = 2 nu dev e + nu_b (tr e) I, the
/// multipolar hyper-viscosity mu |grad^2 v|^(p-2) grad^2 v, and Maxwell creep
/// with the quadratic potential 1/2 M(theta) |Pi|^2.
struct DissipationModel {
  double shear_viscosity = 0.0;
  double bulk_viscosity = 0.0;
  double hyper_mu = 0.0;
  double hyper_p = 4.0;
  ScalarLaw maxwell = ScalarLaw::constant(1.0);  // M(theta) > 0
  bool creep = true;
};

/// Faces in the order -x, +x, -y, +y, -z, +z.
enum class Face { XMinus = 0, XPlus, YMinus, YPlus, ZMinus, ZPlus };

struct HeatModel {
  double kappa0 = 1.0;  // kappa(theta) = kappa0 (1 + theta^beta)
  double beta = 0.0;
  double a1 = 0.0;  // h(theta) = a1 theta + a2 theta^4
  double a2 = 0.0;
  std::array<double, 6> h_ext{};  // prescribed external flux per face, >= 0
  double source = 0.0;            // bulk heat source r >= 0
};

/// Builtin material: linear creep in thermally expanding solids,
///   psi = 1/2 K (tr E)^2 + G |dev E|^2 - alpha_v K theta tr E
///         - c_v theta^(1+alpha) / (alpha (1+alpha)).
struct ThermoCreepMaterial {
  double bulk_modulus = 1.0;   // K [Pa]
  double shear_modulus = 1.0;  // G [Pa]
  double expansion = 0.0;      // alpha_v [1/K]
  double heat_capacity = 1.0;  // c_v
  double alpha = 1.0;
  double maxwell_modulus = 1.0;  // M0 [Pa s]
  double maxwell_activation = 0.0;  // theta*; 0 gives a constant M

  void validate() const;
  MaterialModel material() const;
  ScalarLaw maxwell_law() const;
};

/// Arrhenius-type Maxwell modulus M(theta) = M0 exp(theta_star / max(theta, floor)).
ScalarLaw arrhenius_maxwell(double m0, double theta_star, double theta_floor = 1e-6);

namespace detail {
template <class T>
void require_nonnegative_temperature(const T& theta, const char* where) {
  if (!(value(theta) >= 0.0)) throw DomainError(std::string(where) + ": temperature must be non-negative");
}
}  // namespace detail

// ---------------------------------------------------------------------------
// Stored energy

template <class T>
T stored_energy(const MaterialModel& m, const SymTensor3<T>& e) {
  const T s = norm2(dev(e).full());
  return law_value(m.vol_energy, trace(e)) + law_value(m.dev_energy, s);
}

/// phi'(E) = Phi_v'(tr E) I + 2 Phi_d'(|dev E|^2) dev E.
template <class T>
SymTensor3<T> stored_stress(const MaterialModel& m, const SymTensor3<T>& e) {
  const SymTensor3<T> de = dev(e).full();
  const T pv = law_slope(m.vol_energy, trace(e));
  SymTensor3<T> r = de * (2.0 * law_slope(m.dev_energy, norm2(de)));
  r.c[0] += pv;
  r.c[1] += pv;
  r.c[2] += pv;
  return r;
}

template <class T>
T free_energy(const MaterialModel& m, const SymTensor3<T>& e, const T& theta) {
  detail::require_nonnegative_temperature(theta, "free_energy");
  return stored_energy(m, e) + theta * law_value(m.coupling, trace(e)) + law_value(m.thermal, theta);
}

/// T(E, theta) = psi'_E + psi I = phi'(E) + (theta coupling'(tr E) + psi) I.
template <class T>
SymTensor3<T> cauchy_stress(const MaterialModel& m, const SymTensor3<T>& e, const T& theta) {
  SymTensor3<T> r = stored_stress(m, e);
  const T p = theta * law_slope(m.coupling, trace(e)) + free_energy(m, e, theta);
  r.c[0] += p;
  r.c[1] += p;
  r.c[2] += p;
  return r;
}

/// U(theta) = gamma(theta) - theta gamma'(theta).
template <class T>
T thermal_energy(const MaterialModel& m, const T& theta) {
  detail::require_nonnegative_temperature(theta, "thermal_energy");
  return law_value(m.thermal, theta) - theta * law_slope(m.thermal, theta);
}

template <class T>
T internal_energy(const MaterialModel& m, const SymTensor3<T>& e, const T& theta) {
  return stored_energy(m, e) + thermal_energy(m, theta);
}

/// eta = -psi'_theta = -coupling(tr E) - gamma'(theta).
template <class T>
T entropy(const MaterialModel& m, const SymTensor3<T>& e, const T& theta) {
  detail::require_nonnegative_temperature(theta, "entropy");
  return -law_value(m.coupling, trace(e)) - law_slope(m.thermal, theta);
}

/// c(theta) = U'(theta) = -theta gamma''(theta).
double heat_capacity(const MaterialModel& m, double theta);

/// Inverse of U; closed form for the power law, safeguarded Newton otherwise.
double thermal_energy_inverse(const MaterialModel& m, double u);

/// (theta coupling' + theta coupling + gamma(theta)) div v, the power exchanged
/// between the mechanical and thermal ledgers.
template <class T>
T adiabatic_coefficient(const MaterialModel& m, const SymTensor3<T>& e, const T& theta) {
  const T tr = trace(e);
  return theta * law_slope(m.coupling, tr) + theta * law_value(m.coupling, tr) + law_value(m.thermal, theta);
}

/// Adiabatic power; the coefficient is cross-checked against
/// 1/3 tr(T(E,theta) - T(E,0)) and a mismatch beyond 1e-10 relative throws.
double adiabatic_power(const MaterialModel& m, const Sym3d& e, double theta, double div_v);

// ---------------------------------------------------------------------------
// Dissipation

template <class T>
SymTensor3<T> stokes_stress(const DissipationModel& d, const SymTensor3<T>& strain_rate) {
  SymTensor3<T> r = dev(strain_rate).full() * (2.0 * d.shear_viscosity);
  const T b = trace(strain_rate) * d.bulk_viscosity;
  r.c[0] += b;
  r.c[1] += b;
  r.c[2] += b;
  return r;
}

/// R(E, theta) = dev T(E, theta) / M(theta) for the quadratic Maxwell potential.
template <class T>
DevTensor3<T> creep_rate(const MaterialModel& m, const DissipationModel& d, const SymTensor3<T>& e,
                         const T& theta) {
  detail::require_nonnegative_temperature(theta, "creep_rate");
  if (!d.creep) return DevTensor3<T>{};
  DevTensor3<T> r = dev(stored_stress(m, e));
  r *= 1.0 / law_value(d.maxwell, theta);
  return r;
}

/// [zeta_p]'_Pi(theta, Pi) = M(theta) Pi.
template <class T>
SymTensor3<T> maxwell_stress(const DissipationModel& d, const T& theta, const DevTensor3<T>& pi) {
  return pi.full() * law_value(d.maxwell, theta);
}

template <class T>
T hyper_norm_p(const DissipationModel& d, const ThirdOrderTensor<T>& h) {
  return pow(triple_contraction(h, h), 0.5 * d.hyper_p);
}

/// xi_ext = D e:e + [zeta_p]'(Pi):Pi + mu |H|^p.
template <class T>
T dissipation_rate(const DissipationModel& d, const T& theta, const SymTensor3<T>& strain_rate,
                   const DevTensor3<T>& pi, const ThirdOrderTensor<T>& h) {
  detail::require_nonnegative_temperature(theta, "dissipation_rate");
  T xi = ddot(stokes_stress(d, strain_rate), strain_rate);
  if (d.creep) xi += ddot(maxwell_stress(d, theta, pi), pi.full());
  if (d.hyper_mu > 0.0) xi += d.hyper_mu * hyper_norm_p(d, h);
  return xi;
}

// ---------------------------------------------------------------------------
// Heat

template <class T>
T conductivity(const HeatModel& hm, const T& theta) {
  detail::require_nonnegative_temperature(theta, "conductivity");
  return hm.kappa0 * (1.0 + pow(theta, hm.beta));
}

template <class T>
T boundary_outflux(const HeatModel& hm, const T& theta) {
  detail::require_nonnegative_temperature(theta, "boundary_outflux");
  const T t2 = theta * theta;
  return hm.a1 * theta + hm.a2 * t2 * t2;
}

/// eta_lambda(theta) = int_0^theta U'(s) / s^lambda ds.
double generalized_entropy(const MaterialModel& m, double theta, double lambda);

/// The same primitive expressed in the thermal energy u = U(theta).
double generalized_entropy_of_energy(const MaterialModel& m, double u, double lambda);

struct ExponentCheck {
  bool admissible = false;
  double mu_max = 0.0;  // integrability exponent of grad theta when admissible
  std::string reason;
};

/// Admissibility of (alpha, beta) for the lambda-entropy test:
///   1 + lambda > beta+ >= 2/3 alpha + lambda - 1/3,  alpha >= (3/2 lambda - 1)+,
/// with mu_max = (5 + 2 alpha + 3 beta+ - 3 lambda) / (4 + alpha).
ExponentCheck admissible_exponents(double alpha, double beta, double lambda);

/// Largest observed |T(E,theta)| / (1 + E(E,theta)) over random samples; the
/// growth assumption asks this to stay bounded. Used for warnings only.
double stress_energy_growth_ratio(const MaterialModel& m, int samples, unsigned seed);

}  // namespace tve
