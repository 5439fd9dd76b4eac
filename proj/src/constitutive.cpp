#include "tve/constitutive.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace tve {

ScalarLaw ScalarLaw::constant(double c) {
  return {[c](double) { return c; }, [](double) { return 0.0; }, [](double) { return 0.0; }};
}

ScalarLaw ScalarLaw::linear(double slope) {
  return {[slope](double x) { return slope * x; }, [slope](double) { return slope; },
          [](double) { return 0.0; }};
}

ScalarLaw ScalarLaw::quadratic(double half_coeff) {
  return {[half_coeff](double x) { return half_coeff * x * x; },
          [half_coeff](double x) { return 2.0 * half_coeff * x; },
          [half_coeff](double) { return 2.0 * half_coeff; }};
}

void ThermoCreepMaterial::validate() const {
  if (!(bulk_modulus > 0.0)) throw DomainError("bulk modulus K must be positive");
  if (!(shear_modulus > 0.0)) throw DomainError("shear modulus G must be positive");
  if (!(heat_capacity > 0.0)) throw DomainError("heat-capacity coefficient c_v must be positive");
  if (!(alpha > 0.0)) throw DomainError("heat-capacity exponent alpha must be positive");
  if (!(maxwell_modulus > 0.0)) throw DomainError("Maxwell modulus M0 must be positive");
  if (!(maxwell_activation >= 0.0)) throw DomainError("Maxwell activation temperature must be non-negative");
}

MaterialModel ThermoCreepMaterial::material() const {
  validate();
  MaterialModel m;
  m.vol_energy = ScalarLaw::quadratic(0.5 * bulk_modulus);
  m.dev_energy = ScalarLaw::linear(shear_modulus);
  m.coupling = ScalarLaw::linear(-expansion * bulk_modulus);
  const double cv = heat_capacity;
  const double a = alpha;
  const double k = cv / (a * (1.0 + a));
  m.thermal = {[k, a](double t) { return -k * std::pow(t, 1.0 + a); },
               [cv, a](double t) { return -cv / a * std::pow(t, a); },
               [cv, a](double t) { return t == 0.0 ? (a < 1.0 ? -std::numeric_limits<double>::infinity()
                                                               : (a == 1.0 ? -cv : 0.0))
                                                   : -cv * std::pow(t, a - 1.0); }};
  m.alpha = a;
  m.power_law = PowerLawHeat{cv, a};
  return m;
}

ScalarLaw arrhenius_maxwell(double m0, double theta_star, double theta_floor) {
  if (theta_star == 0.0) return ScalarLaw::constant(m0);
  auto f = [=](double t) { return m0 * std::exp(theta_star / std::max(t, theta_floor)); };
  auto df = [=](double t) {
    if (t <= theta_floor) return 0.0;
    return -f(t) * theta_star / (t * t);
  };
  auto d2f = [=](double t) {
    if (t <= theta_floor) return 0.0;
    const double s = theta_star / (t * t);
    return f(t) * (s * s + 2.0 * theta_star / (t * t * t));
  };
  return {f, df, d2f};
}

ScalarLaw ThermoCreepMaterial::maxwell_law() const {
  return arrhenius_maxwell(maxwell_modulus, maxwell_activation);
}

double heat_capacity(const MaterialModel& m, double theta) {
  detail::require_nonnegative_temperature(theta, "heat_capacity");
  if (m.power_law) return m.power_law->c_v * std::pow(theta, m.power_law->alpha);
  return -theta * m.thermal.d2f(theta);
}

double thermal_energy_inverse(const MaterialModel& m, double u) {
  if (!(u >= 0.0)) throw DomainError("thermal_energy_inverse: thermal energy must be non-negative");
  if (u == 0.0) return 0.0;
  if (m.power_law) {
    const double a = m.power_law->alpha;
    return std::pow((1.0 + a) * u / m.power_law->c_v, 1.0 / (1.0 + a));
  }
  // U is increasing with U(0) = 0: bracket, then Newton safeguarded by bisection.
  double lo = 0.0;
  double hi = 1.0;
  while (thermal_energy(m, hi) < u) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e300) throw DomainError("thermal_energy_inverse: no bracket found");
  }
  double t = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    const double g = thermal_energy(m, t) - u;
    if (g > 0.0) hi = t; else lo = t;
    const double c = -t * m.thermal.d2f(t);
    double next = c > 0.0 ? t - g / c : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::fabs(next - t) <= 1e-14 * std::max(1.0, t)) return next;
    t = next;
  }
  return t;
}

double adiabatic_power(const MaterialModel& m, const Sym3d& e, double theta, double div_v) {
  detail::require_nonnegative_temperature(theta, "adiabatic_power");
  const double coef = adiabatic_coefficient(m, e, theta);
  const double via_stress = trace(cauchy_stress(m, e, theta) - cauchy_stress(m, e, 0.0)) / 3.0;
  const double scale = std::max({std::fabs(coef), std::fabs(via_stress), 1e-300});
  if (std::fabs(coef - via_stress) > 1e-10 * scale) {
    std::ostringstream os;
    os << "adiabatic_power: coefficient " << coef << " disagrees with stress difference " << via_stress;
    throw std::logic_error(os.str());
  }
  return coef * div_v;
}

namespace {

double simpson(const std::function<double(double)>& f, double a, double b, double fa, double fm,
               double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::fabs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double rel_tol) {
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  // A coarse pass fixes the scale for the relative tolerance.
  const double coarse = simpson(f, a, b, fa, fm, fb, whole, 1e-3 * std::fabs(whole), 8);
  return simpson(f, a, b, fa, fm, fb, whole, rel_tol * std::max(std::fabs(coarse), 1e-300), 50);
}

}  // namespace

double generalized_entropy(const MaterialModel& m, double theta, double lambda) {
  detail::require_nonnegative_temperature(theta, "generalized_entropy");
  if (!(lambda >= 0.0) || !(lambda < 1.0 + m.alpha))
    throw DomainError("generalized_entropy: lambda must lie in [0, 1 + alpha)");
  if (theta == 0.0) return 0.0;
  if (m.power_law) {
    const double e = 1.0 + m.power_law->alpha - lambda;
    return m.power_law->c_v * std::pow(theta, e) / e;
  }
  // s -> theta s^q turns the s^(alpha - lambda) endpoint behaviour into a
  // smooth integrand.
  const double q = 2.0 / (1.0 + m.alpha - lambda);
  auto integrand = [&](double s) {
    if (s == 0.0) return 0.0;
    const double t = theta * std::pow(s, q);
    const double c = -t * m.thermal.d2f(t);
    return c / std::pow(t, lambda) * theta * q * std::pow(s, q - 1.0);
  };
  return adaptive_simpson(integrand, 0.0, 1.0, 1e-10);
}

double generalized_entropy_of_energy(const MaterialModel& m, double u, double lambda) {
  if (!(u >= 0.0)) throw DomainError("generalized_entropy_of_energy: thermal energy must be non-negative");
  if (m.power_law) {
    if (!(lambda >= 0.0) || !(lambda < 1.0 + m.alpha))
      throw DomainError("generalized_entropy_of_energy: lambda must lie in [0, 1 + alpha)");
    const double a = m.power_law->alpha;
    const double cv = m.power_law->c_v;
    return (1.0 + a) / (1.0 + a - lambda) * std::pow((1.0 + a) * u / cv, 1.0 - lambda / (1.0 + a)) *
           cv / (1.0 + a);
  }
  return generalized_entropy(m, thermal_energy_inverse(m, u), lambda);
}

ExponentCheck admissible_exponents(double alpha, double beta, double lambda) {
  ExponentCheck r;
  if (!(lambda > 0.0 && lambda < 2.0)) {
    r.reason = "lambda must lie in (0, 2)";
    return r;
  }
  if (!(alpha >= 0.0)) {
    r.reason = "alpha must be non-negative";
    return r;
  }
  const double bp = std::max(beta, 0.0);
  if (!(1.0 + lambda > bp)) {
    r.reason = "conductivity growth too fast: need beta+ < 1 + lambda";
    return r;
  }
  if (!(bp >= 2.0 / 3.0 * alpha + lambda - 1.0 / 3.0)) {
    r.reason = "conductivity growth too slow: need beta+ >= 2/3 alpha + lambda - 1/3";
    return r;
  }
  if (!(alpha >= std::max(1.5 * lambda - 1.0, 0.0))) {
    r.reason = "heat-capacity exponent too small: need alpha >= (3/2 lambda - 1)+";
    return r;
  }
  r.admissible = true;
  r.mu_max = (5.0 + 2.0 * alpha + 3.0 * bp - 3.0 * lambda) / (4.0 + alpha);
  return r;
}

double stress_energy_growth_ratio(const MaterialModel& m, int samples, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> ue(-1.0, 1.0);
  std::uniform_real_distribution<double> ut(0.0, 10.0);
  double worst = 0.0;
  for (int n = 0; n < samples; ++n) {
    Sym3d e;
    for (auto& c : e.c) c = ue(rng);
    const double th = ut(rng);
    const double t = norm(cauchy_stress(m, e, th));
    const double en = internal_energy(m, e, th);
    worst = std::max(worst, t / (1.0 + std::fabs(en)));
  }
  return worst;
}

}  // namespace tve
