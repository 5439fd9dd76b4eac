// Residual of one backward-Euler step for the unknowns (rho, v, E, theta).
//
// Row blocks, each in rate form (divided by nothing further):
//   mass      (rho - rho')/tau + div p
//   momentum  (p - p')/tau + div(p (x) v) - div(T + D e(v)) + hyperstress - rho g
//   strain    (E - E')/tau - e(v) + R(E, theta) + (v.grad)E + E W - W E
//   heat      (U(theta) - U')/tau + div(U v) - div(kappa grad theta) - boundary
//             - xi - adiabatic - r
// Primes denote the previous level; p = rho v, W = skw(grad v).
#pragma once

#include <cmath>
#include <string>

#include "tve/constitutive.hpp"
#include "tve/grid.hpp"
#include "tve/state.hpp"

namespace tve {

template <class T>
struct ResidualT {
  Field<T> mass;
  Field<Vec3<T>> momentum;
  Field<SymTensor3<T>> strain;
  Field<T> heat;
};

/// Component s of the residual at cell n, in unknown order.
template <class T>
const T& component(const ResidualT<T>& r, std::size_t n, int s) {
  if (s == 0) return r.mass[n];
  if (s <= 3) return r.momentum[n][s - 1];
  if (s <= 9) return r.strain[n].c[s - 4];
  return r.heat[n];
}

template <class T>
T& component(StateT<T>& x, std::size_t n, int s) {
  if (s == 0) return x.rho[n];
  if (s <= 3) return x.v[n][s - 1];
  if (s <= 9) return x.E[n].c[s - 4];
  return x.theta[n];
}

template <class T>
const T& component(const StateT<T>& x, std::size_t n, int s) {
  return component(const_cast<StateT<T>&>(x), n, s);
}

namespace detail {

/// -div(|grad f|^(q-2) grad f) with one-sided face gradients and no flux
/// through the boundary. V is a scalar or a symmetric tensor.
template <class V, class T>
Field<V> neg_q_laplacian(const Grid& g, const Field<V>& f, double q) {
  Field<V> r(g);
  for (int d = 0; d < 3; ++d) {
    if (!g.active(d)) continue;
    const double inv_h = 1.0 / g.h(d);
    for (std::size_t n = 0; n < g.size(); ++n) {
      const CellIndex c = g.cell(n);
      if (c[d] + 1 >= g.n(d)) continue;
      const std::size_t m = g.index(c.shifted(d, 1));
      V grad = f[m];
      grad -= f[n];
      grad *= inv_h;
      T mag2;
      if constexpr (std::is_same_v<V, T>) {
        mag2 = grad * grad;
      } else {
        mag2 = ddot(grad, grad);
      }
      V flux = grad;
      flux *= pow(mag2, 0.5 * (q - 2.0));
      flux *= inv_h;
      r[n] -= flux;
      r[m] += flux;
    }
  }
  return r;
}

}  // namespace detail

/// Throws EvaluationError when density or temperature is not positive.
template <class T>
void require_admissible(const StateT<T>& x) {
  for (std::size_t n = 0; n < x.rho.size(); ++n) {
    if (!(value(x.rho[n]) > 0.0))
      throw EvaluationError("non-positive density in cell " + std::to_string(n));
    if (!(value(x.theta[n]) > 0.0))
      throw EvaluationError("non-positive temperature in cell " + std::to_string(n));
  }
}

template <class T>
ResidualT<T> assemble_residual(const Grid& g, const Physics& ph, const StepConfig& cfg, double tau,
                               const State& prev, const StateT<T>& cur) {
  require_admissible(cur);
  const std::size_t N = g.size();
  const MaterialModel& mat = ph.material;
  const DissipationModel& dis = ph.dissipation;
  const double inv_tau = 1.0 / tau;

  ResidualT<T> r{Field<T>(g), Field<Vec3<T>>(g), Field<SymTensor3<T>>(g), Field<T>(g)};

  const bool kinematic = static_cast<bool>(ph.prescribed_velocity);
  const Field<Vec3<T>> p = momentum(cur);
  Field<Tensor3<T>> grad_v(g);
  Field<SymTensor3<T>> stress(g);
  Field<T> u(g), kappa(g);
  Field<Vec3<T>> uv(g);
  for (std::size_t n = 0; n < N; ++n) {
    grad_v[n] = velocity_gradient_at(g, cur.v, g.cell(n));
    if (!kinematic) stress[n] = cauchy_stress(mat, cur.E[n], cur.theta[n]) + stokes_stress(dis, sym(grad_v[n]));
    u[n] = thermal_energy(mat, cur.theta[n]);
    uv[n] = cur.v[n] * u[n];
    kappa[n] = conductivity(ph.heat, cur.theta[n]);
  }

  // Mass.
  const Field<T> div_p = conservative_div_flux(g, p);
  for (std::size_t n = 0; n < N; ++n) r.mass[n] = (cur.rho[n] - prev.rho[n]) * inv_tau + div_p[n];
  if (cfg.delta > 0.0) {
    const Field<T> lap = detail::neg_q_laplacian<T, T>(g, cur.rho, cfg.rho_exponent);
    for (std::size_t n = 0; n < N; ++n) r.mass[n] += lap[n] * (cfg.delta * inv_tau);
  }

  // Momentum.
  if (kinematic) {
    for (std::size_t n = 0; n < N; ++n) {
      const Vec3d target = ph.prescribed_velocity(g.center(n), cur.t);
      for (int i = 0; i < 3; ++i) r.momentum[n][i] = cur.v[n][i] - target[i];
    }
  } else {
    const Field<Vec3<T>> hyper = hyperstress_residual(g, cur.v, dis.hyper_mu, dis.hyper_p);
    for (std::size_t n = 0; n < N; ++n) {
      const CellIndex c = g.cell(n);
      Vec3<T> m = p[n];
      for (int i = 0; i < 3; ++i) m[i] -= prev.rho[n] * prev.v[n][i];
      m *= inv_tau;
      m += momentum_transport_at(g, p, cur.v, c);
      m -= divergence_tensor_at(g, stress, c);
      m += hyper[n];
      for (int i = 0; i < 3; ++i) m[i] -= cur.rho[n] * ph.gravity[i];
      if (cfg.epsilon > 0.0) {
        Vec3<T> damp = cur.v[n];
        damp *= pow(dot(cur.v[n], cur.v[n]), 0.5 * (dis.hyper_p - 2.0)) * (cfg.epsilon * inv_tau);
        m += damp;
      }
      if (cfg.delta > 0.0) {
        const Vec3<T> gr = gradient_at(g, cur.rho, c);
        Vec3<T> comp = matvec(grad_v[n], gr);
        comp *= pow(dot(gr, gr), 0.5 * (cfg.rho_exponent - 2.0)) * (cfg.delta * inv_tau);
        m += comp;
      }
      r.momentum[n] = m;
    }
  }

  // Strain.
  for (std::size_t n = 0; n < N; ++n) {
    const CellIndex c = g.cell(n);
    SymTensor3<T> s = cur.E[n] - SymTensor3<T>::from(prev.E[n]);
    s *= inv_tau;
    s -= sym(grad_v[n]);
    s += creep_rate(mat, dis, cur.E[n], cur.theta[n]).full();
    s += advect_at(g, cur.v, cur.E, c, cfg.advection);
    s += jaumann_spin_term(skw(grad_v[n]), cur.E[n]);
    r.strain[n] = s;
  }
  if (cfg.epsilon > 0.0) {
    const Field<SymTensor3<T>> lap = detail::neg_q_laplacian<SymTensor3<T>, T>(g, cur.E, cfg.strain_exponent);
    for (std::size_t n = 0; n < N; ++n) {
      SymTensor3<T> l = lap[n];
      l *= cfg.epsilon * inv_tau;
      r.strain[n] += l;
    }
  }

  // Heat.
  const Field<T> div_uv = conservative_div_flux(g, uv);
  const Field<T> cond = conduction(g, cur.theta, kappa);
  const Field<T> robin = robin_heat_flux(g, cur.theta, ph.heat, cur.t);
  for (std::size_t n = 0; n < N; ++n) {
    const CellIndex c = g.cell(n);
    const SymTensor3<T> e = sym(grad_v[n]);
    const DevTensor3<T> pi = creep_rate(mat, dis, cur.E[n], cur.theta[n]);
    const ThirdOrderTensor<T> h = dis.hyper_mu > 0.0 ? second_gradient_at(g, cur.v, c) : ThirdOrderTensor<T>{};
    const T xi = dissipation_rate(dis, cur.theta[n], e, pi, h);
    const T adiab = adiabatic_coefficient(mat, cur.E[n], cur.theta[n]) * trace(grad_v[n]);
    const double u_prev = thermal_energy(mat, prev.theta[n]);
    r.heat[n] = (u[n] - u_prev) * inv_tau + div_uv[n] - cond[n] - robin[n] - xi - adiab - ph.heat.source;
  }
  return r;
}

}  // namespace tve
