// Structured box discretization with cell-centred collocated fields.
//
// Boundary handling is by mirror ghosts: reflecting across a face normal to
// direction d flips the sign of every vector component along d and of every
// tensor component with exactly one index equal to d. For the slip condition
// v.n = 0 this makes the face value of the normal velocity vanish, and it makes
// the central first difference skew-adjoint under the cell-volume inner
// product for every pair of fields of opposite parity (summation by parts).
//
// A direction with a single cell is inactive: fields are invariant along it,
// all derivatives along it vanish and its two faces are not part of the
// boundary.
#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

#include "tve/constitutive.hpp"
#include "tve/tensor.hpp"

namespace tve {

struct CellIndex {
  int i = 0, j = 0, k = 0;

  int operator[](int d) const { return d == 0 ? i : (d == 1 ? j : k); }
  int& operator[](int d) { return d == 0 ? i : (d == 1 ? j : k); }
  CellIndex shifted(int d, int by) const {
    CellIndex c = *this;
    c[d] += by;
    return c;
  }
};

class Grid {
 public:
  Grid() = default;
  /// Throws std::invalid_argument when an active direction has fewer than 4
  /// cells or a non-positive extent.
  Grid(std::array<double, 3> lengths, std::array<int, 3> cells);

  const std::array<double, 3>& lengths() const { return lengths_; }
  const std::array<int, 3>& counts() const { return n_; }
  const std::array<double, 3>& spacing() const { return h_; }
  double h(int d) const { return h_[d]; }
  int n(int d) const { return n_[d]; }
  bool active(int d) const { return n_[d] > 1; }
  std::size_t size() const { return static_cast<std::size_t>(n_[0]) * n_[1] * n_[2]; }
  double cell_volume() const { return h_[0] * h_[1] * h_[2]; }
  double face_area(int d) const { return cell_volume() / h_[d]; }
  double volume() const { return lengths_[0] * lengths_[1] * lengths_[2]; }

  std::size_t index(int i, int j, int k) const {
    return (static_cast<std::size_t>(k) * n_[1] + j) * n_[0] + i;
  }
  std::size_t index(const CellIndex& c) const { return index(c.i, c.j, c.k); }
  CellIndex cell(std::size_t idx) const {
    CellIndex c;
    c.i = static_cast<int>(idx % n_[0]);
    c.j = static_cast<int>((idx / n_[0]) % n_[1]);
    c.k = static_cast<int>(idx / (static_cast<std::size_t>(n_[0]) * n_[1]));
    return c;
  }
  Vec3d center(const CellIndex& c) const {
    return Vec3d{{(c.i + 0.5) * h_[0], (c.j + 0.5) * h_[1], (c.k + 0.5) * h_[2]}};
  }
  Vec3d center(std::size_t idx) const { return center(cell(idx)); }

  /// Folds a possibly out-of-range index back into the grid. The returned
  /// mask has bit d set when an odd number of reflections across faces normal
  /// to d occurred.
  std::size_t reflect(CellIndex c, unsigned& mask) const;

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  std::array<double, 3> lengths_{1.0, 1.0, 1.0};
  std::array<int, 3> n_{1, 1, 1};
  std::array<double, 3> h_{1.0, 1.0, 1.0};
};

template <class V>
class Field {
 public:
  Field() = default;
  explicit Field(const Grid& g, const V& fill = V{}) : data_(g.size(), fill) {}
  explicit Field(std::size_t n, const V& fill = V{}) : data_(n, fill) {}

  V& operator[](std::size_t i) { return data_[i]; }
  const V& operator[](std::size_t i) const { return data_[i]; }
  std::size_t size() const { return data_.size(); }
  auto begin() { return data_.begin(); }
  auto end() { return data_.end(); }
  auto begin() const { return data_.begin(); }
  auto end() const { return data_.end(); }
  std::vector<V>& values() { return data_; }
  const std::vector<V>& values() const { return data_; }

  friend bool operator==(const Field&, const Field&) = default;

 private:
  std::vector<V> data_;
};

struct BoundaryPatch {
  Face face = Face::XMinus;
  int direction = 0;
  Vec3d normal;
  std::vector<std::size_t> cells;
};

/// One patch per face of every active direction.
std::vector<BoundaryPatch> boundary_patches(const Grid& g);

// ---------------------------------------------------------------------------
// Mirror parity

template <class T>
T mirror(const T& x, unsigned) requires(is_scalar_v<T>) {
  return x;
}

template <class T>
Vec3<T> mirror(Vec3<T> v, unsigned mask) {
  for (int d = 0; d < 3; ++d)
    if (mask & (1u << d)) v[d] = -v[d];
  return v;
}

template <class T>
SymTensor3<T> mirror(SymTensor3<T> a, unsigned mask) {
  // Off-diagonal (i,j) flips once for each of i, j that is reflected.
  const bool f0 = mask & 1u, f1 = mask & 2u, f2 = mask & 4u;
  if (f1 != f2) a.c[3] = -a.c[3];
  if (f0 != f2) a.c[4] = -a.c[4];
  if (f0 != f1) a.c[5] = -a.c[5];
  return a;
}

template <class T>
Tensor3<T> mirror(Tensor3<T> a, unsigned mask) {
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const bool fi = mask & (1u << i), fj = mask & (1u << j);
      if (fi != fj) a(i, j) = -a(i, j);
    }
  return a;
}

/// Ghost-aware read.
template <class V>
V at(const Grid& g, const Field<V>& f, const CellIndex& c) {
  unsigned mask = 0;
  const std::size_t idx = g.reflect(c, mask);
  return mask ? mirror(f[idx], mask) : f[idx];
}

/// Central first difference along d of a ghost-aware expression fn(CellIndex).
template <class Fn>
auto central_diff(const Grid& g, int d, const CellIndex& c, Fn&& fn) {
  using R = decltype(fn(c));
  if (!g.active(d)) return R{};
  R r = fn(c.shifted(d, 1));
  r -= fn(c.shifted(d, -1));
  r *= 1.0 / (2.0 * g.h(d));
  return r;
}

// ---------------------------------------------------------------------------
// Pointwise differential operators (at one cell)

template <class T>
Vec3<T> gradient_at(const Grid& g, const Field<T>& f, const CellIndex& c) {
  Vec3<T> r;
  for (int d = 0; d < 3; ++d)
    r[d] = central_diff(g, d, c, [&](const CellIndex& n) { return at(g, f, n); });
  return r;
}

/// (grad v)_ij = d_j v_i.
template <class T>
Tensor3<T> velocity_gradient_at(const Grid& g, const Field<Vec3<T>>& v, const CellIndex& c) {
  Tensor3<T> r;
  for (int j = 0; j < 3; ++j) {
    const Vec3<T> dj = central_diff(g, j, c, [&](const CellIndex& n) { return at(g, v, n); });
    for (int i = 0; i < 3; ++i) r(i, j) = dj[i];
  }
  return r;
}

template <class T>
T divergence_at(const Grid& g, const Field<Vec3<T>>& v, const CellIndex& c) {
  T s{};
  for (int d = 0; d < 3; ++d)
    s += central_diff(g, d, c, [&](const CellIndex& n) { return at(g, v, n)[d]; });
  return s;
}

/// (div T)_i = d_j T_ij.
template <class T>
Vec3<T> divergence_tensor_at(const Grid& g, const Field<SymTensor3<T>>& t, const CellIndex& c) {
  Vec3<T> r;
  for (int j = 0; j < 3; ++j) {
    const SymTensor3<T> dj = central_diff(g, j, c, [&](const CellIndex& n) { return at(g, t, n); });
    for (int i = 0; i < 3; ++i) r[i] += dj(i, j);
  }
  return r;
}

/// H_ijk = d_j d_k v_i; compact three-point second differences on the
/// diagonal, central-central on mixed pairs.
template <class T>
ThirdOrderTensor<T> second_gradient_at(const Grid& g, const Field<Vec3<T>>& v, const CellIndex& c) {
  ThirdOrderTensor<T> h;
  const Vec3<T> vc = v[g.index(c)];
  for (int j = 0; j < 3; ++j) {
    if (!g.active(j)) continue;
    for (int k = j; k < 3; ++k) {
      if (!g.active(k)) continue;
      Vec3<T> s;
      if (j == k) {
        s = at(g, v, c.shifted(j, 1)) + at(g, v, c.shifted(j, -1)) - vc * 2.0;
        s *= 1.0 / (g.h(j) * g.h(j));
      } else {
        s = at(g, v, c.shifted(j, 1).shifted(k, 1)) - at(g, v, c.shifted(j, 1).shifted(k, -1)) -
            at(g, v, c.shifted(j, -1).shifted(k, 1)) + at(g, v, c.shifted(j, -1).shifted(k, -1));
        s *= 1.0 / (4.0 * g.h(j) * g.h(k));
      }
      for (int i = 0; i < 3; ++i) {
        h(i, j, k) = s[i];
        h(i, k, j) = s[i];
      }
    }
  }
  return h;
}

// ---------------------------------------------------------------------------
// Whole-field operators

template <class T>
Field<Vec3<T>> gradient(const Grid& g, const Field<T>& f) {
  Field<Vec3<T>> r(g);
  for (std::size_t n = 0; n < g.size(); ++n) r[n] = gradient_at(g, f, g.cell(n));
  return r;
}

template <class T>
Field<Tensor3<T>> velocity_gradient(const Grid& g, const Field<Vec3<T>>& v) {
  Field<Tensor3<T>> r(g);
  for (std::size_t n = 0; n < g.size(); ++n) r[n] = velocity_gradient_at(g, v, g.cell(n));
  return r;
}

template <class T>
Field<SymTensor3<T>> sym_gradient(const Grid& g, const Field<Vec3<T>>& v) {
  Field<SymTensor3<T>> r(g);
  for (std::size_t n = 0; n < g.size(); ++n) r[n] = sym(velocity_gradient_at(g, v, g.cell(n)));
  return r;
}

template <class T>
Field<T> divergence_v(const Grid& g, const Field<Vec3<T>>& v) {
  Field<T> r(g);
  for (std::size_t n = 0; n < g.size(); ++n) r[n] = divergence_at(g, v, g.cell(n));
  return r;
}

template <class T>
Field<Vec3<T>> divergence_t(const Grid& g, const Field<SymTensor3<T>>& t) {
  Field<Vec3<T>> r(g);
  for (std::size_t n = 0; n < g.size(); ++n) r[n] = divergence_tensor_at(g, t, g.cell(n));
  return r;
}

template <class T>
Field<ThirdOrderTensor<T>> second_gradient(const Grid& g, const Field<Vec3<T>>& v) {
  Field<ThirdOrderTensor<T>> r(g);
  for (std::size_t n = 0; n < g.size(); ++n) r[n] = second_gradient_at(g, v, g.cell(n));
  return r;
}

/// Flux-form divergence with face fluxes (p_L + p_R)/2 and zero normal flux
/// on the boundary, so the cell-volume weighted sum telescopes to zero.
template <class T>
Field<T> conservative_div_flux(const Grid& g, const Field<Vec3<T>>& p) {
  Field<T> r(g);
  for (int d = 0; d < 3; ++d) {
    if (!g.active(d)) continue;
    const double inv_h = 1.0 / g.h(d);
    for (std::size_t n = 0; n < g.size(); ++n) {
      const CellIndex c = g.cell(n);
      const T& pc = p[n][d];
      if (c[d] + 1 < g.n(d)) r[n] += 0.5 * (pc + p[g.index(c.shifted(d, 1))][d]) * inv_h;
      if (c[d] > 0) r[n] -= 0.5 * (pc + p[g.index(c.shifted(d, -1))][d]) * inv_h;
    }
  }
  return r;
}

enum class AdvectionMode { Central, Upwind };

/// (v.grad) f. Central mode uses the skew-symmetric split
///   1/2 [ (v.grad) f + div(v f) - f div v ],
/// upwind mode first-order one-sided differences chosen by the sign of v.
template <class T, class V>
V advect_at(const Grid& g, const Field<Vec3<T>>& v, const Field<V>& f, const CellIndex& c,
            AdvectionMode mode) {
  const std::size_t n = g.index(c);
  const Vec3<T>& vc = v[n];
  const V& fc = f[n];
  V r{};
  for (int d = 0; d < 3; ++d) {
    if (!g.active(d)) continue;
    if (mode == AdvectionMode::Upwind) {
      V df;
      if (value(vc[d]) >= 0.0) {
        df = fc;
        df -= at(g, f, c.shifted(d, -1));
      } else {
        df = at(g, f, c.shifted(d, 1));
        df -= fc;
      }
      df *= vc[d] / g.h(d);
      r += df;
      continue;
    }
    V grad_f = central_diff(g, d, c, [&](const CellIndex& m) { return at(g, f, m); });
    grad_f *= vc[d];
    V flux = central_diff(g, d, c, [&](const CellIndex& m) {
      V x = at(g, f, m);
      x *= at(g, v, m)[d];
      return x;
    });
    const T dv = central_diff(g, d, c, [&](const CellIndex& m) { return at(g, v, m)[d]; });
    V fdv = fc;
    fdv *= dv;
    grad_f += flux;
    grad_f -= fdv;
    grad_f *= 0.5;
    r += grad_f;
  }
  return r;
}

template <class T, class V>
Field<V> advect(const Grid& g, const Field<Vec3<T>>& v, const Field<V>& f,
                AdvectionMode mode = AdvectionMode::Central) {
  Field<V> r(g);
  for (std::size_t n = 0; n < g.size(); ++n) r[n] = advect_at(g, v, f, g.cell(n), mode);
  return r;
}

/// div(p (x) v) in the split form 1/2 div(p (x) v) + 1/2 [(p.grad) v + v div p],
/// which is what makes v . div(p (x) v) - 1/2 |v|^2 div p sum to zero.
template <class T>
Vec3<T> momentum_transport_at(const Grid& g, const Field<Vec3<T>>& p, const Field<Vec3<T>>& v,
                              const CellIndex& c) {
  const std::size_t n = g.index(c);
  Vec3<T> r;
  for (int d = 0; d < 3; ++d) {
    if (!g.active(d)) continue;
    const Vec3<T> flux = central_diff(g, d, c, [&](const CellIndex& m) {
      Vec3<T> x = at(g, v, m);
      x *= at(g, p, m)[d];
      return x;
    });
    Vec3<T> dv = central_diff(g, d, c, [&](const CellIndex& m) { return at(g, v, m); });
    dv *= p[n][d];
    const T dp = central_diff(g, d, c, [&](const CellIndex& m) { return at(g, p, m)[d]; });
    Vec3<T> vdp = v[n];
    vdp *= dp;
    Vec3<T> s = flux + dv + vdp;
    s *= 0.5;
    r += s;
  }
  return r;
}

/// Interior part of div(kappa grad theta) with face conductivity the mean of
/// the two adjacent cells; boundary faces carry no conductive flux here (the
/// Robin condition is added by robin_heat_flux).
template <class T>
Field<T> conduction(const Grid& g, const Field<T>& theta, const Field<T>& kappa) {
  Field<T> r(g);
  for (int d = 0; d < 3; ++d) {
    if (!g.active(d)) continue;
    const double w = 1.0 / (g.h(d) * g.h(d));
    for (std::size_t n = 0; n < g.size(); ++n) {
      const CellIndex c = g.cell(n);
      if (c[d] + 1 >= g.n(d)) continue;
      const std::size_t m = g.index(c.shifted(d, 1));
      const T flux = 0.5 * (kappa[n] + kappa[m]) * (theta[m] - theta[n]) * w;
      r[n] += flux;
      r[m] -= flux;
    }
  }
  return r;
}

/// Boundary heat input per unit volume, (h_ext - h(theta)) faceArea / cellVol
/// summed over the boundary faces of each cell.
template <class T>
Field<T> robin_heat_flux(const Grid& g, const Field<T>& theta, const HeatModel& hm, double t = 0.0) {
  (void)t;
  Field<T> r(g);
  for (const BoundaryPatch& bp : boundary_patches(g)) {
    const double w = g.face_area(bp.direction) / g.cell_volume();
    const double hext = hm.h_ext[static_cast<int>(bp.face)];
    for (std::size_t n : bp.cells) {
      if (!(value(theta[n]) >= 0.0)) throw DomainError("robin_heat_flux: negative boundary temperature");
      r[n] += (hext - boundary_outflux(hm, theta[n])) * w;
    }
  }
  return r;
}

/// Adjoint of the second-gradient stencil applied to the hyperstress
/// mu |H|^(p-2) H: the variational derivative of (mu/p) sum |H|^p vol, per
/// unit cell volume. Natural boundary conditions come out of the mirror
/// ghosts.
template <class T>
Field<Vec3<T>> hyperstress_residual(const Grid& g, const Field<Vec3<T>>& v, double mu, double p) {
  if (mu < 0.0) throw DomainError("hyperstress_residual: mu must be non-negative");
  Field<Vec3<T>> r(g);
  if (mu == 0.0) return r;
  auto scatter = [&](const CellIndex& target, int i, const T& w) {
    unsigned mask = 0;
    const std::size_t idx = g.reflect(target, mask);
    r[idx][i] += (mask & (1u << i)) ? -w : w;
  };
  for (std::size_t n = 0; n < g.size(); ++n) {
    const CellIndex c = g.cell(n);
    ThirdOrderTensor<T> h = second_gradient_at(g, v, c);
    const T s = triple_contraction(h, h);
    const T scale = mu * pow(s, 0.5 * (p - 2.0));
    h *= scale;
    for (int j = 0; j < 3; ++j) {
      if (!g.active(j)) continue;
      for (int k = 0; k < 3; ++k) {
        if (!g.active(k)) continue;
        for (int i = 0; i < 3; ++i) {
          const T hv = h(i, j, k);
          if (j == k) {
            const double w = 1.0 / (g.h(j) * g.h(j));
            scatter(c.shifted(j, 1), i, hv * w);
            scatter(c.shifted(j, -1), i, hv * w);
            scatter(c, i, hv * (-2.0 * w));
          } else {
            const double w = 1.0 / (4.0 * g.h(j) * g.h(k));
            scatter(c.shifted(j, 1).shifted(k, 1), i, hv * w);
            scatter(c.shifted(j, 1).shifted(k, -1), i, hv * (-w));
            scatter(c.shifted(j, -1).shifted(k, 1), i, hv * (-w));
            scatter(c.shifted(j, -1).shifted(k, -1), i, hv * w);
          }
        }
      }
    }
  }
  return r;
}

/// sum_cells mu |grad^2 v|^(p-2) grad^2 v : grad^2 w vol.
double hyperstress_pairing(const Grid& g, const Field<Vec3d>& v, const Field<Vec3d>& w, double mu, double p);

/// Midpoint rule, fixed sequential order.
template <class T>
T integrate(const Grid& g, const Field<T>& f) {
  T s{};
  for (std::size_t n = 0; n < f.size(); ++n) s += f[n];
  return s * g.cell_volume();
}

/// Face-area weighted sum of fn(face, cell) over all boundary faces.
double surface_integrate(const Grid& g, const std::function<double(Face, std::size_t)>& fn);

}  // namespace tve
