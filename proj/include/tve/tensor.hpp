// Small fixed-size tensor algebra (3, 3x3, 3x3x3) used pointwise on every
// grid cell. Everything here is templated on the scalar type so the same code
// runs on double and on jets.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <type_traits>

#include "tve/dual.hpp"

namespace tve {

template <class T>
struct Vec3 {
  std::array<T, 3> c{};

  constexpr T& operator[](std::size_t i) { return c[i]; }
  constexpr const T& operator[](std::size_t i) const { return c[i]; }

  Vec3& operator+=(const Vec3& o) { for (int i = 0; i < 3; ++i) c[i] += o.c[i]; return *this; }
  Vec3& operator-=(const Vec3& o) { for (int i = 0; i < 3; ++i) c[i] -= o.c[i]; return *this; }
  template <class S>
  Vec3& operator*=(const S& s) { for (int i = 0; i < 3; ++i) c[i] *= s; return *this; }

  friend bool operator==(const Vec3&, const Vec3&) = default;
};

template <class T> Vec3<T> operator+(Vec3<T> a, const Vec3<T>& b) { return a += b; }
template <class T> Vec3<T> operator-(Vec3<T> a, const Vec3<T>& b) { return a -= b; }
template <class T> Vec3<T> operator-(Vec3<T> a) { for (auto& x : a.c) x = -x; return a; }
template <class T> Vec3<T> operator*(Vec3<T> a, const T& s) { return a *= s; }
template <class T> Vec3<T> operator*(const T& s, Vec3<T> a) { return a *= s; }
template <class T> Vec3<T> operator*(Vec3<T> a, double s) requires(!std::is_same_v<T, double>) { return a *= s; }
template <class T> Vec3<T> operator*(double s, Vec3<T> a) requires(!std::is_same_v<T, double>) { return a *= s; }

template <class T>
T dot(const Vec3<T>& a, const Vec3<T>& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

/// Symmetric 3x3 matrix stored as six components in the fixed order
/// 11, 22, 33, 23, 13, 12. Symmetry is structural.
template <class T>
struct SymTensor3 {
  std::array<T, 6> c{};

  // (1,2)->3, (0,2)->4, (0,1)->5
  static constexpr int index(int i, int j) { return i == j ? i : 6 - i - j; }

  constexpr T& operator()(int i, int j) { return c[index(i, j)]; }
  constexpr const T& operator()(int i, int j) const { return c[index(i, j)]; }

  static SymTensor3 identity() {
    SymTensor3 r;
    r.c[0] = r.c[1] = r.c[2] = T(1.0);
    return r;
  }
  template <class U>
  static SymTensor3 from(const SymTensor3<U>& o) {
    SymTensor3 r;
    for (int i = 0; i < 6; ++i) r.c[i] = T(o.c[i]);
    return r;
  }
  static SymTensor3 diag(const T& a, const T& b, const T& d) {
    SymTensor3 r;
    r.c[0] = a; r.c[1] = b; r.c[2] = d;
    return r;
  }

  SymTensor3& operator+=(const SymTensor3& o) { for (int i = 0; i < 6; ++i) c[i] += o.c[i]; return *this; }
  SymTensor3& operator-=(const SymTensor3& o) { for (int i = 0; i < 6; ++i) c[i] -= o.c[i]; return *this; }
  template <class S>
  SymTensor3& operator*=(const S& s) { for (int i = 0; i < 6; ++i) c[i] *= s; return *this; }

  friend bool operator==(const SymTensor3&, const SymTensor3&) = default;
};

template <class T> SymTensor3<T> operator+(SymTensor3<T> a, const SymTensor3<T>& b) { return a += b; }
template <class T> SymTensor3<T> operator-(SymTensor3<T> a, const SymTensor3<T>& b) { return a -= b; }
template <class T> SymTensor3<T> operator-(SymTensor3<T> a) { for (auto& x : a.c) x = -x; return a; }
template <class T> SymTensor3<T> operator*(SymTensor3<T> a, const T& s) { return a *= s; }
template <class T> SymTensor3<T> operator*(const T& s, SymTensor3<T> a) { return a *= s; }
template <class T> SymTensor3<T> operator*(SymTensor3<T> a, double s) requires(!std::is_same_v<T, double>) { return a *= s; }
template <class T> SymTensor3<T> operator*(double s, SymTensor3<T> a) requires(!std::is_same_v<T, double>) { return a *= s; }

/// Trace-free symmetric matrix. Stores 11, 22, 23, 13, 12; the 33 entry is
/// the exact negation of (11 + 22), so the trace is zero in floating point.
template <class T>
class DevTensor3 {
 public:
  DevTensor3() = default;

  /// Deviatoric projection of a symmetric tensor.
  explicit DevTensor3(const SymTensor3<T>& a) {
    const T m = (a.c[0] + a.c[1] + a.c[2]) / 3.0;
    d11_ = a.c[0] - m;
    d22_ = a.c[1] - m;
    d23_ = a.c[3];
    d13_ = a.c[4];
    d12_ = a.c[5];
  }

  SymTensor3<T> full() const {
    SymTensor3<T> r;
    r.c[0] = d11_;
    r.c[1] = d22_;
    r.c[2] = -(d11_ + d22_);
    r.c[3] = d23_;
    r.c[4] = d13_;
    r.c[5] = d12_;
    return r;
  }

  T trace() const {
    const SymTensor3<T> f = full();
    return f.c[0] + f.c[1] + f.c[2];
  }

  template <class S>
  DevTensor3& operator*=(const S& s) {
    d11_ *= s; d22_ *= s; d23_ *= s; d13_ *= s; d12_ *= s;
    return *this;
  }

 private:
  T d11_{}, d22_{}, d23_{}, d13_{}, d12_{};
};

/// General 3x3 matrix, row-major.
template <class T>
struct Tensor3 {
  std::array<T, 9> c{};

  constexpr T& operator()(int i, int j) { return c[3 * i + j]; }
  constexpr const T& operator()(int i, int j) const { return c[3 * i + j]; }

  static Tensor3 from(const SymTensor3<T>& s) {
    Tensor3 r;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) r(i, j) = s(i, j);
    return r;
  }

  Tensor3& operator+=(const Tensor3& o) { for (int i = 0; i < 9; ++i) c[i] += o.c[i]; return *this; }
  Tensor3& operator-=(const Tensor3& o) { for (int i = 0; i < 9; ++i) c[i] -= o.c[i]; return *this; }
  template <class S>
  Tensor3& operator*=(const S& s) { for (int i = 0; i < 9; ++i) c[i] *= s; return *this; }

  friend bool operator==(const Tensor3&, const Tensor3&) = default;
};

template <class T> Tensor3<T> operator+(Tensor3<T> a, const Tensor3<T>& b) { return a += b; }
template <class T> Tensor3<T> operator-(Tensor3<T> a, const Tensor3<T>& b) { return a -= b; }

template <class T>
Tensor3<T> transpose(const Tensor3<T>& a) {
  Tensor3<T> r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r(i, j) = a(j, i);
  return r;
}

template <class T>
Tensor3<T> matmul(const Tensor3<T>& a, const Tensor3<T>& b) {
  Tensor3<T> r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      T s{};
      for (int k = 0; k < 3; ++k) s += a(i, k) * b(k, j);
      r(i, j) = s;
    }
  return r;
}

template <class T>
Vec3<T> matvec(const Tensor3<T>& a, const Vec3<T>& x) {
  Vec3<T> r;
  for (int i = 0; i < 3; ++i) r[i] = a(i, 0) * x[0] + a(i, 1) * x[1] + a(i, 2) * x[2];
  return r;
}

/// 27-component tensor H_ijk; for second velocity gradients H_ijk = d_j d_k v_i.
template <class T>
struct ThirdOrderTensor {
  std::array<T, 27> c{};

  constexpr T& operator()(int i, int j, int k) { return c[9 * i + 3 * j + k]; }
  constexpr const T& operator()(int i, int j, int k) const { return c[9 * i + 3 * j + k]; }

  template <class S>
  ThirdOrderTensor& operator*=(const S& s) { for (auto& x : c) x *= s; return *this; }
};

// ---------------------------------------------------------------------------
// Contractions and decompositions

template <class T>
T trace(const SymTensor3<T>& a) { return a.c[0] + a.c[1] + a.c[2]; }

template <class T>
T trace(const Tensor3<T>& a) { return a(0, 0) + a(1, 1) + a(2, 2); }

template <class T>
SymTensor3<T> sph(const SymTensor3<T>& a) {
  const T m = trace(a) / 3.0;
  return SymTensor3<T>::diag(m, m, m);
}

template <class T>
DevTensor3<T> dev(const SymTensor3<T>& a) { return DevTensor3<T>(a); }

/// Double contraction A:B for symmetric tensors.
template <class T>
T ddot(const SymTensor3<T>& a, const SymTensor3<T>& b) {
  return a.c[0] * b.c[0] + a.c[1] * b.c[1] + a.c[2] * b.c[2] +
         2.0 * (a.c[3] * b.c[3] + a.c[4] * b.c[4] + a.c[5] * b.c[5]);
}

template <class T>
T ddot(const Tensor3<T>& a, const Tensor3<T>& b) {
  T s{};
  for (int i = 0; i < 9; ++i) s += a.c[i] * b.c[i];
  return s;
}

template <class T>
T norm2(const SymTensor3<T>& a) { return ddot(a, a); }

template <class T>
T norm(const SymTensor3<T>& a) { return sqrt(ddot(a, a)); }

template <class T>
SymTensor3<T> sym(const Tensor3<T>& l) {
  SymTensor3<T> r;
  r.c[0] = l(0, 0);
  r.c[1] = l(1, 1);
  r.c[2] = l(2, 2);
  r.c[3] = 0.5 * (l(1, 2) + l(2, 1));
  r.c[4] = 0.5 * (l(0, 2) + l(2, 0));
  r.c[5] = 0.5 * (l(0, 1) + l(1, 0));
  return r;
}

template <class T>
Tensor3<T> skw(const Tensor3<T>& l) {
  Tensor3<T> r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r(i, j) = 0.5 * (l(i, j) - l(j, i));
  return r;
}

template <class T>
bool is_antisymmetric(const Tensor3<T>& w, double tol = 1e-12) {
  double scale = 1.0;
  for (const auto& x : w.c) scale = std::max(scale, std::fabs(value(x)));
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j)
      if (std::fabs(value(w(i, j) + w(j, i))) > tol * scale) return false;
  return true;
}

/// E W - W E for antisymmetric W: the spin part of the corotational rate.
/// For symmetric E and antisymmetric W the product is symmetric, so only the
/// upper triangle is evaluated.
template <class T>
SymTensor3<T> jaumann_spin_term(const Tensor3<T>& w, const SymTensor3<T>& e) {
  if (!is_antisymmetric(w)) throw std::invalid_argument("jaumann_spin_term: W is not antisymmetric");
  SymTensor3<T> r;
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) {
      T s{};
      for (int k = 0; k < 3; ++k) s += e(i, k) * w(k, j) - w(i, k) * e(k, j);
      r(i, j) = s;
    }
  return r;
}

/// S : (W E - E W) with W = skw(L).
template <class T>
T commutator_contraction(const SymTensor3<T>& s, const SymTensor3<T>& e, const Tensor3<T>& l) {
  const Tensor3<T> w = skw(l);
  const Tensor3<T> we = matmul(w, Tensor3<T>::from(e));
  const Tensor3<T> ew = matmul(Tensor3<T>::from(e), w);
  return ddot(Tensor3<T>::from(s), we - ew);
}

template <class T>
T triple_contraction(const ThirdOrderTensor<T>& a, const ThirdOrderTensor<T>& b) {
  T s{};
  for (int i = 0; i < 27; ++i) s += a.c[i] * b.c[i];
  return s;
}

/// [G boxtimes G]_ij = sum_kl G_ikl G_jkl.
template <class T>
SymTensor3<T> boxtimes(const ThirdOrderTensor<T>& g) {
  SymTensor3<T> r;
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) {
      T s{};
      for (int kl = 0; kl < 9; ++kl) s += g.c[9 * i + kl] * g.c[9 * j + kl];
      r(i, j) = s;
    }
  return r;
}

/// Result of trace_sph_dev: A = sph + dev with sph = (tr A / 3) I.
template <class T>
struct SphDevSplit {
  T trace;
  SymTensor3<T> sph;
  DevTensor3<T> dev;
};

template <class T>
SphDevSplit<T> trace_sph_dev(const SymTensor3<T>& a) {
  return {trace(a), sph(a), dev(a)};
}

/// Result of sym_skw: L = sym + skw.
template <class T>
struct SymSkwSplit {
  SymTensor3<T> sym;
  Tensor3<T> skw;
};

template <class T>
SymSkwSplit<T> sym_skw(const Tensor3<T>& l) {
  return {sym(l), skw(l)};
}

using Vec3d = Vec3<double>;
using Sym3d = SymTensor3<double>;
using Dev3d = DevTensor3<double>;
using Mat3d = Tensor3<double>;
using Third3d = ThirdOrderTensor<double>;

}  // namespace tve
