// Forward-mode dual numbers carrying N tangent directions at once.
//
// The residual of the time stepper is written once as a template over the
// scalar type; instantiating it with Jet<N> yields exact directional
// derivatives, which the Jacobian assembly compresses with a stencil colouring.
#pragma once

#include <array>
#include <cmath>
#include <ostream>
#include <type_traits>

namespace tve {

template <int N>
struct Jet {
  double v = 0.0;             // value
  std::array<double, N> d{};  // tangents

  constexpr Jet() = default;
  constexpr Jet(double value) : v(value) {}  // NOLINT: implicit lift of constants
  constexpr Jet(double value, double tangent) : v(value) { d.fill(tangent); }

  Jet& operator+=(const Jet& o) {
    v += o.v;
    for (int i = 0; i < N; ++i) d[i] += o.d[i];
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    v -= o.v;
    for (int i = 0; i < N; ++i) d[i] -= o.d[i];
    return *this;
  }
  Jet& operator*=(const Jet& o) {
    for (int i = 0; i < N; ++i) d[i] = d[i] * o.v + v * o.d[i];
    v *= o.v;
    return *this;
  }
  Jet& operator/=(const Jet& o) {
    const double inv = 1.0 / o.v;
    const double q = v * inv;
    for (int i = 0; i < N; ++i) d[i] = (d[i] - q * o.d[i]) * inv;
    v = q;
    return *this;
  }
  Jet& operator*=(double s) {
    v *= s;
    for (auto& x : d) x *= s;
    return *this;
  }

  /// Value f(v) with chain-rule tangents f'(v) d.
  Jet chain(double f, double df) const {
    Jet r;
    r.v = f;
    for (int i = 0; i < N; ++i) r.d[i] = df * d[i];
    return r;
  }
};

using Dual = Jet<1>;

template <int N> Jet<N> operator-(Jet<N> a) { a *= -1.0; return a; }
template <int N> Jet<N> operator+(Jet<N> a, const Jet<N>& b) { return a += b; }
template <int N> Jet<N> operator-(Jet<N> a, const Jet<N>& b) { return a -= b; }
template <int N> Jet<N> operator*(Jet<N> a, const Jet<N>& b) { return a *= b; }
template <int N> Jet<N> operator/(Jet<N> a, const Jet<N>& b) { return a /= b; }
template <int N> Jet<N> operator+(Jet<N> a, double b) { a.v += b; return a; }
template <int N> Jet<N> operator+(double a, Jet<N> b) { b.v += a; return b; }
template <int N> Jet<N> operator-(Jet<N> a, double b) { a.v -= b; return a; }
template <int N> Jet<N> operator-(double a, Jet<N> b) { b *= -1.0; b.v += a; return b; }
template <int N> Jet<N> operator*(Jet<N> a, double b) { return a *= b; }
template <int N> Jet<N> operator*(double a, Jet<N> b) { return b *= a; }
template <int N> Jet<N> operator/(Jet<N> a, double b) { return a *= 1.0 / b; }
template <int N> Jet<N> operator/(double a, const Jet<N>& b) { return b.chain(a / b.v, -a / (b.v * b.v)); }

template <int N> bool operator<(const Jet<N>& a, const Jet<N>& b) { return a.v < b.v; }
template <int N> bool operator>(const Jet<N>& a, const Jet<N>& b) { return a.v > b.v; }
template <int N> bool operator<=(const Jet<N>& a, const Jet<N>& b) { return a.v <= b.v; }
template <int N> bool operator>=(const Jet<N>& a, const Jet<N>& b) { return a.v >= b.v; }

template <int N>
Jet<N> sqrt(const Jet<N>& a) {
  const double s = std::sqrt(a.v);
  return a.chain(s, s > 0.0 ? 0.5 / s : 0.0);
}

template <int N>
Jet<N> exp(const Jet<N>& a) {
  const double e = std::exp(a.v);
  return a.chain(e, e);
}

template <int N>
Jet<N> log(const Jet<N>& a) { return a.chain(std::log(a.v), 1.0 / a.v); }

// x^q with the convention d/dx x^q = 0 at x = 0 when q > 1, which is what the
// p-Laplacian type terms need at vanishing gradients.
template <int N>
Jet<N> pow(const Jet<N>& a, double q) {
  if (a.v == 0.0) return a.chain(q == 0.0 ? 1.0 : 0.0, q == 1.0 ? 1.0 : 0.0);
  const double pv = std::pow(a.v, q);
  return a.chain(pv, q * pv / a.v);
}

template <int N>
Jet<N> abs(const Jet<N>& a) { return a.v < 0.0 ? -a : a; }

// Plain-double overloads so templated code can call these unqualified.
inline double sqrt(double x) { return std::sqrt(x); }
inline double exp(double x) { return std::exp(x); }
inline double log(double x) { return std::log(x); }
inline double pow(double x, double q) { return std::pow(x, q); }
inline double abs(double x) { return std::fabs(x); }

inline double value(double x) { return x; }
template <int N>
double value(const Jet<N>& x) { return x.v; }

template <class T>
struct is_jet : std::false_type {};
template <int N>
struct is_jet<Jet<N>> : std::true_type {};

/// Scalar types the templated kernels accept.
template <class T>
inline constexpr bool is_scalar_v = std::is_same_v<T, double> || is_jet<T>::value;

template <int N>
std::ostream& operator<<(std::ostream& os, const Jet<N>& a) {
  os << a.v << "[";
  for (int i = 0; i < N; ++i) os << (i ? "," : "") << a.d[i];
  return os << "]";
}

}  // namespace tve
