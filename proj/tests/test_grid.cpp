#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numbers>

#include "fixtures.hpp"

using namespace tve;
using namespace tve::testing;
using doctest::Approx;

namespace {

const double kPi = std::numbers::pi;

/// Cells at least `margin` cells away from every boundary of an active direction.
bool interior(const Grid& g, const CellIndex& c, int margin) {
  for (int d = 0; d < 3; ++d)
    if (g.active(d) && (c[d] < margin || c[d] >= g.n(d) - margin)) return false;
  return true;
}

template <class F>
Field<double> sample(const Grid& g, F f) {
  Field<double> r(g);
  for (std::size_t n = 0; n < g.size(); ++n) r[n] = f(g.center(n));
  return r;
}

template <class F>
Field<Vec3d> sample_vec(const Grid& g, F f) {
  Field<Vec3d> r(g);
  for (std::size_t n = 0; n < g.size(); ++n) r[n] = f(g.center(n));
  return r;
}

double observed_order(double e_coarse, double e_fine) { return std::log2(e_coarse / e_fine); }

}  // namespace

TEST_CASE("grid geometry") {
  const Grid g({2.0, 1.0, 0.5}, {8, 4, 1});
  CHECK(g.size() == 32);
  CHECK(g.h(0) == 0.25);
  CHECK(g.active(0));
  CHECK_FALSE(g.active(2));
  CHECK(g.cell_volume() == Approx(0.25 * 0.25 * 0.5));
  CHECK(g.center(g.index(0, 0, 0))[0] == Approx(0.125));
  CHECK(g.cell(g.index(3, 2, 0)).i == 3);
  CHECK(g.cell(g.index(3, 2, 0)).j == 2);
  CHECK_THROWS_AS(Grid({1, 1, 1}, {2, 8, 1}), std::invalid_argument);
  CHECK_THROWS_AS(Grid({0, 1, 1}, {8, 8, 1}), std::invalid_argument);
}

TEST_CASE("mirror ghosts flip the normal components") {
  const Grid g({1, 1, 1}, {4, 4, 1});
  Field<Vec3d> v(g);
  Field<Sym3d> e(g);
  v[g.index(0, 1, 0)] = Vec3d{{1.0, 2.0, 3.0}};
  Sym3d s;
  for (int q = 0; q < 6; ++q) s.c[q] = q + 1.0;
  e[g.index(0, 1, 0)] = s;
  CellIndex ghost{-1, 1, 0};
  const Vec3d vg = at(g, v, ghost);
  CHECK(vg[0] == -1.0);
  CHECK(vg[1] == 2.0);
  CHECK(vg[2] == 3.0);
  const Sym3d eg = at(g, e, ghost);
  CHECK(eg(0, 0) == s(0, 0));
  CHECK(eg(0, 1) == -s(0, 1));
  CHECK(eg(0, 2) == -s(0, 2));
  CHECK(eg(1, 2) == s(1, 2));
  // The inactive direction wraps onto the single layer with no sign change.
  CellIndex up{0, 1, 3};
  CHECK(at(g, v, up)[2] == 3.0);
}

TEST_CASE("gradient examples") {
  const Grid g({1, 1, 1}, {6, 6, 6});
  const Field<Vec3d> gc = gradient(g, Field<double>(g, 3.5));
  for (std::size_t n = 0; n < g.size(); ++n) CHECK(dot(gc[n], gc[n]) == 0.0);

  const Vec3d a{{0.3, -1.2, 2.0}};
  const Field<Vec3d> gl = gradient(g, sample(g, [&](const Vec3d& x) { return dot(a, x); }));
  for (std::size_t n = 0; n < g.size(); ++n) {
    if (!interior(g, g.cell(n), 1)) continue;
    for (int d = 0; d < 3; ++d) CHECK(gl[n][d] == Approx(a[d]).epsilon(1e-13));
  }
}

TEST_CASE("divergence and symmetric gradient of linear fields") {
  const Grid g({1, 1, 1}, {6, 6, 6});
  const Field<Vec3d> v = sample_vec(g, [](const Vec3d& x) { return x; });
  const Field<double> div = divergence_v(g, v);
  const Field<Sym3d> eps = sym_gradient(g, v);
  const Vec3d omega{{0.4, -0.7, 1.1}};
  const Field<Vec3d> rot = sample_vec(g, [&](const Vec3d& x) {
    return Vec3d{{omega[1] * x[2] - omega[2] * x[1], omega[2] * x[0] - omega[0] * x[2], omega[0] * x[1] - omega[1] * x[0]}};
  });
  const Field<Sym3d> eps_rot = sym_gradient(g, rot);
  for (std::size_t n = 0; n < g.size(); ++n) {
    if (!interior(g, g.cell(n), 1)) continue;
    CHECK(div[n] == Approx(3.0).epsilon(1e-13));
    CHECK(max_abs(eps[n] - Sym3d::identity()) <= 1e-13);
    CHECK(max_abs(eps_rot[n]) <= 1e-13);
  }
}

TEST_CASE("advection examples") {
  const Grid g({1, 1, 1}, {8, 8, 1});
  Rng rng(31);
  Field<Vec3d> v(g);
  for (std::size_t n = 0; n < g.size(); ++n) v[n] = Vec3d{{uniform(rng, -1, 1), uniform(rng, -1, 1), 0.0}};
  const Field<double> f = sample(g, [](const Vec3d& x) { return std::sin(3 * x[0]) + x[1]; });

  for (AdvectionMode mode : {AdvectionMode::Central, AdvectionMode::Upwind}) {
    const Field<double> zero_v = advect(g, Field<Vec3d>(g), f, mode);
    const Field<double> const_f = advect(g, v, Field<double>(g, 2.0), mode);
    for (std::size_t n = 0; n < g.size(); ++n) {
      CHECK(zero_v[n] == 0.0);
      CHECK(std::fabs(const_f[n]) <= 1e-13);
    }
    const Field<Vec3d> ex(g, Vec3d{{1.0, 0.0, 0.0}});
    const Field<double> lin = advect(g, ex, sample(g, [](const Vec3d& x) { return x[0]; }), mode);
    for (std::size_t n = 0; n < g.size(); ++n)
      if (interior(g, g.cell(n), 1)) CHECK(lin[n] == Approx(1.0).epsilon(1e-13));
  }
}

TEST_CASE("conservative divergence") {
  const Grid g({1, 1, 1}, {8, 8, 1});
  const Field<double> z = conservative_div_flux(g, Field<Vec3d>(g));
  for (std::size_t n = 0; n < g.size(); ++n) CHECK(z[n] == 0.0);

  Rng rng(32);
  Field<Vec3d> p(g);
  for (std::size_t n = 0; n < g.size(); ++n) p[n] = Vec3d{{uniform(rng, -1, 1), uniform(rng, -1, 1), 0.0}};
  CHECK(std::fabs(integrate(g, conservative_div_flux(g, p))) <= 1e-14);

  // p = (x (L - x), 0, 0): interior values approach L - 2x at second order.
  std::vector<double> errs;
  for (int N : {8, 16, 32}) {
    const Grid gn({1, 1, 1}, {N, 4, 1});
    const Field<double> d =
        conservative_div_flux(gn, sample_vec(gn, [](const Vec3d& x) { return Vec3d{{x[0] * (1 - x[0]), 0, 0}}; }));
    double err = 0.0;
    for (std::size_t n = 0; n < gn.size(); ++n) {
      if (!interior(gn, gn.cell(n), 1)) continue;
      err = std::max(err, std::fabs(d[n] - (1 - 2 * gn.center(n)[0])));
    }
    errs.push_back(err);
  }
  // Central differences are exact on quadratics.
  for (double e : errs) CHECK(e <= 1e-12);
}

TEST_CASE("summation by parts between gradient and conservative divergence") {
  Rng rng(33);
  for (const auto& cells : {std::array<int, 3>{8, 8, 1}, std::array<int, 3>{5, 6, 4}}) {
    const Grid g({1.0, 0.8, 0.6}, cells);
    for (int k = 0; k < 20; ++k) {
      Field<double> r(g);
      Field<Vec3d> p(g);
      for (std::size_t n = 0; n < g.size(); ++n) {
        r[n] = uniform(rng, -1, 1);
        for (int i = 0; i < 3; ++i) p[n][i] = g.active(i) ? uniform(rng, -1, 1) : 0.0;
      }
      const Field<double> div = conservative_div_flux(g, p);
      const Field<Vec3d> grad = gradient(g, r);
      double a = 0.0, nr = 0.0, np = 0.0;
      for (std::size_t n = 0; n < g.size(); ++n) {
        a += r[n] * div[n] + dot(grad[n], p[n]);
        nr += r[n] * r[n];
        np += dot(p[n], p[n]);
      }
      const double vol = g.cell_volume();
      CHECK(std::fabs(a * vol) <= 1e-12 * std::sqrt(nr * vol) * std::sqrt(np * vol) / vol);
    }
  }
}

TEST_CASE("interior operators converge at second order") {
  auto f = [](const Vec3d& x) { return std::sin(2 * kPi * x[0]) * std::cos(kPi * x[1]); };
  auto fx = [](const Vec3d& x) { return 2 * kPi * std::cos(2 * kPi * x[0]) * std::cos(kPi * x[1]); };
  auto fy = [](const Vec3d& x) { return -kPi * std::sin(2 * kPi * x[0]) * std::sin(kPi * x[1]); };
  auto lap = [&](const Vec3d& x) { return -5 * kPi * kPi * f(x); };
  auto vfield = [&](const Vec3d& x) { return Vec3d{{f(x), std::cos(x[0] + 2 * x[1]), 0.0}}; };
  auto vxy = [](const Vec3d& x) { return -2 * kPi * kPi * std::cos(2 * kPi * x[0]) * std::sin(kPi * x[1]); };

  std::vector<double> eg, el, ed, eh, ea;
  for (int N : {16, 32, 64}) {
    const Grid g({1, 1, 1}, {N, N, 1});
    const Field<double> fs = sample(g, f);
    const Field<Vec3d> vs = sample_vec(g, vfield);
    const Field<Vec3d> grad = gradient(g, fs);
    const Field<double> cond = conduction(g, fs, Field<double>(g, 1.0));
    const Field<double> div = divergence_v(g, vs);
    const Field<Vec3d> ex(g, Vec3d{{1.0, 0.5, 0.0}});
    const Field<double> adv = advect(g, ex, fs);
    double e1 = 0, e2 = 0, e3 = 0, e4 = 0, e5 = 0;
    for (std::size_t n = 0; n < g.size(); ++n) {
      const CellIndex c = g.cell(n);
      // A fixed physical window away from the boundary.
      const Vec3d x = g.center(n);
      if (x[0] < 0.25 || x[0] > 0.75 || x[1] < 0.25 || x[1] > 0.75) continue;
      e1 = std::max({e1, std::fabs(grad[n][0] - fx(x)), std::fabs(grad[n][1] - fy(x))});
      e2 = std::max(e2, std::fabs(cond[n] - lap(x)));
      e3 = std::max(e3, std::fabs(div[n] - (fx(x) - 2 * std::sin(x[0] + 2 * x[1]))));
      const Third3d h = second_gradient_at(g, vs, c);
      e4 = std::max(e4, std::fabs(h(0, 0, 1) - vxy(x)));
      e5 = std::max(e5, std::fabs(adv[n] - (fx(x) + 0.5 * fy(x))));
    }
    eg.push_back(e1);
    el.push_back(e2);
    ed.push_back(e3);
    eh.push_back(e4);
    ea.push_back(e5);
  }
  for (const auto* e : {&eg, &el, &ed, &eh, &ea}) {
    for (int j = 0; j < 2; ++j) {
      const double o = observed_order((*e)[j], (*e)[j + 1]);
      CHECK(o >= 1.8);
      CHECK(o <= 2.2);
    }
  }
}

TEST_CASE("hyperstress pairing") {
  const Grid g({1, 1, 1}, {6, 6, 1});
  Rng rng(34);
  Field<Vec3d> v(g), w(g);
  for (std::size_t n = 0; n < g.size(); ++n)
    for (int i = 0; i < 3; ++i) {
      v[n][i] = uniform(rng, -1, 1);
      w[n][i] = uniform(rng, -1, 1);
    }
  CHECK(hyperstress_pairing(g, v, w, 0.0, 4.0) == 0.0);

  // Out-of-plane uniform velocity is tangential to every face.
  const Field<Vec3d> uniform_z(g, Vec3d{{0.0, 0.0, 1.3}});
  CHECK(hyperstress_pairing(g, uniform_z, uniform_z, 1.0, 4.0) == 0.0);
  const Field<Vec3d> lin = sample_vec(g, [](const Vec3d& x) { return Vec3d{{x[1], -x[0], 0.5 * x[0]}}; });
  for (std::size_t n = 0; n < g.size(); ++n) {
    if (!interior(g, g.cell(n), 1)) continue;
    const Third3d h = second_gradient_at(g, lin, g.cell(n));
    CHECK(triple_contraction(h, h) <= 1e-20);
  }

  CHECK(hyperstress_pairing(g, v, w, 0.7, 2.0) == Approx(hyperstress_pairing(g, w, v, 0.7, 2.0)).epsilon(1e-12));
  double direct = 0.0;
  for (std::size_t n = 0; n < g.size(); ++n) {
    const Third3d h = second_gradient_at(g, v, g.cell(n));
    direct += std::pow(triple_contraction(h, h), 2.0);
  }
  CHECK(hyperstress_pairing(g, v, v, 0.7, 4.0) == Approx(0.7 * direct * g.cell_volume()).epsilon(1e-12));
  CHECK(hyperstress_pairing(g, v, v, 0.7, 4.0) >= 0.0);

  // The residual is the adjoint of the pairing in its second argument.
  const Field<Vec3d> r = hyperstress_residual(g, v, 0.7, 4.0);
  double paired = 0.0;
  for (std::size_t n = 0; n < g.size(); ++n) paired += dot(r[n], w[n]);
  CHECK(paired * g.cell_volume() == Approx(hyperstress_pairing(g, v, w, 0.7, 4.0)).epsilon(1e-11));
}

TEST_CASE("Robin boundary heat flux") {
  const Grid g({1, 1, 1}, {4, 4, 1});
  HeatModel h;
  h.a1 = 1.0;
  h.a2 = 0.1;
  const Field<double> theta(g, 2.0);
  h.h_ext.fill(boundary_outflux(h, 2.0));
  for (double x : robin_heat_flux(g, theta, h)) CHECK(std::fabs(x) <= 1e-15);

  HeatModel ins;
  for (double x : robin_heat_flux(g, theta, ins)) CHECK(x == 0.0);

  HeatModel one;
  one.a1 = 1.0;
  one.h_ext[static_cast<int>(Face::XMinus)] = 5.0;
  const Field<double> r = robin_heat_flux(g, theta, one);
  // Face area 0.25, cell volume 0.0625: (5 - 2) * 4 on the -x face, -2 * 4 on the others.
  CHECK(r[g.index(0, 1, 0)] == Approx(12.0));
  CHECK(r[g.index(0, 0, 0)] == Approx(12.0 - 8.0));
  CHECK(r[g.index(3, 1, 0)] == Approx(-8.0));
  CHECK(r[g.index(1, 1, 0)] == 0.0);
}

TEST_CASE("quadrature") {
  const Grid g({2.0, 1.5, 0.5}, {8, 6, 1});
  CHECK(integrate(g, Field<double>(g, 1.0)) == Approx(1.5).epsilon(1e-14));
  CHECK(integrate(g, Field<double>(g, 0.0)) == 0.0);
  const Grid u({1, 1, 1}, {8, 8, 1});
  CHECK(integrate(u, sample(u, [](const Vec3d& x) { return x[0]; })) == Approx(0.5).epsilon(1e-12));
  // Lateral boundary only in pseudo-2D: 2 (2 + 1.5) * 0.5.
  CHECK(surface_integrate(g, [](Face, std::size_t) { return 1.0; }) == Approx(3.5).epsilon(1e-14));
  const Grid c({1, 1, 1}, {4, 4, 4});
  CHECK(surface_integrate(c, [](Face, std::size_t) { return 1.0; }) == Approx(6.0).epsilon(1e-14));
}
