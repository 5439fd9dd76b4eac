#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fixtures.hpp"
#include "tve/dual.hpp"

using namespace tve;
using namespace tve::testing;
using doctest::Approx;

namespace {

Mat3d mat(std::initializer_list<double> rows) {
  Mat3d m;
  std::copy(rows.begin(), rows.end(), m.c.begin());
  return m;
}

bool near(const Sym3d& a, const Sym3d& b, double tol) { return max_abs(a - b) <= tol; }

}  // namespace

TEST_CASE("symmetric storage order is 11, 22, 33, 23, 13, 12") {
  Sym3d s;
  s(1, 2) = 1.0;
  s(0, 2) = 2.0;
  s(0, 1) = 3.0;
  CHECK(s.c[3] == 1.0);
  CHECK(s.c[4] == 2.0);
  CHECK(s.c[5] == 3.0);
  CHECK(s(2, 1) == 1.0);
  CHECK(s(2, 0) == 2.0);
  CHECK(s(1, 0) == 3.0);
}

TEST_CASE("trace_sph_dev examples") {
  const auto id = trace_sph_dev(Sym3d::identity());
  CHECK(id.trace == 3.0);
  CHECK(id.sph == Sym3d::identity());
  CHECK(max_abs(id.dev.full()) == 0.0);

  const auto zero = trace_sph_dev(Sym3d{});
  CHECK(zero.trace == 0.0);
  CHECK(max_abs(zero.sph) == 0.0);
  CHECK(max_abs(zero.dev.full()) == 0.0);

  const auto e1 = trace_sph_dev(Sym3d::diag(1, 0, 0));
  CHECK(e1.trace == 1.0);
  CHECK(near(e1.sph, Sym3d::diag(1.0 / 3, 1.0 / 3, 1.0 / 3), 1e-15));
  CHECK(near(e1.dev.full(), Sym3d::diag(2.0 / 3, -1.0 / 3, -1.0 / 3), 1e-15));
}

TEST_CASE("dev is idempotent, trace free, and sph + dev = identity") {
  Rng rng(11);
  for (int k = 0; k < 1000; ++k) {
    const Sym3d a = random_sym(rng, 10.0);
    const Sym3d d = dev(a).full();
    CHECK(trace(d) == 0.0);
    CHECK(near(dev(d).full(), d, 1e-14));
    CHECK(near(sph(a) + d, a, 1e-14));
  }
}

TEST_CASE("sym_skw examples") {
  const Mat3d s = Mat3d::from(Sym3d::diag(1, 2, 3));
  const auto split = sym_skw(s);
  CHECK(split.sym == Sym3d::diag(1, 2, 3));
  CHECK(split.skw == Mat3d{});

  const auto z = sym_skw(Mat3d{});
  CHECK(z.sym == Sym3d{});
  CHECK(z.skw == Mat3d{});

  Mat3d l;
  l(0, 1) = 1.0;
  const auto e = sym_skw(l);
  CHECK(e.sym(0, 1) == 0.5);
  CHECK(e.sym(1, 0) == 0.5);
  CHECK(e.skw(0, 1) == 0.5);
  CHECK(e.skw(1, 0) == -0.5);
  CHECK(e.sym.c[0] == 0.0);
}

TEST_CASE("jaumann_spin_term examples") {
  Rng rng(12);
  const Sym3d e = random_sym(rng);
  CHECK(jaumann_spin_term(Mat3d{}, e) == Sym3d{});

  const Mat3d w = skw(random_mat(rng));
  CHECK(max_abs(jaumann_spin_term(w, Sym3d::identity())) <= 1e-16);

  const Mat3d planar = mat({0, -1, 0, 1, 0, 0, 0, 0, 0});
  Sym3d expect;
  expect(0, 1) = -1.0;
  CHECK(jaumann_spin_term(planar, Sym3d::diag(1, 0, 0)) == expect);
}

TEST_CASE("jaumann_spin_term rejects a non-antisymmetric W") {
  CHECK_THROWS_AS(jaumann_spin_term(Mat3d::from(Sym3d::identity()), Sym3d{}), std::invalid_argument);
}

TEST_CASE("jaumann_spin_term agrees with the full product E W - W E") {
  Rng rng(13);
  for (int k = 0; k < 200; ++k) {
    const Sym3d e = random_sym(rng);
    const Mat3d w = skw(random_mat(rng));
    const Mat3d full = matmul(Mat3d::from(e), w) - matmul(w, Mat3d::from(e));
    // The full product is symmetric, so the stored upper triangle is all of it.
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        CHECK(full(i, j) == Approx(full(j, i)).epsilon(1e-14));
        CHECK(jaumann_spin_term(w, e)(i, j) == Approx(full(i, j)).epsilon(1e-13));
      }
  }
}

TEST_CASE("commutator_contraction examples") {
  Rng rng(14);
  const Sym3d d = Sym3d::diag(1, 2, 3);
  CHECK(std::fabs(commutator_contraction(d, d, random_mat(rng))) <= 1e-13);

  const Mat3d symmetric = Mat3d::from(random_sym(rng));
  CHECK(std::fabs(commutator_contraction(random_sym(rng), random_sym(rng), symmetric)) <= 1e-15);

  for (int k = 0; k < 1000; ++k) {
    const Eigen::Matrix3d q = random_rotation(rng);
    const Sym3d s = rotated_diag(q, Eigen::Vector3d::Random());
    const Sym3d e = rotated_diag(q, Eigen::Vector3d::Random());
    const Mat3d l = random_mat(rng);
    CHECK(std::fabs(commutator_contraction(s, e, l)) <= 1e-12 * norm(s) * norm(e) * std::sqrt(ddot(l, l)));
  }
}

TEST_CASE("commutator_contraction is generally non-zero for non-commuting pairs") {
  const Sym3d s = Sym3d::diag(1, 0, 0);
  Sym3d e;
  e(0, 1) = 1.0;
  CHECK(std::fabs(commutator_contraction(s, e, mat({0, -1, 0, 1, 0, 0, 0, 0, 0}))) > 0.1);
}

TEST_CASE("triple_contraction and boxtimes examples") {
  CHECK(triple_contraction(Third3d{}, Third3d{}) == 0.0);
  Third3d h;
  h(0, 1, 2) = 2.0;
  CHECK(triple_contraction(h, h) == 4.0);

  CHECK(boxtimes(Third3d{}) == Sym3d{});
  Sym3d expect;
  expect(0, 0) = 4.0;
  CHECK(boxtimes(h) == expect);

  Rng rng(15);
  for (int k = 0; k < 1000; ++k) {
    const Third3d g = random_third(rng);
    const double tc = triple_contraction(g, g);
    CHECK(trace(boxtimes(g)) == Approx(tc).epsilon(1e-13));
    // |H|^(p-2) H : H = |H|^p
    const double p = uniform(rng, 1.5, 6.0);
    Third3d scaled = g;
    scaled *= std::pow(tc, 0.5 * (p - 2.0));
    CHECK(triple_contraction(scaled, g) == Approx(std::pow(tc, 0.5 * p)).epsilon(1e-12));
  }
}

TEST_CASE("boxtimes is positive semi-definite") {
  Rng rng(16);
  for (int k = 0; k < 500; ++k) {
    const Sym3d b = boxtimes(random_third(rng));
    Eigen::Vector3d x = Eigen::Vector3d::Random();
    double q = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) q += x[i] * b(i, j) * x[j];
    CHECK(q >= -1e-13);
  }
}

TEST_CASE("DevTensor3 keeps an exactly zero trace") {
  Rng rng(17);
  for (int k = 0; k < 1000; ++k) {
    Dev3d d(random_sym(rng, 1e3));
    d *= uniform(rng, -7.0, 7.0);
    CHECK(d.trace() == 0.0);
  }
}

TEST_CASE("tensor operations propagate jets") {
  using J = Jet<2>;
  SymTensor3<J> e;
  e.c[0] = J(0.3);
  e.c[0].d[0] = 1.0;
  e.c[5] = J(0.2);
  e.c[5].d[1] = 1.0;
  const J n2 = norm2(e);
  CHECK(n2.v == Approx(0.09 + 2 * 0.04));
  CHECK(n2.d[0] == Approx(0.6));
  CHECK(n2.d[1] == Approx(0.8));
}
