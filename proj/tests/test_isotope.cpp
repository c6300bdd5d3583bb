#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "jbstar/isotope.hpp"
#include "jbstar/rng.hpp"
#include "test_oracle.hpp"

using namespace jbstar;

namespace {

Element random_sa(const ModelPtr& m, std::uint64_t seed, double target) {
  Rng rng = Rng::derive(seed, "iso-sa:" + m->name(), 0);
  std::vector<cplx> c(m->dim());
  for (cplx& z : c) z = rng.complex_normal();
  Element a = m->element(std::move(c));
  Element h = cplx(0.5) * (a + m->involution(a));
  double n = m->norm(h);
  if (n > 0) h = cplx(target / n) * h;
  return h;
}

Element random_unitary_elem(const ModelPtr& m, std::uint64_t seed, double scale = 0.9 * M_PI) {
  return exp_element(cplx(0.0, 1.0) * random_sa(m, seed, scale));
}

std::vector<ModelPtr> test_models() {
  return {AlgebraModel::matrix(2), AlgebraModel::matrix(3), AlgebraModel::spin(2),
          AlgebraModel::albert()};
}

}  // namespace

TEST_CASE("isotope at the unit reproduces the base algebra") {
  for (const ModelPtr& m : test_models()) {
    ModelPtr iso = isotope(m, m->unit());
    for (int t = 0; t < 5; ++t) {
      Element a = random_sa(m, 10 + t, 1.0);
      Element b = random_sa(m, 20 + t, 1.0);
      Element pa = m->product(a, b);
      Element pb = iso->product(with_model(a, iso), with_model(b, iso));
      CHECK(coord_two_norm(with_model(pb, m) - pa) <= 1e-12);
    }
  }
}

TEST_CASE("isotope product matches the twisted associative oracle") {
  ModelPtr m = AlgebraModel::matrix(2);
  Element u = m->element({1, 0, 0, -1});
  REQUIRE(is_unitary(u));
  ModelPtr iso = isotope(m, u);
  for (int t = 0; t < 10; ++t) {
    Rng rng = Rng::derive(77, "iso-oracle", t);
    std::vector<cplx> xc(4), yc(4);
    for (cplx& z : xc) z = rng.complex_normal();
    for (cplx& z : yc) z = rng.complex_normal();
    Element x = iso->element(xc), y = iso->element(yc);
    Element p = iso->product(x, y);
    // oracle: (x u* y + y u* x)/2 with row-major 2x2 entries
    oracle::Mat xm(2), ym(2), um(2);
    for (int i = 0; i < 4; ++i) {
      xm.a[i] = xc[i];
      ym.a[i] = yc[i];
      um.a[i] = u.coords[i];
    }
    oracle::Mat us = oracle::dagger(um);
    oracle::Mat want = oracle::scale(0.5, oracle::add(oracle::mul(oracle::mul(xm, us), ym),
                                                      oracle::mul(oracle::mul(ym, us), xm)));
    double diff = 0.0;
    for (int i = 0; i < 4; ++i) diff += std::norm(p.coords[i] - want.a[i]);
    CHECK(std::sqrt(diff) < 1e-12);
  }
}

TEST_CASE("isotope unit law and involution") {
  for (const ModelPtr& m : test_models()) {
    Element u = random_unitary_elem(m, 31);
    ModelPtr iso = isotope(m, u);
    CHECK(coord_two_norm(iso->unit() - with_model(u, iso)) == 0.0);
    for (int j = 0; j < m->dim(); ++j) {
      Element x = iso->basis_element(j);
      CHECK(iso->norm(iso->product(iso->unit(), x) - x) <= 1e-9);
      Element xss = iso->involution(iso->involution(x));
      CHECK(coord_two_norm(xss - x) <= 1e-10);
    }
  }
}

TEST_CASE("triple products agree between base and isotope") {
  for (const ModelPtr& m : test_models()) {
    Element u = random_unitary_elem(m, 41);
    ModelPtr iso = isotope(m, u);
    for (int t = 0; t < 20; ++t) {
      Element x = random_sa(m, 100 + t, 1.0);
      Element y = random_sa(m, 200 + t, 1.0);
      Element z = random_sa(m, 300 + t, 1.0);
      Element base = m->triple(x, y, z);
      Element isot = iso->triple(with_model(x, iso), with_model(y, iso), with_model(z, iso));
      CHECK(m->norm(with_model(isot, m) - base) <= 1e-9);
    }
  }
}

TEST_CASE("unitary sets of base and isotope coincide") {
  for (const ModelPtr& m : test_models()) {
    Element u = random_unitary_elem(m, 51);
    ModelPtr iso = isotope(m, u);
    for (int t = 0; t < 10; ++t) {
      Element v = random_unitary_elem(m, 500 + t);
      CHECK(is_unitary(with_model(v, iso)));
      Element k0 = with_model(random_sa(m, 600 + t, 2.0), iso);
      Element k = cplx(0.5) * (k0 + iso->involution(k0));
      Element viso = exp_element(cplx(0.0, 1.0) * k);
      CHECK(is_unitary(with_model(viso, m)));
    }
  }
}

TEST_CASE("isotope rejects non-unitary pivots") {
  ModelPtr m = AlgebraModel::matrix(2);
  CHECK_THROWS_AS(isotope(m, m->element({1, 0, 0, 0.5})), NotUnitary);
}

TEST_CASE("unitary_log: frozen scalars and random round trips") {
  ModelPtr m = AlgebraModel::matrix(2);
  CHECK(coord_two_norm(unitary_log(m->unit())) <= 1e-10);
  Element u = m->element({cplx(0, 1), 0, 0, cplx(0, -1)});
  Element h = unitary_log(u);
  CHECK(coord_two_norm(h - m->element({M_PI / 2, 0, 0, -M_PI / 2})) <= 1e-10);

  for (const ModelPtr& mm : test_models()) {
    const double tol = (mm->kind() == AlgebraModel::Kind::Albert) ? 1e-6 : 1e-8;
    for (int t = 0; t < 15; ++t) {
      Element v = random_unitary_elem(mm, 700 + t);
      Element lg = unitary_log(v);
      CHECK(mm->norm(mm->involution(lg) - lg) <= 1e-8);
      CHECK(mm->norm(exp_element(cplx(0.0, 1.0) * lg) - v) <= tol);
      // spectrum within (-pi, pi]
      SpectralData sd = spectral_decompose(lg);
      for (const cplx& ev : sd.eigenvalues) {
        CHECK(ev.real() <= M_PI + 1e-9);
        CHECK(ev.real() > -M_PI - 1e-9);
      }
    }
  }
}

TEST_CASE("short_distance_log: trivial, scalar, and round-trip cases") {
  ModelPtr c = AlgebraModel::matrix(1);
  Element one = c->unit();
  {
    Element h = short_distance_log(one, one);
    CHECK(coord_two_norm(h) <= 1e-10);
  }
  {
    const double th = 2.2;
    Element v = c->element({std::polar(1.0, th)});
    Element h = short_distance_log(one, v);
    CHECK(std::abs(h.coords[0] - th) <= 1e-10);
  }
  for (const ModelPtr& mm : test_models()) {
    const double tol = (mm->kind() == AlgebraModel::Kind::Albert) ? 1e-6 : 1e-8;
    for (int t = 0; t < 10; ++t) {
      Element u = random_unitary_elem(mm, 800 + t);
      ModelPtr iso = isotope(mm, u);
      Element k = with_model(random_sa(mm, 900 + t, 0.8 * M_PI), iso);
      Element k_iso = cplx(0.5) * (k + iso->involution(k));
      Element v = with_model(exp_element(cplx(0.0, 1.0) * k_iso), mm);
      Element h = short_distance_log(u, v);
      Element back = with_model(exp_element(cplx(0.0, 1.0) * h), mm);
      CHECK(mm->norm(back - v) <= tol);
    }
  }
  CHECK_THROWS_AS(short_distance_log(one, c->element({-1.0})), TooFar);
}

TEST_CASE("midpoint witness satisfies U_w(u*) = v and the distance bound") {
  ModelPtr c = AlgebraModel::matrix(1);
  Element one = c->unit();
  // v = u: w = u
  CHECK(coord_two_norm(midpoint_witness(one, one) - one) <= 1e-10);
  {
    // u = 1, v = i: t0 = pi/2, bound sqrt(2) sqrt(1 - cos(pi/4)) = 0.76537...
    Element v = c->element({cplx(0, 1)});
    Element w = midpoint_witness(one, v);
    Element uw = u_operator(w).apply(c->involution(one));
    CHECK(c->norm(uw - v) <= 1e-8);
    const double bound = std::sqrt(2.0) * std::sqrt(1.0 - std::cos(M_PI / 4.0));
    CHECK(c->norm(w - one) <= bound + 1e-8);
    CHECK(std::abs(bound - 0.7653668647301795) < 1e-12);
  }
  for (const ModelPtr& mm : test_models()) {
    const double tol = (mm->kind() == AlgebraModel::Kind::Albert) ? 1e-6 : 1e-8;
    for (int t = 0; t < 10; ++t) {
      Rng rng = Rng::derive(123, "midpoint:" + mm->name(), t);
      const double t0 = rng.uniform(0.05, M_PI * 0.95);
      Element u = random_unitary_elem(mm, 1000 + t);
      ModelPtr iso = isotope(mm, u);
      Element k = with_model(random_sa(mm, 1100 + t, 1.0), iso);
      k = cplx(0.5) * (k + iso->involution(k));
      const double kn = iso->norm(k);
      k = cplx(t0 / kn) * k;
      Element v = with_model(exp_element(cplx(0.0, 1.0) * k), mm);
      const double eta = mm->norm(u - v);
      const double eta_expected = std::sqrt(2.0) * std::sqrt(1.0 - std::cos(t0));
      CHECK(std::abs(eta - eta_expected) <= 1e-6 * std::max(1.0, eta_expected));
      Element w = midpoint_witness(u, v);
      Element uw = u_operator(w).apply(mm->involution(u));
      CHECK(mm->norm(uw - v) <= tol);
      const double half = std::sqrt(2.0) * std::sqrt(1.0 - std::cos(t0 / 2.0));
      CHECK(mm->norm(w - u) <= half + tol);
      CHECK(mm->norm(w - v) <= half + tol);
    }
  }
  CHECK_THROWS_AS(midpoint_witness(one, c->element({-1.0})), TooFar);
}

TEST_CASE("rigidity residual") {
  ModelPtr m = AlgebraModel::matrix(2);
  Element u = random_unitary_elem(m, 1200);
  CHECK(rigidity_residual(u, u) <= 1e-12);
  CHECK(rigidity_residual(u, midpoint_witness(u, u)) <= 1e-9);
  // boundary counter-instance: w = -u has U_w(u*) = u but ||u - w|| = 2
  Element minus_u = cplx(-1.0) * u;
  CHECK_THROWS_AS(rigidity_residual(u, minus_u), HypothesisNotMet);

  for (const ModelPtr& mm : test_models()) {
    for (int t = 0; t < 10; ++t) {
      Element uu = random_unitary_elem(mm, 1300 + t);
      ModelPtr iso = isotope(mm, uu);
      Element k = with_model(random_sa(mm, 1400 + t, 1.0), iso);
      k = cplx(0.5) * (k + iso->involution(k));
      k = cplx(3e-10 / std::max(1e-30, iso->norm(k))) * k;
      Element w = with_model(exp_element(cplx(0.0, 1.0) * k), mm);
      CHECK(rigidity_residual(uu, w) <= 1e-6);
    }
  }
}
