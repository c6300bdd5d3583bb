#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "jbstar/linalg.hpp"
#include "jbstar/rng.hpp"

using namespace jbstar;

namespace {

CMatrix random_matrix(int n, Rng& rng) {
  CMatrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = rng.complex_normal();
  return m;
}

CMatrix random_hermitian(int n, Rng& rng) {
  CMatrix m = random_matrix(n, rng);
  CMatrix h = m + adjoint(m);
  h *= 0.5;
  return h;
}

CMatrix random_unitary(int n, Rng& rng) {
  // eigenvectors of a random hermitian matrix
  return eig_hermitian(random_hermitian(n, rng)).eigenvectors;
}

}  // namespace

TEST_CASE("eig_hermitian on diagonal input") {
  CMatrix a(3, 3);
  a(0, 0) = 3.0;
  a(1, 1) = 1.0;
  a(2, 2) = 2.0;
  EigenResult r = eig_hermitian(a);
  CHECK(r.eigenvalues[0].real() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.eigenvalues[1].real() == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(r.eigenvalues[2].real() == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("eig_hermitian on the zero matrix") {
  CMatrix a(4, 4);
  EigenResult r = eig_hermitian(a);
  for (const cplx& ev : r.eigenvalues) CHECK(std::abs(ev) == 0.0);
  CMatrix d = r.eigenvectors - CMatrix::identity(4);
  CHECK(frobenius_norm(d) == 0.0);
}

TEST_CASE("eig_hermitian on the 2x2 flip") {
  // Characteristic polynomial x^2 - 1 by hand: eigenvalues -1, 1.
  CMatrix a(2, 2);
  a(0, 1) = 1.0;
  a(1, 0) = 1.0;
  EigenResult r = eig_hermitian(a);
  CHECK(r.eigenvalues[0].real() == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(r.eigenvalues[1].real() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("eig_hermitian rejects non-hermitian input") {
  CMatrix a(2, 2);
  a(0, 1) = 1.0;
  CHECK_THROWS_AS(eig_hermitian(a), NotHermitian);
}

TEST_CASE("random hermitian reconstruction residual") {
  for (int n : {2, 5, 8, 12}) {
    for (int trial = 0; trial < 5; ++trial) {
      Rng rng = Rng::derive(101, "eigh", n * 100 + trial);
      CMatrix a = random_hermitian(n, rng);
      EigenResult r = eig_hermitian(a);
      CMatrix recon(n, n);
      for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j)
            recon(i, j) += r.eigenvalues[k].real() * r.eigenvectors(i, k) * std::conj(r.eigenvectors(j, k));
      CHECK(frobenius_norm(a - recon) <= 1e-9 * frobenius_norm(a));
    }
  }
}

TEST_CASE("eig_normal on diagonal and rotation matrices") {
  {
    EigenResult r = eig_normal(CMatrix::identity(3));
    for (const cplx& ev : r.eigenvalues) CHECK(std::abs(ev - 1.0) < 1e-12);
  }
  {
    CMatrix a(2, 2);
    a(0, 0) = cplx(0.0, 1.0);
    a(1, 1) = cplx(0.0, -1.0);
    EigenResult r = eig_normal(a);
    CHECK(std::abs(r.eigenvalues[0] - cplx(0.0, -1.0)) < 1e-12);
    CHECK(std::abs(r.eigenvalues[1] - cplx(0.0, 1.0)) < 1e-12);
  }
  {
    // rotation by pi/3: eigenvalues e^{+-i pi/3} in closed form
    const double th = M_PI / 3.0;
    CMatrix a(2, 2);
    a(0, 0) = std::cos(th);
    a(0, 1) = -std::sin(th);
    a(1, 0) = std::sin(th);
    a(1, 1) = std::cos(th);
    EigenResult r = eig_normal(a);
    const cplx lo = std::polar(1.0, -th), hi = std::polar(1.0, th);
    CHECK(std::abs(r.eigenvalues[0] - lo) < 1e-10);
    CHECK(std::abs(r.eigenvalues[1] - hi) < 1e-10);
  }
}

TEST_CASE("eig_normal keeps unitary spectra on the circle") {
  for (int trial = 0; trial < 20; ++trial) {
    Rng rng = Rng::derive(202, "eign", trial);
    CMatrix u = random_unitary(6, rng);
    EigenResult r = eig_normal(u);
    for (const cplx& ev : r.eigenvalues) CHECK(std::abs(std::abs(ev) - 1.0) < 1e-9);
    CHECK(r.residual <= 1e-9 * std::max(1.0, frobenius_norm(u)));
  }
}

TEST_CASE("eig_normal rejects non-normal input") {
  CMatrix a(2, 2);
  a(0, 1) = 1.0;
  CHECK_THROWS_AS(eig_normal(a), NotNormal);
}

TEST_CASE("operator_norm basics") {
  {
    CMatrix a(2, 2);
    a(0, 0) = 2.0;
    a(1, 1) = -1.0;
    CHECK(operator_norm(a) == doctest::Approx(2.0).epsilon(1e-12));
  }
  CHECK(operator_norm(CMatrix(3, 3)) == 0.0);
  {
    // A*A = diag(0, 9), sigma_max = 3
    CMatrix a(2, 2);
    a(0, 1) = 3.0;
    CHECK(operator_norm(a) == doctest::Approx(3.0).epsilon(1e-12));
  }
}

TEST_CASE("operator_norm satisfies the C*-identity and submultiplicativity") {
  for (int trial = 0; trial < 100; ++trial) {
    Rng rng = Rng::derive(303, "cstar", trial);
    CMatrix a = random_matrix(5, rng);
    const double na = operator_norm(a);
    const double naa = operator_norm(adjoint(a) * a);
    CHECK(std::abs(naa - na * na) <= 1e-9 * na * na);
    CMatrix b = random_matrix(5, rng);
    CHECK(operator_norm(a * b) <= na * operator_norm(b) * (1.0 + 1e-12) + 1e-12);
  }
}

TEST_CASE("lu_solve and cholesky") {
  Rng rng = Rng::derive(404, "lu", 0);
  CMatrix a = random_matrix(7, rng);
  CMatrix b = random_matrix(7, rng);
  CMatrix x = lu_solve(a, b);
  CHECK(frobenius_norm(a * x - b) <= 1e-10 * frobenius_norm(b));

  CMatrix g = adjoint(a) * a + CMatrix::identity(7);
  CMatrix r = cholesky_upper(g);
  CHECK(frobenius_norm(adjoint(r) * r - g) <= 1e-10 * frobenius_norm(g));
}

TEST_CASE("gemm parallel kernel matches the serial reference bit for bit") {
  Rng rng = Rng::derive(505, "gemm", 0);
  for (int n : {3, 17, 64}) {
    CMatrix a = random_matrix(n, rng);
    CMatrix b = random_matrix(n, rng);
    CMatrix cs = kernels::gemm_serial(a, b);
    CMatrix cp = kernels::gemm_parallel(a, b);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) CHECK(cs(i, j) == cp(i, j));
  }
}
