#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "jbstar/octonion.hpp"
#include "jbstar/rng.hpp"

using namespace jbstar;

namespace {

Octonion random_bioctonion(Rng& rng) {
  Octonion o;
  for (int i = 0; i < 8; ++i) o.c[i] = rng.complex_normal();
  return o;
}

double odist(const Octonion& a, const Octonion& b) {
  double s = 0.0;
  for (int i = 0; i < 8; ++i) s += std::norm(a.c[i] - b.c[i]);
  return std::sqrt(s);
}

double osize(const Octonion& a) {
  double s = 0.0;
  for (int i = 0; i < 8; ++i) s += std::norm(a.c[i]);
  return std::sqrt(s);
}

}  // namespace

TEST_CASE("unit and quaternion subtable") {
  const auto& idx = oct_table_index();
  const auto& sgn = oct_table_sign();
  for (int i = 0; i < 8; ++i) {
    CHECK(idx[0][i] == i);
    CHECK(sgn[0][i] == 1);
    CHECK(idx[i][0] == i);
    CHECK(sgn[i][0] == 1);
  }
  // i j = k and the doubling direction i l = il
  CHECK(idx[1][2] == 3);
  CHECK(sgn[1][2] == 1);
  CHECK(idx[1][4] == 5);
  CHECK(sgn[1][4] == 1);
  // imaginary squares are -1
  for (int i = 1; i < 8; ++i) {
    CHECK(idx[i][i] == 0);
    CHECK(sgn[i][i] == -1);
  }
  // anticommutation of distinct imaginary units
  for (int i = 1; i < 8; ++i)
    for (int j = 1; j < 8; ++j)
      if (i != j) {
        CHECK(idx[i][j] == idx[j][i]);
        CHECK(sgn[i][j] == -sgn[j][i]);
      }
}

TEST_CASE("alternativity on random bioctonions") {
  for (int trial = 0; trial < 50; ++trial) {
    Rng rng = Rng::derive(11, "alt", trial);
    Octonion x = random_bioctonion(rng);
    Octonion y = random_bioctonion(rng);
    const double scale = osize(x) * osize(x) * osize(y) + 1.0;
    CHECK(odist((x * x) * y, x * (x * y)) <= 1e-12 * scale);
    CHECK(odist((y * x) * x, y * (x * x)) <= 1e-12 * scale);
  }
}

TEST_CASE("norm form composes and conjugation reverses products") {
  for (int trial = 0; trial < 50; ++trial) {
    Rng rng = Rng::derive(12, "norm", trial);
    Octonion x = random_bioctonion(rng);
    Octonion y = random_bioctonion(rng);
    std::complex<double> lhs = oct_norm_form(x * y);
    std::complex<double> rhs = oct_norm_form(x) * oct_norm_form(y);
    CHECK(std::abs(lhs - rhs) <= 1e-11 * (1.0 + std::abs(rhs)));
    CHECK(odist(oct_conj(x * y), oct_conj(y) * oct_conj(x)) <= 1e-12 * (osize(x) * osize(y) + 1.0));
  }
}

TEST_CASE("x times conj(x) is the norm form times the unit") {
  Rng rng = Rng::derive(13, "xc", 0);
  Octonion x = random_bioctonion(rng);
  Octonion p = x * oct_conj(x);
  CHECK(std::abs(p.c[0] - oct_norm_form(x)) < 1e-12 * (1.0 + std::abs(p.c[0])));
  for (int i = 1; i < 8; ++i) CHECK(std::abs(p.c[i]) < 1e-12 * (1.0 + osize(x) * osize(x)));
}
