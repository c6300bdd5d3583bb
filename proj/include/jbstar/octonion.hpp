#pragma once

#include <array>
#include <complex>

namespace jbstar {

// Bioctonion: octonion with complex coordinates. Basis e0..e7 with e0 the
// unit. The multiplication table is fixed by Cayley-Dickson doubling from the
// quaternions: writing x = (a, b) and y = (c, d) as pairs of quaternions,
//
//   x * y = (a c - conj(d) b,  d a + b conj(c))
//
// where conj is quaternion conjugation, and the quaternions themselves use
// the standard i j = k orientation. Expanded once at startup, this gives
//
//   e_i e_j = sign[i][j] * e_{index[i][j]}
//
// with e1..e7 = i, j, k, l, il, jl, kl. Conjugation negates e1..e7. The
// table below is the single frozen convention for the whole project; the
// alternativity and norm-composition tests pin it down.
struct Octonion {
  std::array<std::complex<double>, 8> c{};

  static Octonion unit() {
    Octonion o;
    o.c[0] = 1.0;
    return o;
  }
};

Octonion operator+(const Octonion& x, const Octonion& y);
Octonion operator-(const Octonion& x, const Octonion& y);
Octonion operator*(const Octonion& x, const Octonion& y);
Octonion operator*(const std::complex<double>& s, const Octonion& x);

// Octonion conjugation x -> x0 - x1 e1 - ... - x7 e7 (complex coordinates
// untouched).
Octonion oct_conj(const Octonion& x);

// Complex-bilinear norm form n(x) = x conj(x) = sum x_i^2 (a complex scalar
// for bioctonions).
std::complex<double> oct_norm_form(const Octonion& x);

// Scalar (e0) coordinate.
std::complex<double> oct_scalar(const Octonion& x);

// sign[i][j] in {-1,+1} and index[i][j] of the basis product e_i e_j.
const std::array<std::array<int, 8>, 8>& oct_table_sign();
const std::array<std::array<int, 8>, 8>& oct_table_index();

}  // namespace jbstar
