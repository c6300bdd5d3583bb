#include "jbstar/octonion.hpp"

#include <cmath>
#include <cstdlib>

namespace jbstar {

namespace {

struct Quat {
  std::array<double, 4> c{};
};

Quat qmul(const Quat& a, const Quat& b) {
  // 1, i, j, k with ij = k.
  Quat r;
  r.c[0] = a.c[0] * b.c[0] - a.c[1] * b.c[1] - a.c[2] * b.c[2] - a.c[3] * b.c[3];
  r.c[1] = a.c[0] * b.c[1] + a.c[1] * b.c[0] + a.c[2] * b.c[3] - a.c[3] * b.c[2];
  r.c[2] = a.c[0] * b.c[2] - a.c[1] * b.c[3] + a.c[2] * b.c[0] + a.c[3] * b.c[1];
  r.c[3] = a.c[0] * b.c[3] + a.c[1] * b.c[2] - a.c[2] * b.c[1] + a.c[3] * b.c[0];
  return r;
}

Quat qconj(const Quat& a) { return Quat{{a.c[0], -a.c[1], -a.c[2], -a.c[3]}}; }

struct OctReal {
  std::array<double, 8> c{};
};

OctReal omul(const OctReal& x, const OctReal& y) {
  Quat a{{x.c[0], x.c[1], x.c[2], x.c[3]}};
  Quat b{{x.c[4], x.c[5], x.c[6], x.c[7]}};
  Quat c{{y.c[0], y.c[1], y.c[2], y.c[3]}};
  Quat d{{y.c[4], y.c[5], y.c[6], y.c[7]}};
  Quat lo = qmul(a, c), hi = qmul(d, a);
  Quat t1 = qmul(qconj(d), b), t2 = qmul(b, qconj(c));
  OctReal r;
  for (int i = 0; i < 4; ++i) {
    r.c[i] = lo.c[i] - t1.c[i];
    r.c[4 + i] = hi.c[i] + t2.c[i];
  }
  return r;
}

struct Tables {
  std::array<std::array<int, 8>, 8> sign{};
  std::array<std::array<int, 8>, 8> index{};
  Tables() {
    for (int i = 0; i < 8; ++i) {
      for (int j = 0; j < 8; ++j) {
        OctReal ei{}, ej{};
        ei.c[i] = 1.0;
        ej.c[j] = 1.0;
        OctReal p = omul(ei, ej);
        int idx = -1;
        for (int k = 0; k < 8; ++k) {
          if (std::abs(p.c[k]) > 0.5) {
            idx = k;
            break;
          }
        }
        if (idx < 0) std::abort();
        index[i][j] = idx;
        sign[i][j] = p.c[idx] > 0 ? 1 : -1;
      }
    }
  }
};

const Tables& tables() {
  static const Tables t;
  return t;
}

}  // namespace

Octonion operator+(const Octonion& x, const Octonion& y) {
  Octonion r;
  for (int i = 0; i < 8; ++i) r.c[i] = x.c[i] + y.c[i];
  return r;
}

Octonion operator-(const Octonion& x, const Octonion& y) {
  Octonion r;
  for (int i = 0; i < 8; ++i) r.c[i] = x.c[i] - y.c[i];
  return r;
}

Octonion operator*(const Octonion& x, const Octonion& y) {
  const Tables& t = tables();
  Octonion r;
  for (int i = 0; i < 8; ++i) {
    const std::complex<double> xi = x.c[i];
    if (xi == std::complex<double>(0.0)) continue;
    for (int j = 0; j < 8; ++j) {
      const std::complex<double> yj = y.c[j];
      if (yj == std::complex<double>(0.0)) continue;
      r.c[t.index[i][j]] += static_cast<double>(t.sign[i][j]) * xi * yj;
    }
  }
  return r;
}

Octonion operator*(const std::complex<double>& s, const Octonion& x) {
  Octonion r;
  for (int i = 0; i < 8; ++i) r.c[i] = s * x.c[i];
  return r;
}

Octonion oct_conj(const Octonion& x) {
  Octonion r = x;
  for (int i = 1; i < 8; ++i) r.c[i] = -r.c[i];
  return r;
}

std::complex<double> oct_norm_form(const Octonion& x) {
  std::complex<double> s = 0.0;
  for (int i = 0; i < 8; ++i) s += x.c[i] * x.c[i];
  return s;
}

std::complex<double> oct_scalar(const Octonion& x) { return x.c[0]; }

const std::array<std::array<int, 8>, 8>& oct_table_sign() { return tables().sign; }
const std::array<std::array<int, 8>, 8>& oct_table_index() { return tables().index; }

}  // namespace jbstar
