#pragma once

// Test-only brute-force oracle: a tiny self-contained complex matrix
// calculator, independent of the library's kernels. Expected values for the
// embedded models are computed here from the raw associative formulas
// (a o b = (ab+ba)/2, U_a(x) = axa, {x,y,z} = (x y* z + z y* x)/2).

#include <complex>
#include <vector>

namespace oracle {

using cx = std::complex<double>;

struct Mat {
  int n = 0;
  std::vector<cx> a;

  Mat() = default;
  explicit Mat(int n_) : n(n_), a(static_cast<size_t>(n_) * n_) {}
  cx& at(int i, int j) { return a[static_cast<size_t>(i) * n + j]; }
  const cx& at(int i, int j) const { return a[static_cast<size_t>(i) * n + j]; }

  static Mat id(int n) {
    Mat m(n);
    for (int i = 0; i < n; ++i) m.at(i, i) = 1.0;
    return m;
  }
};

inline Mat mul(const Mat& x, const Mat& y) {
  Mat r(x.n);
  for (int i = 0; i < x.n; ++i)
    for (int j = 0; j < x.n; ++j) {
      cx s = 0.0;
      for (int k = 0; k < x.n; ++k) s += x.at(i, k) * y.at(k, j);
      r.at(i, j) = s;
    }
  return r;
}

inline Mat add(const Mat& x, const Mat& y) {
  Mat r = x;
  for (size_t i = 0; i < r.a.size(); ++i) r.a[i] += y.a[i];
  return r;
}

inline Mat sub(const Mat& x, const Mat& y) {
  Mat r = x;
  for (size_t i = 0; i < r.a.size(); ++i) r.a[i] -= y.a[i];
  return r;
}

inline Mat scale(cx s, const Mat& x) {
  Mat r = x;
  for (auto& z : r.a) z *= s;
  return r;
}

inline Mat dagger(const Mat& x) {
  Mat r(x.n);
  for (int i = 0; i < x.n; ++i)
    for (int j = 0; j < x.n; ++j) r.at(j, i) = std::conj(x.at(i, j));
  return r;
}

inline double fro(const Mat& x) {
  double s = 0.0;
  for (const auto& z : x.a) s += std::norm(z);
  return std::sqrt(s);
}

inline Mat jordan(const Mat& x, const Mat& y) { return scale(0.5, add(mul(x, y), mul(y, x))); }

inline Mat u_op(const Mat& a, const Mat& x) { return mul(mul(a, x), a); }

inline Mat triple(const Mat& x, const Mat& y, const Mat& z) {
  Mat ys = dagger(y);
  return scale(0.5, add(mul(mul(x, ys), z), mul(mul(z, ys), x)));
}

}  // namespace oracle
