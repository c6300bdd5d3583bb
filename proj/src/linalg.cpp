#include "jbstar/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace jbstar {

CMatrix CMatrix::identity(int n) {
  CMatrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

bool CMatrix::all_finite() const {
  for (const cplx& z : a_) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  }
  return true;
}

CMatrix& CMatrix::operator+=(const CMatrix& o) {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw InvalidParameter("matrix shape mismatch in +=");
  for (size_t i = 0; i < a_.size(); ++i) a_[i] += o.a_[i];
  return *this;
}

CMatrix& CMatrix::operator-=(const CMatrix& o) {
  if (rows_ != o.rows_ || cols_ != o.cols_) throw InvalidParameter("matrix shape mismatch in -=");
  for (size_t i = 0; i < a_.size(); ++i) a_[i] -= o.a_[i];
  return *this;
}

CMatrix& CMatrix::operator*=(cplx s) {
  for (cplx& z : a_) z *= s;
  return *this;
}

CMatrix operator+(CMatrix a, const CMatrix& b) { return a += b; }
CMatrix operator-(CMatrix a, const CMatrix& b) { return a -= b; }
CMatrix operator*(cplx s, CMatrix a) { return a *= s; }
CMatrix operator*(const CMatrix& a, const CMatrix& b) { return kernels::gemm(a, b); }

CMatrix adjoint(const CMatrix& a) {
  CMatrix r(a.cols(), a.rows());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) r(j, i) = std::conj(a(i, j));
  return r;
}

CMatrix transpose(const CMatrix& a) {
  CMatrix r(a.cols(), a.rows());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) r(j, i) = a(i, j);
  return r;
}

CMatrix conj(const CMatrix& a) {
  CMatrix r(a.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) r(i, j) = std::conj(a(i, j));
  return r;
}

double frobenius_norm(const CMatrix& a) {
  double s = 0.0;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) s += std::norm(a(i, j));
  return std::sqrt(s);
}

double max_abs(const CMatrix& a) {
  double m = 0.0;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) m = std::max(m, std::abs(a(i, j)));
  return m;
}

cplx trace(const CMatrix& a) {
  cplx t = 0.0;
  for (int i = 0; i < std::min(a.rows(), a.cols()); ++i) t += a(i, i);
  return t;
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix r(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      for (int p = 0; p < b.rows(); ++p)
        for (int q = 0; q < b.cols(); ++q)
          r(i * b.rows() + p, j * b.cols() + q) = a(i, j) * b(p, q);
  return r;
}

namespace kernels {

namespace {
bool g_parallel = true;
constexpr int kParallelMinDim = 48;

inline void gemm_row(const CMatrix& a, const CMatrix& b, CMatrix& c, int i) {
  const int n = a.cols();
  const int m = b.cols();
  for (int k = 0; k < n; ++k) {
    const cplx aik = a(i, k);
    if (aik == cplx(0.0)) continue;
    const cplx* brow = b.data() + static_cast<size_t>(k) * m;
    cplx* crow = c.data() + static_cast<size_t>(i) * m;
    for (int j = 0; j < m; ++j) crow[j] += aik * brow[j];
  }
}
}  // namespace

void set_parallel_enabled(bool enabled) { g_parallel = enabled; }
bool parallel_enabled() { return g_parallel; }

CMatrix gemm_serial(const CMatrix& a, const CMatrix& b) {
  if (a.cols() != b.rows()) throw InvalidParameter("gemm shape mismatch");
  CMatrix c(a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i) gemm_row(a, b, c, i);
  return c;
}

CMatrix gemm_parallel(const CMatrix& a, const CMatrix& b) {
  if (a.cols() != b.rows()) throw InvalidParameter("gemm shape mismatch");
  CMatrix c(a.rows(), b.cols());
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
  for (int i = 0; i < a.rows(); ++i) gemm_row(a, b, c, i);
  return c;
}

CMatrix gemm(const CMatrix& a, const CMatrix& b) {
  if (g_parallel && a.rows() >= kParallelMinDim) return gemm_parallel(a, b);
  return gemm_serial(a, b);
}

}  // namespace kernels

namespace {

double off_diagonal_norm(const CMatrix& a) {
  double s = 0.0;
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      if (i != j) s += std::norm(a(i, j));
  return std::sqrt(s);
}

// One complex Jacobi rotation zeroing a(p,q). Updates a (Hermitian) and
// accumulates the rotation into v.
void jacobi_rotate(CMatrix& a, CMatrix& v, int p, int q) {
  const cplx apq = a(p, q);
  const double b = std::abs(apq);
  if (b == 0.0) return;
  const cplx phase = apq / b;  // a(p,q) = b * phase
  const double app = a(p, p).real();
  const double aqq = a(q, q).real();
  const double tau = (aqq - app) / (2.0 * b);
  // smaller-magnitude root of t^2 - 2 tau t - 1 = 0 for this G convention
  const double t = (tau >= 0.0) ? -1.0 / (tau + std::sqrt(1.0 + tau * tau))
                                : 1.0 / (-tau + std::sqrt(1.0 + tau * tau));
  const double c = 1.0 / std::sqrt(1.0 + t * t);
  const double s = t * c;

  // Columns transform by G = [[c, -s*phase],[s*conj(phase), c]] acting on
  // (p,q); rows by G*.
  const int n = a.rows();
  for (int k = 0; k < n; ++k) {
    const cplx akp = a(k, p);
    const cplx akq = a(k, q);
    a(k, p) = c * akp + s * std::conj(phase) * akq;
    a(k, q) = -s * phase * akp + c * akq;
  }
  for (int k = 0; k < n; ++k) {
    const cplx apk = a(p, k);
    const cplx aqk = a(q, k);
    a(p, k) = c * apk + s * phase * aqk;
    a(q, k) = -s * std::conj(phase) * apk + c * aqk;
  }
  a(p, q) = 0.0;
  a(q, p) = 0.0;
  a(p, p) = cplx(a(p, p).real(), 0.0);
  a(q, q) = cplx(a(q, q).real(), 0.0);
  for (int k = 0; k < n; ++k) {
    const cplx vkp = v(k, p);
    const cplx vkq = v(k, q);
    v(k, p) = c * vkp + s * std::conj(phase) * vkq;
    v(k, q) = -s * phase * vkp + c * vkq;
  }
}

void sort_eigen(EigenResult& r, bool by_real_then_imag) {
  const int n = static_cast<int>(r.eigenvalues.size());
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int i, int j) {
    const cplx a = r.eigenvalues[i];
    const cplx b = r.eigenvalues[j];
    if (by_real_then_imag && a.real() != b.real()) return a.real() < b.real();
    if (!by_real_then_imag) {
      if (a.real() != b.real()) return a.real() < b.real();
    }
    return a.imag() < b.imag();
  });
  std::vector<cplx> ev(n);
  CMatrix vecs(r.eigenvectors.rows(), n);
  for (int j = 0; j < n; ++j) {
    ev[j] = r.eigenvalues[idx[j]];
    for (int i = 0; i < r.eigenvectors.rows(); ++i) vecs(i, j) = r.eigenvectors(i, idx[j]);
  }
  r.eigenvalues = std::move(ev);
  r.eigenvectors = std::move(vecs);
}

double eigen_residual(const CMatrix& a, const EigenResult& r) {
  const int n = a.rows();
  CMatrix av = a * r.eigenvectors;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) av(i, j) -= r.eigenvectors(i, j) * r.eigenvalues[j];
  CMatrix vv = adjoint(r.eigenvectors) * r.eigenvectors;
  for (int i = 0; i < n; ++i) vv(i, i) -= 1.0;
  return std::max(frobenius_norm(av), frobenius_norm(vv));
}

}  // namespace

EigenResult eig_hermitian(const CMatrix& a) {
  if (a.rows() != a.cols()) throw InvalidParameter("eig_hermitian needs a square matrix");
  const int n = a.rows();
  const double anorm = frobenius_norm(a);
  {
    CMatrix d = a - adjoint(a);
    if (frobenius_norm(d) > 1e-12 * std::max(1.0, anorm)) {
      throw NotHermitian("eig_hermitian: ||A - A*|| too large");
    }
  }
  CMatrix w = a;
  // Exact Hermitian symmetrization so Jacobi sees clean data.
  for (int i = 0; i < n; ++i) {
    w(i, i) = cplx(w(i, i).real(), 0.0);
    for (int j = i + 1; j < n; ++j) {
      cplx m = 0.5 * (w(i, j) + std::conj(w(j, i)));
      w(i, j) = m;
      w(j, i) = std::conj(m);
    }
  }
  CMatrix v = CMatrix::identity(n);
  const double tol = 1e-14 * std::max(1.0, anorm);
  const int max_sweeps = 60;
  int sweep = 0;
  while (off_diagonal_norm(w) > tol) {
    if (++sweep > max_sweeps) throw NoConvergence("eig_hermitian: Jacobi sweep budget exhausted");
    for (int p = 0; p < n; ++p)
      for (int q = p + 1; q < n; ++q)
        if (std::abs(w(p, q)) > tol / (n * n + 1.0)) jacobi_rotate(w, v, p, q);
  }
  EigenResult r;
  r.eigenvalues.resize(n);
  for (int i = 0; i < n; ++i) r.eigenvalues[i] = cplx(w(i, i).real(), 0.0);
  r.eigenvectors = std::move(v);
  sort_eigen(r, true);
  r.residual = eigen_residual(a, r);
  if (r.residual > 1e-10 * std::max(1.0, anorm)) {
    throw NoConvergence("eig_hermitian: residual above contract bound");
  }
  return r;
}

EigenResult eig_normal(const CMatrix& a) {
  if (a.rows() != a.cols()) throw InvalidParameter("eig_normal needs a square matrix");
  const int n = a.rows();
  const double anorm = frobenius_norm(a);
  {
    CMatrix comm = a * adjoint(a) - adjoint(a) * a;
    if (frobenius_norm(comm) > 1e-10 * std::max(1.0, anorm * anorm)) {
      throw NotNormal("eig_normal: ||AA* - A*A|| too large");
    }
  }
  CMatrix h = a, k = a;
  {
    CMatrix as = adjoint(a);
    h += as;
    h *= 0.5;
    k -= as;
    k *= cplx(0.0, -0.5);
  }
  EigenResult eh = eig_hermitian(h);
  // Cluster eigenvalues of H, then rediagonalize K compressed to each
  // cluster. Clustering tolerance starts at 1e-8 relative; when H has
  // eigenvalues just above the tolerance that K separates strongly, the
  // split clusters mix and the residual shows it, so the tolerance
  // escalates until the joint residual meets the contract.
  const double bound = 1e-9 * std::max(1.0, anorm);
  EigenResult r;
  for (double ctol_rel = 1e-8; ctol_rel <= 1.1e-3; ctol_rel *= 10.0) {
    const double ctol = ctol_rel * std::max(1.0, anorm);
    r = EigenResult{};
    r.eigenvalues.assign(n, 0.0);
    r.eigenvectors = CMatrix(n, n);
    int start = 0;
    while (start < n) {
      int end = start + 1;
      while (end < n && eh.eigenvalues[end].real() - eh.eigenvalues[end - 1].real() <= ctol) ++end;
      const int m = end - start;
      CMatrix vc(n, m);
      for (int j = 0; j < m; ++j)
        for (int i = 0; i < n; ++i) vc(i, j) = eh.eigenvectors(i, start + j);
      CMatrix kc = adjoint(vc) * (k * vc);
      EigenResult ek = eig_hermitian(kc);
      CMatrix vref = vc * ek.eigenvectors;
      // Rayleigh quotients on the full matrix pair each joint eigenvector
      // with its own eigenvalue; the sorted H value at this position can
      // belong to a different vector inside the cluster.
      CMatrix av = a * vref;
      for (int j = 0; j < m; ++j) {
        cplx lam = 0.0;
        for (int i = 0; i < n; ++i) lam += std::conj(vref(i, j)) * av(i, j);
        r.eigenvalues[start + j] = lam;
        for (int i = 0; i < n; ++i) r.eigenvectors(i, start + j) = vref(i, j);
      }
      start = end;
    }
    sort_eigen(r, false);
    r.residual = eigen_residual(a, r);
    if (r.residual <= bound) return r;
  }
  throw NoConvergence("eig_normal: residual above contract bound");
}

double operator_norm(const CMatrix& a) {
  if (a.rows() == 0 || a.cols() == 0) return 0.0;
  // sigma_max = sqrt(lambda_max(A* A)); use the smaller Gram side.
  CMatrix g = (a.rows() >= a.cols()) ? adjoint(a) * a : a * adjoint(a);
  EigenResult r = eig_hermitian(g);
  double lmax = r.eigenvalues.back().real();
  return std::sqrt(std::max(0.0, lmax));
}

double smallest_singular_value(const CMatrix& a) {
  if (a.rows() == 0 || a.cols() == 0) return 0.0;
  CMatrix g = (a.rows() >= a.cols()) ? adjoint(a) * a : a * adjoint(a);
  EigenResult r = eig_hermitian(g);
  return std::sqrt(std::max(0.0, r.eigenvalues.front().real()));
}

CMatrix lu_solve(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != a.cols() || a.rows() != b.rows()) throw InvalidParameter("lu_solve shape mismatch");
  const int n = a.rows();
  const int m = b.cols();
  CMatrix lu = a;
  CMatrix x = b;
  std::vector<int> piv(n);
  std::iota(piv.begin(), piv.end(), 0);
  for (int col = 0; col < n; ++col) {
    int best = col;
    double bmag = std::abs(lu(col, col));
    for (int i = col + 1; i < n; ++i) {
      if (std::abs(lu(i, col)) > bmag) {
        bmag = std::abs(lu(i, col));
        best = i;
      }
    }
    if (bmag == 0.0) throw NotInvertible("lu_solve: singular matrix");
    if (best != col) {
      for (int j = 0; j < n; ++j) std::swap(lu(col, j), lu(best, j));
      for (int j = 0; j < m; ++j) std::swap(x(col, j), x(best, j));
    }
    const cplx d = lu(col, col);
    for (int i = col + 1; i < n; ++i) {
      const cplx f = lu(i, col) / d;
      lu(i, col) = f;
      for (int j = col + 1; j < n; ++j) lu(i, j) -= f * lu(col, j);
      for (int j = 0; j < m; ++j) x(i, j) -= f * x(col, j);
    }
  }
  for (int col = n - 1; col >= 0; --col) {
    const cplx d = lu(col, col);
    for (int j = 0; j < m; ++j) x(col, j) /= d;
    for (int i = 0; i < col; ++i) {
      const cplx f = lu(i, col);
      for (int j = 0; j < m; ++j) x(i, j) -= f * x(col, j);
    }
  }
  return x;
}

CMatrix cholesky_upper(const CMatrix& a) {
  if (a.rows() != a.cols()) throw InvalidParameter("cholesky needs a square matrix");
  const int n = a.rows();
  CMatrix r(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      cplx s = a(i, j);
      for (int k = 0; k < i; ++k) s -= std::conj(r(k, i)) * r(k, j);
      if (i == j) {
        const double d = s.real();
        if (d <= 0.0) throw NotInvertible("cholesky: matrix not positive definite");
        r(i, i) = std::sqrt(d);
      } else {
        r(i, j) = s / r(i, i).real();
      }
    }
  }
  return r;
}

CMatrix solve_upper_triangular(const CMatrix& r, const CMatrix& b) {
  const int n = r.rows();
  const int m = b.cols();
  CMatrix x = b;
  for (int col = n - 1; col >= 0; --col) {
    for (int j = 0; j < m; ++j) x(col, j) /= r(col, col);
    for (int i = 0; i < col; ++i)
      for (int j = 0; j < m; ++j) x(i, j) -= r(i, col) * x(col, j);
  }
  return x;
}

CMatrix inverse(const CMatrix& a) { return lu_solve(a, CMatrix::identity(a.rows())); }

}  // namespace jbstar
