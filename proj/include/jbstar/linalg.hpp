#pragma once

#include <complex>
#include <vector>

#include "jbstar/errors.hpp"

namespace jbstar {

using cplx = std::complex<double>;

// Dense complex matrix, row-major. All sizes here are desk scale (n <= 64),
// so the layout favors clarity over blocking.
class CMatrix {
 public:
  CMatrix() = default;
  CMatrix(int rows, int cols) : rows_(rows), cols_(cols), a_(static_cast<size_t>(rows) * cols) {}

  static CMatrix zero(int rows, int cols) { return CMatrix(rows, cols); }
  static CMatrix identity(int n);

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  cplx& operator()(int i, int j) { return a_[static_cast<size_t>(i) * cols_ + j]; }
  const cplx& operator()(int i, int j) const { return a_[static_cast<size_t>(i) * cols_ + j]; }

  cplx* data() { return a_.data(); }
  const cplx* data() const { return a_.data(); }

  bool all_finite() const;

  CMatrix& operator+=(const CMatrix& o);
  CMatrix& operator-=(const CMatrix& o);
  CMatrix& operator*=(cplx s);

 private:
  int rows_ = 0, cols_ = 0;
  std::vector<cplx> a_;
};

CMatrix operator+(CMatrix a, const CMatrix& b);
CMatrix operator-(CMatrix a, const CMatrix& b);
CMatrix operator*(cplx s, CMatrix a);
CMatrix operator*(const CMatrix& a, const CMatrix& b);

CMatrix adjoint(const CMatrix& a);
CMatrix transpose(const CMatrix& a);
CMatrix conj(const CMatrix& a);

double frobenius_norm(const CMatrix& a);
double max_abs(const CMatrix& a);
cplx trace(const CMatrix& a);

// Kronecker product; used to build Clifford generator chains.
CMatrix kron(const CMatrix& a, const CMatrix& b);

namespace kernels {

// Serial reference and OpenMP variant of the dense multiply. The parallel
// kernel splits over output rows, so each entry is accumulated in the same
// order as the reference and the results agree bit for bit.
CMatrix gemm_serial(const CMatrix& a, const CMatrix& b);
CMatrix gemm_parallel(const CMatrix& a, const CMatrix& b);
CMatrix gemm(const CMatrix& a, const CMatrix& b);

// Process-wide switch consulted by gemm() and the suite drivers.
void set_parallel_enabled(bool enabled);
bool parallel_enabled();

}  // namespace kernels

struct EigenResult {
  std::vector<cplx> eigenvalues;
  CMatrix eigenvectors;  // columns, orthonormal
  double residual = 0.0; // bound on ||A V - V diag||_F and ||V*V - I||_F
};

// Complex Hermitian eigendecomposition by cyclic Jacobi sweeps.
// Eigenvalues come back real (zero imaginary part), sorted ascending.
EigenResult eig_hermitian(const CMatrix& a);

// Normal-matrix eigendecomposition via the Hermitian/skew split
// H=(A+A*)/2, K=(A-A*)/(2i) and joint diagonalization: eigenspaces of H
// are clustered at 1e-8 relative tolerance and K is rediagonalized inside
// each cluster.
EigenResult eig_normal(const CMatrix& a);

// Largest singular value.
double operator_norm(const CMatrix& a);
double smallest_singular_value(const CMatrix& a);

// Solve A X = B by LU with partial pivoting.
CMatrix lu_solve(const CMatrix& a, const CMatrix& b);

// Cholesky factor R (upper triangular, A = R* R) of a Hermitian positive
// definite matrix.
CMatrix cholesky_upper(const CMatrix& a);
CMatrix solve_upper_triangular(const CMatrix& r, const CMatrix& b);
CMatrix inverse(const CMatrix& a);

}  // namespace jbstar
