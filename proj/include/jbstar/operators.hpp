#pragma once

#include <functional>
#include <vector>

#include "jbstar/model.hpp"

namespace jbstar {

enum class Linearity { Complex, Conjugate, Real };

// Linear map between models, stored as a real matrix on realified
// coordinates (re; im) so conjugate-linear and real-linear maps compose with
// complex-linear ones without special cases.
class LinearOperator {
 public:
  LinearOperator() = default;

  static LinearOperator from_complex_matrix(ModelPtr source, ModelPtr target, const CMatrix& m);
  static LinearOperator from_conjugate_matrix(ModelPtr source, ModelPtr target, const CMatrix& m);
  static LinearOperator from_function(ModelPtr source, ModelPtr target,
                                      const std::function<Element(const Element&)>& f);
  static LinearOperator identity(ModelPtr m);

  const ModelPtr& source() const { return source_; }
  const ModelPtr& target() const { return target_; }
  Linearity linearity() const { return flag_; }
  const CMatrix& real_matrix() const { return real_; }
  CMatrix complex_matrix() const;  // requires Complex linearity

  Element apply(const Element& x) const;
  LinearOperator compose(const LinearOperator& inner) const;  // this after inner
  LinearOperator scaled(double s) const;
  LinearOperator plus(const LinearOperator& o) const;
  LinearOperator minus(const LinearOperator& o) const;

  // Largest singular value over realified coordinates.
  double op_norm() const;

 private:
  ModelPtr source_, target_;
  Linearity flag_ = Linearity::Real;
  CMatrix real_;  // 2*dim(target) x 2*dim(source), real entries
};

CMatrix realify_columns(const std::vector<cplx>& coords);  // 2d x 1
std::vector<cplx> unrealify_column(const CMatrix& col);

// U_{a,b}(x) = (a o x) o b + (b o x) o a - (a o b) o x; U_a = U_{a,a}.
LinearOperator u_operator(const Element& a, const Element& b);
LinearOperator u_operator(const Element& a);
// Multiplication operator x -> a o x.
LinearOperator mult_operator(const Element& a);
// L(x,y): z -> {x,y,z} (complex-linear); Q(e): x -> {e,x,e} (conjugate-linear).
LinearOperator l_operator(const Element& x, const Element& y);
LinearOperator q_operator(const Element& e);

bool is_invertible(const Element& a);
Element inverse(const Element& a);
bool is_unitary(const Element& u);
bool is_tripotent(const Element& e);

struct PeirceProjections {
  LinearOperator p2, p1, p0;
};
PeirceProjections peirce_projections(const Element& e);

// max over basis c of ||(a o c) o b - a o (c o b)||.
double operator_commute_residual(const Element& a, const Element& b);
bool operator_commute(const Element& a, const Element& b);
// Cheaper equivalent defect ||[L_a, L_b]||_F on multiplication operators;
// used on hot paths where the per-basis model-norm residual is overkill.
double commute_defect_operator(const Element& a, const Element& b);
double central_defect_operator(const Element& a);
double central_residual(const Element& a);
bool is_central(const Element& a);
// All self-adjoint central idempotents (subset sums of the minimal ones).
std::vector<Element> central_projections(const ModelPtr& m);

Element exp_element(const Element& a);

struct SpectralData {
  std::vector<cplx> eigenvalues;      // clustered, distinct
  std::vector<Element> projections;   // idempotents summing to the unit
  Element generator;
  bool degenerate = false;            // clusters merged below 1e-6 separation
};

// Spectral decomposition inside the unital subalgebra generated by a normal
// element and its adjoint; projections come from Lagrange interpolation
// evaluated in the algebra.
SpectralData spectral_decompose(const Element& a);

Element functional_calculus(const Element& a, const std::function<cplx(cplx)>& f);
// Principal logarithm of a unitary: u = exp(i h), spectrum of h in (-pi, pi].
// Throws BranchCut when an eigenvalue sits within 1e-8 of the cut at
// -e^{i branch_angle}.
Element log_unitary(const Element& u, double branch_angle = 0.0);
Element sqrt_unitary(const Element& u);

struct DerivationCheck {
  double leibniz_residual = 0.0;   // max over sampled triples
  double unit_skew_residual = 0.0; // ||D(1)* + D(1)||
};
DerivationCheck triple_derivation_check(const LinearOperator& d, int samples = 200,
                                        std::uint64_t seed = 0);

}  // namespace jbstar
