#pragma once

#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "jbstar/linalg.hpp"
#include "jbstar/octonion.hpp"

namespace jbstar {

class AlgebraModel;
using ModelPtr = std::shared_ptr<const AlgebraModel>;

// Coordinate vector over a model's complex basis.
struct Element {
  ModelPtr model;
  std::vector<cplx> coords;

  int dim() const { return static_cast<int>(coords.size()); }
};

Element operator+(const Element& a, const Element& b);
Element operator-(const Element& a, const Element& b);
Element operator*(cplx s, Element a);
double coord_two_norm(const Element& a);
bool same_model(const Element& a, const Element& b);
void require_same_model(const Element& a, const Element& b);

// Reinterpret coords over another model of the same dimension (base <->
// isotope moves; both live on the same Banach space).
Element with_model(const Element& a, ModelPtr m);

// A finite-dimensional JB*-algebra model. Immutable after construction;
// always held through shared_ptr so elements can reference their model.
class AlgebraModel : public std::enable_shared_from_this<AlgebraModel> {
 public:
  enum class Kind { Matrix, Spin, Albert, DirectSum, Isotope };

  // M_n(C) with the symmetrized product; complex dimension n^2.
  static ModelPtr matrix(int n);
  // Spin factor spanned by the unit and k+1 pairwise anticommuting hermitian
  // unitary generators (Pauli chains); complex dimension k+2.
  static ModelPtr spin(int k);
  // 3x3 hermitian bioctonion matrices; complex dimension 27.
  static ModelPtr albert();
  static ModelPtr direct_sum(std::vector<ModelPtr> parts);
  // u-isotope with product {x,u,y} and involution {u,x,u}; the caller is
  // responsible for u being unitary (the isotope module wraps this with the
  // unitarity check).
  static ModelPtr isotope_unchecked(ModelPtr base, const Element& u);

  Kind kind() const { return kind_; }
  int param() const { return param_; }
  int dim() const { return dim_; }
  const std::vector<ModelPtr>& parts() const { return parts_; }
  ModelPtr base() const { return base_; }
  const Element& distinguished_unitary() const;

  Element element(std::vector<cplx> coords) const;
  Element zero() const;
  Element unit() const;
  Element basis_element(int i) const;

  Element product(const Element& a, const Element& b) const;
  Element involution(const Element& a) const;
  Element triple(const Element& x, const Element& y, const Element& z) const;
  double norm(const Element& a) const;

  bool is_embedded() const { return embedded_; }
  int embed_size() const { return embed_size_; }
  CMatrix embed(const Element& a) const;
  Element unembed(const CMatrix& m) const;

  // Canonical inner product <x|y> (conjugate-linear in x): Frobenius form of
  // the embedding for embedded models, the diagonal trace form on the Albert
  // model. Multiplication by a self-adjoint element is hermitian for it and
  // triple automorphisms are unitary, which is what the spectral machinery
  // needs. Isotopes inherit the base form (their triple product is the
  // base's).
  cplx canonical_inner(const Element& x, const Element& y) const;

  // Orthonormal (real) basis of the self-adjoint part; size dim().
  const std::vector<Element>& hermitian_basis() const;
  // Gram matrix of canonical_inner over the complex basis.
  const CMatrix& canonical_gram() const;

  bool same_structure(const AlgebraModel& o) const;
  std::string name() const;

  // Direct-sum plumbing.
  std::vector<Element> split(const Element& a) const;
  Element join(const std::vector<Element>& components) const;

  // Albert cubic invariants (trace, quadratic, determinant-like); the
  // Cayley-Hamilton identity a^3 - T a^2 + S a - N 1 = 0 pins them down.
  void cubic_invariants(const Element& a, cplx& t, cplx& s, cplx& n) const;

 private:
  AlgebraModel() = default;

  Element product_albert(const Element& a, const Element& b) const;
  double norm_albert(const Element& a) const;

  Kind kind_ = Kind::Matrix;
  int param_ = 0;
  int dim_ = 0;
  bool embedded_ = false;
  int embed_size_ = 0;
  std::vector<cplx> unit_coords_;
  std::vector<CMatrix> basis_mats_;   // embedded models
  std::vector<double> basis_sq_norm_; // Frobenius norms^2 of basis_mats_
  std::vector<ModelPtr> parts_;
  std::vector<int> part_offsets_;
  ModelPtr base_;                         // isotope
  std::optional<Element> iso_u_;          // isotope: distinguished unitary
  CMatrix iso_twist_;                     // isotope of embedded base: embed(u)^*

  mutable std::once_flag herm_once_;
  mutable std::vector<Element> herm_basis_;
  mutable std::once_flag gram_once_;
  mutable CMatrix gram_;
};

}  // namespace jbstar
