#include "jbstar/model.hpp"

#include <algorithm>
#include <cmath>

namespace jbstar {

namespace {

constexpr double kDependentTol = 1e-8;

CMatrix pauli(int which) {
  CMatrix m(2, 2);
  switch (which) {
    case 0:  // identity
      m(0, 0) = 1.0;
      m(1, 1) = 1.0;
      break;
    case 1:  // x
      m(0, 1) = 1.0;
      m(1, 0) = 1.0;
      break;
    case 2:  // y
      m(0, 1) = cplx(0.0, -1.0);
      m(1, 0) = cplx(0.0, 1.0);
      break;
    case 3:  // z
      m(0, 0) = 1.0;
      m(1, 1) = -1.0;
      break;
  }
  return m;
}

// Pauli chain sigma_z^{(m)} (x) g (x) I^(rest) over q qubits.
CMatrix pauli_chain(int q, int zcount, int g) {
  CMatrix m = CMatrix::identity(1);
  for (int i = 0; i < zcount; ++i) m = kron(m, pauli(3));
  if (g != 0) m = kron(m, pauli(g));
  int used = zcount + (g != 0 ? 1 : 0);
  for (int i = used; i < q; ++i) m = kron(m, pauli(0));
  return m;
}

using OctMat = std::array<std::array<Octonion, 3>, 3>;

// Coordinate layout of an Albert element: [d1 d2 d3, x1(8), x2(8), x3(8)]
// with x1 at position (2,3), x2 at (3,1), x3 at (1,2) of the hermitian
// matrix (1-indexed), and the mirrored entries octonion-conjugated.
OctMat albert_to_mat(const std::vector<cplx>& c) {
  OctMat a{};
  for (int i = 0; i < 3; ++i) a[i][i].c[0] = c[i];
  Octonion x1, x2, x3;
  for (int j = 0; j < 8; ++j) {
    x1.c[j] = c[3 + j];
    x2.c[j] = c[11 + j];
    x3.c[j] = c[19 + j];
  }
  a[1][2] = x1;
  a[2][1] = oct_conj(x1);
  a[2][0] = x2;
  a[0][2] = oct_conj(x2);
  a[0][1] = x3;
  a[1][0] = oct_conj(x3);
  return a;
}

std::vector<cplx> albert_from_herm(const OctMat& m) {
  std::vector<cplx> c(27);
  for (int i = 0; i < 3; ++i) c[i] = m[i][i].c[0];
  for (int j = 0; j < 8; ++j) {
    c[3 + j] = m[1][2].c[j];
    c[11 + j] = m[2][0].c[j];
    c[19 + j] = m[0][1].c[j];
  }
  return c;
}

Octonion oct_from_coords(const std::vector<cplx>& c, int off) {
  Octonion o;
  for (int j = 0; j < 8; ++j) o.c[j] = c[off + j];
  return o;
}

// max |root| of t^3 - T t^2 + S t - N for real coefficients with (near-)real
// roots; returns -1 when the residual safeguard rejects the closed form.
double max_abs_cubic_root(double t, double s, double n) {
  const double p = s - t * t / 3.0;
  const double q = -2.0 * t * t * t / 27.0 + t * s / 3.0 - n;
  double roots[3];
  if (p >= -1e-300) {
    const double r = std::cbrt(-q);
    roots[0] = roots[1] = roots[2] = r + t / 3.0;
  } else {
    const double m2 = 2.0 * std::sqrt(-p / 3.0);
    double cosphi = 3.0 * q / (p * m2);
    cosphi = std::min(1.0, std::max(-1.0, cosphi));
    const double phi = std::acos(cosphi);
    for (int k = 0; k < 3; ++k) roots[k] = m2 * std::cos((phi - 2.0 * M_PI * k) / 3.0) + t / 3.0;
  }
  double best = 0.0, scale = 1.0;
  for (double& r : roots) {
    for (int it = 0; it < 2; ++it) {
      const double f = ((r - t) * r + s) * r - n;
      const double df = (3.0 * r - 2.0 * t) * r + s;
      if (std::abs(df) > 1e-30) r -= f / df;
    }
    best = std::max(best, std::abs(r));
    scale = std::max(scale, std::abs(r));
  }
  for (double r : roots) {
    const double f = ((r - t) * r + s) * r - n;
    if (std::abs(f) > 1e-9 * scale * scale * scale) return -1.0;
  }
  return best;
}

}  // namespace

Element operator+(const Element& a, const Element& b) {
  require_same_model(a, b);
  Element r = a;
  for (size_t i = 0; i < r.coords.size(); ++i) r.coords[i] += b.coords[i];
  return r;
}

Element operator-(const Element& a, const Element& b) {
  require_same_model(a, b);
  Element r = a;
  for (size_t i = 0; i < r.coords.size(); ++i) r.coords[i] -= b.coords[i];
  return r;
}

Element operator*(cplx s, Element a) {
  for (cplx& z : a.coords) z *= s;
  return a;
}

double coord_two_norm(const Element& a) {
  double s = 0.0;
  for (const cplx& z : a.coords) s += std::norm(z);
  return std::sqrt(s);
}

bool same_model(const Element& a, const Element& b) { return a.model.get() == b.model.get(); }

void require_same_model(const Element& a, const Element& b) {
  if (!same_model(a, b)) throw ModelMismatch("elements belong to different models");
}

Element with_model(const Element& a, ModelPtr m) {
  if (!m || m->dim() != a.dim()) throw ModelMismatch("with_model: dimension mismatch");
  return Element{std::move(m), a.coords};
}

ModelPtr AlgebraModel::matrix(int n) {
  if (n < 1) throw InvalidParameter("matrix model needs n >= 1");
  auto m = std::shared_ptr<AlgebraModel>(new AlgebraModel());
  m->kind_ = Kind::Matrix;
  m->param_ = n;
  m->dim_ = n * n;
  m->embedded_ = true;
  m->embed_size_ = n;
  m->basis_mats_.reserve(m->dim_);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      CMatrix e(n, n);
      e(i, j) = 1.0;
      m->basis_mats_.push_back(std::move(e));
      m->basis_sq_norm_.push_back(1.0);
    }
  m->unit_coords_.assign(m->dim_, 0.0);
  for (int i = 0; i < n; ++i) m->unit_coords_[i * n + i] = 1.0;
  return m;
}

ModelPtr AlgebraModel::spin(int k) {
  if (k < 2) throw InvalidParameter("spin model needs k >= 2");
  // k+1 anticommuting hermitian unitary generators on q = ceil((k+1)/2 - 1/2)
  // qubits; see the Pauli chain construction below.
  const int gens = k + 1;
  const int q = std::max(1, gens / 2);  // gens <= 2q+1
  auto m = std::shared_ptr<AlgebraModel>(new AlgebraModel());
  m->kind_ = Kind::Spin;
  m->param_ = k;
  m->dim_ = k + 2;
  m->embedded_ = true;
  m->embed_size_ = 1 << q;
  std::vector<CMatrix> chain;
  for (int z = 0; z < q; ++z) {
    chain.push_back(pauli_chain(q, z, 1));
    chain.push_back(pauli_chain(q, z, 2));
  }
  chain.push_back(pauli_chain(q, q, 0));
  m->basis_mats_.push_back(CMatrix::identity(m->embed_size_));
  for (int i = 0; i < gens; ++i) m->basis_mats_.push_back(chain[i]);
  const double n2 = static_cast<double>(m->embed_size_);
  m->basis_sq_norm_.assign(m->dim_, n2);
  m->unit_coords_.assign(m->dim_, 0.0);
  m->unit_coords_[0] = 1.0;
  return m;
}

ModelPtr AlgebraModel::albert() {
  auto m = std::shared_ptr<AlgebraModel>(new AlgebraModel());
  m->kind_ = Kind::Albert;
  m->param_ = 0;
  m->dim_ = 27;
  m->embedded_ = false;
  m->unit_coords_.assign(27, 0.0);
  m->unit_coords_[0] = m->unit_coords_[1] = m->unit_coords_[2] = 1.0;
  return m;
}

ModelPtr AlgebraModel::direct_sum(std::vector<ModelPtr> parts) {
  if (parts.empty()) throw InvalidParameter("direct sum needs at least one summand");
  auto m = std::shared_ptr<AlgebraModel>(new AlgebraModel());
  m->kind_ = Kind::DirectSum;
  m->parts_ = std::move(parts);
  m->embedded_ = true;
  int off = 0, eoff = 0;
  for (const ModelPtr& p : m->parts_) {
    m->part_offsets_.push_back(off);
    off += p->dim();
    m->embedded_ = m->embedded_ && p->is_embedded();
    eoff += p->embed_size();
  }
  m->dim_ = off;
  m->embed_size_ = m->embedded_ ? eoff : 0;
  m->unit_coords_.assign(m->dim_, 0.0);
  for (size_t i = 0; i < m->parts_.size(); ++i) {
    const auto& u = m->parts_[i]->unit().coords;
    std::copy(u.begin(), u.end(), m->unit_coords_.begin() + m->part_offsets_[i]);
  }
  return m;
}

ModelPtr AlgebraModel::isotope_unchecked(ModelPtr base, const Element& u) {
  if (!base || u.model.get() != base.get()) throw ModelMismatch("isotope unitary must belong to the base model");
  auto m = std::shared_ptr<AlgebraModel>(new AlgebraModel());
  m->kind_ = Kind::Isotope;
  m->dim_ = base->dim();
  m->base_ = base;
  m->embedded_ = base->is_embedded();
  m->embed_size_ = base->embed_size();
  m->unit_coords_ = u.coords;
  if (m->embedded_) m->iso_twist_ = adjoint(base->embed(u));
  m->iso_u_ = u;
  return m;
}

const Element& AlgebraModel::distinguished_unitary() const {
  if (kind_ != Kind::Isotope) throw InvalidParameter("not an isotope model");
  return *iso_u_;
}

Element AlgebraModel::element(std::vector<cplx> coords) const {
  if (static_cast<int>(coords.size()) != dim_) throw InvalidParameter("coordinate length mismatch");
  return Element{shared_from_this(), std::move(coords)};
}

Element AlgebraModel::zero() const { return Element{shared_from_this(), std::vector<cplx>(dim_, 0.0)}; }

Element AlgebraModel::unit() const { return Element{shared_from_this(), unit_coords_}; }

Element AlgebraModel::basis_element(int i) const {
  if (i < 0 || i >= dim_) throw InvalidParameter("basis index out of range");
  std::vector<cplx> c(dim_, 0.0);
  c[i] = 1.0;
  return Element{shared_from_this(), std::move(c)};
}

CMatrix AlgebraModel::embed(const Element& a) const {
  if (a.model.get() != this) throw ModelMismatch("embed: foreign element");
  if (!embedded_) throw InvalidParameter("model has no associative embedding");
  switch (kind_) {
    case Kind::Matrix: {
      const int n = param_;
      CMatrix m(n, n);
      for (int i = 0; i < dim_; ++i) m.data()[i] = a.coords[i];
      return m;
    }
    case Kind::Spin: {
      CMatrix m(embed_size_, embed_size_);
      for (int i = 0; i < dim_; ++i) {
        if (a.coords[i] == cplx(0.0)) continue;
        const CMatrix& b = basis_mats_[i];
        for (int r = 0; r < embed_size_; ++r)
          for (int c = 0; c < embed_size_; ++c) m(r, c) += a.coords[i] * b(r, c);
      }
      return m;
    }
    case Kind::DirectSum: {
      CMatrix m(embed_size_, embed_size_);
      int eoff = 0;
      auto comps = split(a);
      for (size_t i = 0; i < parts_.size(); ++i) {
        CMatrix b = parts_[i]->embed(comps[i]);
        for (int r = 0; r < b.rows(); ++r)
          for (int c = 0; c < b.cols(); ++c) m(eoff + r, eoff + c) = b(r, c);
        eoff += b.rows();
      }
      return m;
    }
    case Kind::Isotope:
      return base_->embed(with_model(a, base_)) * iso_twist_;
    default:
      throw InvalidParameter("model has no associative embedding");
  }
}

Element AlgebraModel::unembed(const CMatrix& m) const {
  if (!embedded_) throw InvalidParameter("model has no associative embedding");
  switch (kind_) {
    case Kind::Matrix: {
      std::vector<cplx> c(dim_);
      for (int i = 0; i < dim_; ++i) c[i] = m.data()[i];
      return Element{shared_from_this(), std::move(c)};
    }
    case Kind::Spin: {
      std::vector<cplx> c(dim_);
      for (int i = 0; i < dim_; ++i) {
        cplx s = 0.0;
        const CMatrix& b = basis_mats_[i];
        for (int r = 0; r < embed_size_; ++r)
          for (int cc = 0; cc < embed_size_; ++cc) s += std::conj(b(r, cc)) * m(r, cc);
        c[i] = s / basis_sq_norm_[i];
      }
      return Element{shared_from_this(), std::move(c)};
    }
    case Kind::DirectSum: {
      std::vector<Element> comps;
      int eoff = 0;
      for (const ModelPtr& p : parts_) {
        const int es = p->embed_size();
        CMatrix b(es, es);
        for (int r = 0; r < es; ++r)
          for (int c = 0; c < es; ++c) b(r, c) = m(eoff + r, eoff + c);
        comps.push_back(p->unembed(b));
        eoff += es;
      }
      return join(comps);
    }
    case Kind::Isotope: {
      Element b = base_->unembed(m * adjoint(iso_twist_));
      return Element{shared_from_this(), std::move(b.coords)};
    }
    default:
      throw InvalidParameter("model has no associative embedding");
  }
}

Element AlgebraModel::product(const Element& a, const Element& b) const {
  if (a.model.get() != this || b.model.get() != this) throw ModelMismatch("product: foreign element");
  switch (kind_) {
    case Kind::Matrix: {
      CMatrix x = embed(a), y = embed(b);
      CMatrix p = x * y + y * x;
      p *= 0.5;
      return unembed(p);
    }
    case Kind::Spin: {
      // span{1, s_i} with s_i o s_j = delta_ij: closed form in coordinates.
      std::vector<cplx> c(dim_, 0.0);
      cplx dot = 0.0;
      for (int i = 1; i < dim_; ++i) dot += a.coords[i] * b.coords[i];
      c[0] = a.coords[0] * b.coords[0] + dot;
      for (int i = 1; i < dim_; ++i) c[i] = a.coords[0] * b.coords[i] + b.coords[0] * a.coords[i];
      return Element{shared_from_this(), std::move(c)};
    }
    case Kind::Albert:
      return product_albert(a, b);
    case Kind::DirectSum: {
      auto ca = split(a);
      auto cb = split(b);
      std::vector<Element> out;
      out.reserve(parts_.size());
      for (size_t i = 0; i < parts_.size(); ++i) out.push_back(parts_[i]->product(ca[i], cb[i]));
      return join(out);
    }
    case Kind::Isotope: {
      if (embedded_) {
        CMatrix x = embed(a), y = embed(b);
        CMatrix p = x * y + y * x;
        p *= 0.5;
        return unembed(p);
      }
      Element r = base_->triple(with_model(a, base_), *iso_u_, with_model(b, base_));
      return Element{shared_from_this(), std::move(r.coords)};
    }
  }
  throw InvalidParameter("unreachable");
}

Element AlgebraModel::involution(const Element& a) const {
  if (a.model.get() != this) throw ModelMismatch("involution: foreign element");
  switch (kind_) {
    case Kind::Matrix:
      return unembed(adjoint(embed(a)));
    case Kind::Spin: {
      std::vector<cplx> c(dim_);
      for (int i = 0; i < dim_; ++i) c[i] = std::conj(a.coords[i]);
      return Element{shared_from_this(), std::move(c)};
    }
    case Kind::Albert: {
      std::vector<cplx> c(dim_);
      for (int i = 0; i < dim_; ++i) c[i] = std::conj(a.coords[i]);
      return Element{shared_from_this(), std::move(c)};
    }
    case Kind::DirectSum: {
      auto ca = split(a);
      std::vector<Element> out;
      out.reserve(parts_.size());
      for (size_t i = 0; i < parts_.size(); ++i) out.push_back(parts_[i]->involution(ca[i]));
      return join(out);
    }
    case Kind::Isotope: {
      if (embedded_) return unembed(adjoint(embed(a)));
      // x^{*_u} = {u, x, u}; the triple conjugates its middle slot.
      Element r = base_->triple(*iso_u_, with_model(a, base_), *iso_u_);
      return Element{shared_from_this(), std::move(r.coords)};
    }
  }
  throw InvalidParameter("unreachable");
}

Element AlgebraModel::triple(const Element& x, const Element& y, const Element& z) const {
  if (x.model.get() != this || y.model.get() != this || z.model.get() != this)
    throw ModelMismatch("triple: foreign element");
  if (embedded_ && kind_ != Kind::DirectSum) {
    CMatrix xm = embed(x), ym = embed(y), zm = embed(z);
    CMatrix ys = adjoint(ym);
    CMatrix p = xm * (ys * zm) + zm * (ys * xm);
    p *= 0.5;
    return unembed(p);
  }
  if (kind_ == Kind::DirectSum) {
    auto cx = split(x);
    auto cy = split(y);
    auto cz = split(z);
    std::vector<Element> out;
    out.reserve(parts_.size());
    for (size_t i = 0; i < parts_.size(); ++i) out.push_back(parts_[i]->triple(cx[i], cy[i], cz[i]));
    return join(out);
  }
  if (kind_ == Kind::Isotope) {
    // Triple products agree between a model and its isotopes.
    Element r = base_->triple(with_model(x, base_), with_model(y, base_), with_model(z, base_));
    return Element{shared_from_this(), std::move(r.coords)};
  }
  Element ys = involution(y);
  Element t1 = product(product(x, ys), z);
  Element t2 = product(product(z, ys), x);
  Element t3 = product(product(x, z), ys);
  return t1 + t2 - t3;
}

double AlgebraModel::norm(const Element& a) const {
  if (a.model.get() != this) throw ModelMismatch("norm: foreign element");
  switch (kind_) {
    case Kind::Matrix:
    case Kind::Spin:
      return operator_norm(embed(a));
    case Kind::Albert:
      return norm_albert(a);
    case Kind::DirectSum: {
      auto ca = split(a);
      double m = 0.0;
      for (size_t i = 0; i < parts_.size(); ++i) m = std::max(m, parts_[i]->norm(ca[i]));
      return m;
    }
    case Kind::Isotope:
      if (embedded_) return operator_norm(embed(a));
      return base_->norm(with_model(a, base_));
  }
  throw InvalidParameter("unreachable");
}

Element AlgebraModel::product_albert(const Element& a, const Element& b) const {
  OctMat am = albert_to_mat(a.coords);
  OctMat bm = albert_to_mat(b.coords);
  // For hermitian A, B: AB + BA = P + P^dagger with P = AB, so one octonion
  // matrix multiply suffices and the result is hermitian by construction.
  OctMat p{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) p[i][j] = p[i][j] + am[i][k] * bm[k][j];
  OctMat h{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) h[i][j] = cplx(0.5) * (p[i][j] + oct_conj(p[j][i]));
  return Element{shared_from_this(), albert_from_herm(h)};
}

double AlgebraModel::norm_albert(const Element& a) const {
  double m0 = coord_two_norm(a);
  if (m0 == 0.0) return 0.0;
  // Self-adjoint elements (real coordinates) and i * self-adjoint ones have a
  // real spectrum from the characteristic cubic; the norm is its radius.
  {
    double maxre = 0.0, maxim = 0.0;
    for (const cplx& z : a.coords) {
      maxre = std::max(maxre, std::abs(z.real()));
      maxim = std::max(maxim, std::abs(z.imag()));
    }
    const double scale = std::max(maxre, maxim);
    const bool real_coords = maxim <= 1e-12 * scale;
    const bool imag_coords = maxre <= 1e-12 * scale;
    if (real_coords || imag_coords) {
      Element h = real_coords ? a : cplx(0.0, -1.0) * a;
      cplx t, s, n;
      cubic_invariants(h, t, s, n);
      const double r = max_abs_cubic_root(t.real(), s.real(), n.real());
      if (r >= 0.0) return r;
    }
  }
  Element b = cplx(1.0 / m0) * a;
  double logsum = std::log(m0);
  double p3 = 1.0;
  double est = m0;
  double incr_prev = 0.0;
  for (int k = 1; k <= 12; ++k) {
    // odd triple power {b,b,b} = 2(b o b*) o b - b^2 o b*
    Element bs = involution(b);
    Element t = product(product(b, bs), b);
    Element w = product(product(b, b), bs);
    b = cplx(2.0) * t - w;
    double mk = coord_two_norm(b);
    if (!(mk > 0.0) || !std::isfinite(mk)) throw NoConvergence("albert norm iteration degenerated");
    p3 /= 3.0;
    const double incr = p3 * std::log(mk);
    logsum += incr;
    b = cplx(1.0 / mk) * b;
    double next = std::exp(logsum);
    const bool settled = k >= 2 && std::abs(next - est) <= 1e-8 * next;
    if (settled || k == 12) {
      // geometric tail estimate: the increments contract by about 1/3 once
      // the normalized iterates settle
      if (k >= 2 && std::abs(incr_prev) > 0.0) {
        const double ratio = incr / incr_prev;
        if (std::abs(ratio) < 0.9) logsum += incr * ratio / (1.0 - ratio);
      }
      if (settled) return std::exp(logsum);
    }
    est = next;
    incr_prev = incr;
  }
  return std::exp(logsum);
}

cplx AlgebraModel::canonical_inner(const Element& x, const Element& y) const {
  if (x.model.get() != this || y.model.get() != this) throw ModelMismatch("canonical_inner: foreign element");
  switch (kind_) {
    case Kind::Matrix:
    case Kind::Spin: {
      CMatrix xm = embed(x), ym = embed(y);
      cplx s = 0.0;
      for (int i = 0; i < xm.rows(); ++i)
        for (int j = 0; j < xm.cols(); ++j) s += std::conj(xm(i, j)) * ym(i, j);
      return s;
    }
    case Kind::Albert: {
      Element z = product(involution(x), y);
      return z.coords[0] + z.coords[1] + z.coords[2];
    }
    case Kind::DirectSum: {
      auto cx = split(x);
      auto cy = split(y);
      cplx s = 0.0;
      for (size_t i = 0; i < parts_.size(); ++i) s += parts_[i]->canonical_inner(cx[i], cy[i]);
      return s;
    }
    case Kind::Isotope:
      return base_->canonical_inner(with_model(x, base_), with_model(y, base_));
  }
  throw InvalidParameter("unreachable");
}

const std::vector<Element>& AlgebraModel::hermitian_basis() const {
  std::call_once(herm_once_, [this]() {
    const int d = dim_;
    // Real representation of the involution: columns are realified images of
    // e_j and i e_j. Self-adjoint part = fixed space; project and
    // orthonormalize.
    CMatrix p(2 * d, 2 * d);
    for (int j = 0; j < d; ++j) {
      Element ej = basis_element(j);
      Element s = involution(ej);
      Element si = involution(Element{shared_from_this(), [&] {
                                std::vector<cplx> c(d, 0.0);
                                c[j] = cplx(0.0, 1.0);
                                return c;
                              }()});
      for (int i = 0; i < d; ++i) {
        p(i, j) = s.coords[i].real();
        p(i + d, j) = s.coords[i].imag();
        p(i, j + d) = si.coords[i].real();
        p(i + d, j + d) = si.coords[i].imag();
      }
    }
    for (int i = 0; i < 2 * d; ++i) p(i, i) += 1.0;
    p *= 0.5;
    // Gram-Schmidt over the columns of the projector.
    std::vector<std::vector<double>> basis;
    for (int j = 0; j < 2 * d && static_cast<int>(basis.size()) < d; ++j) {
      std::vector<double> v(2 * d);
      for (int i = 0; i < 2 * d; ++i) v[i] = p(i, j).real();
      for (const auto& b : basis) {
        double dot = 0.0;
        for (int i = 0; i < 2 * d; ++i) dot += b[i] * v[i];
        for (int i = 0; i < 2 * d; ++i) v[i] -= dot * b[i];
      }
      double nrm = 0.0;
      for (double t : v) nrm += t * t;
      nrm = std::sqrt(nrm);
      if (nrm < kDependentTol) continue;
      for (double& t : v) t /= nrm;
      basis.push_back(std::move(v));
    }
    if (static_cast<int>(basis.size()) != d)
      throw InvalidParameter("hermitian basis has unexpected dimension");
    herm_basis_.reserve(d);
    for (const auto& v : basis) {
      std::vector<cplx> c(d);
      for (int i = 0; i < d; ++i) c[i] = cplx(v[i], v[i + d]);
      herm_basis_.push_back(Element{shared_from_this(), std::move(c)});
    }
  });
  return herm_basis_;
}

const CMatrix& AlgebraModel::canonical_gram() const {
  std::call_once(gram_once_, [this]() {
    CMatrix g(dim_, dim_);
    for (int i = 0; i < dim_; ++i) {
      Element ei = basis_element(i);
      for (int j = 0; j < dim_; ++j) g(i, j) = canonical_inner(ei, basis_element(j));
    }
    // Symmetrize against roundoff.
    for (int i = 0; i < dim_; ++i)
      for (int j = i; j < dim_; ++j) {
        cplx m = 0.5 * (g(i, j) + std::conj(g(j, i)));
        g(i, j) = m;
        g(j, i) = std::conj(m);
      }
    gram_ = std::move(g);
  });
  return gram_;
}

bool AlgebraModel::same_structure(const AlgebraModel& o) const {
  if (kind_ == Kind::Isotope) return base_->same_structure(o);
  if (o.kind_ == Kind::Isotope) return same_structure(*o.base_);
  if (kind_ != o.kind_) return false;
  if (kind_ == Kind::DirectSum) {
    if (parts_.size() != o.parts_.size()) return false;
    for (size_t i = 0; i < parts_.size(); ++i)
      if (!parts_[i]->same_structure(*o.parts_[i])) return false;
    return true;
  }
  return param_ == o.param_;
}

std::string AlgebraModel::name() const {
  switch (kind_) {
    case Kind::Matrix:
      return "matrix:" + std::to_string(param_);
    case Kind::Spin:
      return "spin:" + std::to_string(param_);
    case Kind::Albert:
      return "albert";
    case Kind::DirectSum: {
      std::string s;
      for (size_t i = 0; i < parts_.size(); ++i) {
        if (i) s += "+";
        s += parts_[i]->name();
      }
      return s;
    }
    case Kind::Isotope:
      return "isotope(" + base_->name() + ")";
  }
  return "?";
}

std::vector<Element> AlgebraModel::split(const Element& a) const {
  if (kind_ != Kind::DirectSum) throw InvalidParameter("split: not a direct sum");
  std::vector<Element> out;
  out.reserve(parts_.size());
  for (size_t i = 0; i < parts_.size(); ++i) {
    const int off = part_offsets_[i];
    const int d = parts_[i]->dim();
    std::vector<cplx> c(a.coords.begin() + off, a.coords.begin() + off + d);
    out.push_back(Element{parts_[i], std::move(c)});
  }
  return out;
}

Element AlgebraModel::join(const std::vector<Element>& components) const {
  if (kind_ != Kind::DirectSum) throw InvalidParameter("join: not a direct sum");
  if (components.size() != parts_.size()) throw InvalidParameter("join: wrong component count");
  std::vector<cplx> c(dim_);
  for (size_t i = 0; i < parts_.size(); ++i) {
    if (components[i].model.get() != parts_[i].get()) throw ModelMismatch("join: component model mismatch");
    std::copy(components[i].coords.begin(), components[i].coords.end(), c.begin() + part_offsets_[i]);
  }
  return Element{shared_from_this(), std::move(c)};
}

void AlgebraModel::cubic_invariants(const Element& a, cplx& t, cplx& s, cplx& n) const {
  if (kind_ != Kind::Albert) throw InvalidParameter("cubic invariants are defined on the Albert model");
  if (a.model.get() != this) throw ModelMismatch("cubic_invariants: foreign element");
  const cplx d1 = a.coords[0], d2 = a.coords[1], d3 = a.coords[2];
  const Octonion x1 = oct_from_coords(a.coords, 3);
  const Octonion x2 = oct_from_coords(a.coords, 11);
  const Octonion x3 = oct_from_coords(a.coords, 19);
  const cplx n1 = oct_norm_form(x1), n2 = oct_norm_form(x2), n3 = oct_norm_form(x3);
  t = d1 + d2 + d3;
  s = d1 * d2 + d2 * d3 + d3 * d1 - n1 - n2 - n3;
  n = d1 * d2 * d3 - d1 * n1 - d2 * n2 - d3 * n3 + 2.0 * oct_scalar((x1 * x2) * x3);
}

}  // namespace jbstar
