#include "jbstar/stone.hpp"

#include <cmath>

#include "jbstar/rng.hpp"

namespace jbstar {

UnitaryPath exponential_path(const ModelPtr& m, const Element& h, double domain) {
  if (h.model.get() != m.get()) throw ModelMismatch("exponential_path: generator from another model");
  UnitaryPath p;
  p.model = m;
  p.domain = domain;
  p.at = [m, h](double t) { return exp_element(cplx(0.0, t) * h); };
  return p;
}

double verify_group_law(const UnitaryPath& path, int samples, std::uint64_t seed) {
  const ModelPtr& m = path.model;
  {
    Element origin = path.at(0.0);
    if (m->norm(origin - m->unit()) > 1e-10)
      throw GroupLawViolated("verify_group_law: u(0) != 1");
  }
  double worst = 0.0;
  Rng rng = Rng::derive(seed, "group-law", 0);
  for (int i = 0; i < samples; ++i) {
    const double t = rng.uniform(-path.domain / 4.0, path.domain / 4.0);
    const double s = rng.uniform(-path.domain / 4.0, path.domain / 4.0);
    if (std::abs(2.0 * t + s) > path.domain) throw DomainExceeded("verify_group_law: sample outside domain");
    Element lhs = u_operator(path.at(t)).apply(path.at(s));
    Element rhs = path.at(2.0 * t + s);
    worst = std::max(worst, m->norm(lhs - rhs));
  }
  return worst;
}

namespace {

double stone_tolerance(const ModelPtr& m) {
  return m->kind() == AlgebraModel::Kind::Albert ? 1e-5 : 1e-7;
}

}  // namespace

Element recover_generator(const UnitaryPath& path) {
  const ModelPtr& m = path.model;
  const double tol = stone_tolerance(m);
  if (verify_group_law(path, 20, 0) > 1e-7 * (m->kind() == AlgebraModel::Kind::Albert ? 100.0 : 1.0))
    throw GroupLawViolated("recover_generator: group law residual too large");
  double t0 = std::min(0.1, path.domain / 2.0);
  bool branch_trouble = false;
  for (int attempt = 0; attempt <= 10; ++attempt) {
    Element h;
    try {
      h = cplx(1.0 / t0, 0.0) * log_unitary(path.at(t0));
    } catch (const BranchCut&) {
      branch_trouble = true;
      t0 /= 2.0;
      continue;
    }
    // validate against sampled times
    Rng rng = Rng::derive(1, "stone-validate", 0);
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
      const double t = rng.uniform(-path.domain, path.domain);
      worst = std::max(worst, m->norm(path.at(t) - exp_element(cplx(0.0, t) * h)));
    }
    if (worst <= tol) {
      Element hs = m->involution(h);
      if (m->norm(hs - h) > 1e-8 * std::max(1.0, m->norm(h)))
        throw GroupLawViolated("recover_generator: recovered generator is not self-adjoint");
      return h;
    }
    // wrong branch at this scale: shrink and retry
    branch_trouble = true;
    t0 /= 2.0;
  }
  if (branch_trouble) throw BranchCutExhausted("recover_generator: no branch-stable t0 found");
  throw GroupLawViolated("recover_generator: validation failed");
}

LinearOperator derivation_from_path(const UnitaryPath& path) {
  const ModelPtr& m = path.model;
  Element h = recover_generator(path);
  const int d = m->dim();
  const CMatrix& gram = m->canonical_gram();
  CMatrix r = cholesky_upper(gram);
  CMatrix rinv = solve_upper_triangular(r, CMatrix::identity(d));

  double t0 = std::min(0.1, path.domain / 2.0);
  const double hn = m->norm(h);
  // keep the operator spectrum clear of the cut: |2 t0 h| < pi/2
  while (t0 * hn > M_PI / 4.0) t0 /= 2.0;
  CMatrix phi = u_operator(path.at(t0)).complex_matrix();
  CMatrix tphi = r * phi * rinv;  // unitary for the canonical inner product
  EigenResult er = eig_normal(tphi);
  CMatrix logd(d, d);
  for (int i = 0; i < d; ++i) logd(i, i) = cplx(0.0, std::arg(er.eigenvalues[i]) / t0);
  CMatrix tlog = er.eigenvectors * logd * adjoint(er.eigenvectors);
  CMatrix dmat = rinv * tlog * r;
  return LinearOperator::from_complex_matrix(m, m, dmat);
}

}  // namespace jbstar
