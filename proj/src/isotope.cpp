#include "jbstar/isotope.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace jbstar {

ModelPtr isotope(const ModelPtr& m, const Element& u) {
  if (u.model.get() != m.get()) throw ModelMismatch("isotope: unitary from a different model");
  if (!is_unitary(u)) throw NotUnitary("isotope: distinguished element is not unitary");
  return AlgebraModel::isotope_unchecked(m, u);
}

Element unitary_log(const Element& u) {
  if (!is_unitary(u)) throw NotUnitary("unitary_log: input is not unitary");
  SpectralData sd = spectral_decompose(u);
  const ModelPtr& m = u.model;
  {
    // a usable branch needs an angular gap somewhere on the circle
    std::vector<double> angles;
    for (const cplx& ev : sd.eigenvalues) angles.push_back(std::arg(ev));
    std::sort(angles.begin(), angles.end());
    double widest = 2.0 * M_PI + angles.front() - angles.back();
    for (size_t i = 1; i < angles.size(); ++i) widest = std::max(widest, angles[i] - angles[i - 1]);
    if (widest < 1e-6) throw NoSpectralGap("unitary_log: spectrum leaves no branch gap");
  }
  Element h = m->zero();
  for (size_t i = 0; i < sd.eigenvalues.size(); ++i) {
    const cplx ev = sd.eigenvalues[i];
    double theta = std::arg(ev);
    // arg returns (-pi, pi]; pin near-cut eigenvalues to +pi so repeated
    // runs agree.
    if (std::abs(ev + 1.0) < 1e-12) theta = M_PI;
    h = h + cplx(theta, 0.0) * sd.projections[i];
  }
  // symmetrize away interpolation roundoff
  Element hs = m->involution(h);
  return cplx(0.5) * (h + hs);
}

Element short_distance_log(const Element& u, const Element& v) {
  require_same_model(u, v);
  const ModelPtr& m = u.model;
  const double dist = m->norm(u - v);
  if (dist >= 2.0 - 1e-9) throw TooFar("short_distance_log: ||u - v|| >= 2");
  ModelPtr iso = isotope(m, u);
  Element v_iso = with_model(v, iso);
  return unitary_log(v_iso);
}

Element midpoint_witness(const Element& u, const Element& v) {
  Element h = short_distance_log(u, v);
  Element w_iso = exp_element(cplx(0.0, 0.5) * h);
  return with_model(w_iso, u.model);
}

double rigidity_residual(const Element& u, const Element& w) {
  require_same_model(u, w);
  const ModelPtr& m = u.model;
  if (!is_unitary(u) || !is_unitary(w)) throw NotUnitary("rigidity_residual: inputs must be unitary");
  const double dist = m->norm(u - w);
  if (dist >= 2.0 - 1e-9) throw HypothesisNotMet("rigidity_residual: ||u - w|| is not < 2");
  Element uw = u_operator(w).apply(m->involution(u));
  if (m->norm(uw - u) > 1e-8) throw HypothesisNotMet("rigidity_residual: U_w(u*) != u");
  return dist;
}

}  // namespace jbstar
