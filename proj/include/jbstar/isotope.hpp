#pragma once

#include "jbstar/model.hpp"
#include "jbstar/operators.hpp"

namespace jbstar {

// u-isotope M(u) = (M, o_u, *_u) with unit u; throws NotUnitary.
ModelPtr isotope(const ModelPtr& m, const Element& u);

// h self-adjoint with exp(i h) = u, spectrum of h in (-pi, pi]. Eigenvalues
// of u near -1 are assigned deterministically to the +pi side.
Element unitary_log(const Element& u);

// Self-adjoint h in the u-isotope with exp_u(i h) = v. The returned element
// lives on the isotope model. Throws TooFar when ||u - v|| >= 2.
Element short_distance_log(const Element& u, const Element& v);

// Unitary w with U_w(u*) = v, realized as exp_u(i h / 2); element of the
// base model.
Element midpoint_witness(const Element& u, const Element& v);

// ||w - u|| for inputs satisfying U_w(u*) = u (within 1e-8) and
// ||u - w|| < 2; HypothesisNotMet otherwise.
double rigidity_residual(const Element& u, const Element& w);

}  // namespace jbstar
