#pragma once

#include <functional>

#include "jbstar/operators.hpp"

namespace jbstar {

// One-parameter unitary family u(t) on [-domain, domain] with u(0) = 1 and
// the square law U_{u(t)}(u(s)) = u(2t+s).
struct UnitaryPath {
  ModelPtr model;
  std::function<Element(double)> at;
  double domain = 2.0;
};

UnitaryPath exponential_path(const ModelPtr& m, const Element& h, double domain = 2.0);

// max over seeded samples of ||U_{u(t)}(u(s)) - u(2t+s)||.
double verify_group_law(const UnitaryPath& path, int samples, std::uint64_t seed);

// Self-adjoint h with u(t) = exp(i t h); the logarithm is taken at a finite
// t0 (0.1, halved on branch trouble) and validated against sampled t.
Element recover_generator(const UnitaryPath& path);

// Triple derivation delta with U_{u(t)} = exp(t delta); satisfies
// delta(1) = 2 i h.
LinearOperator derivation_from_path(const UnitaryPath& path);

}  // namespace jbstar
