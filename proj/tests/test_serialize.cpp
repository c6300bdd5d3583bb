#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "jbstar/serialize.hpp"
#include "jbstar/rng.hpp"

using namespace jbstar;

TEST_CASE("model round trip") {
  std::vector<ModelPtr> models = {
      AlgebraModel::matrix(3), AlgebraModel::spin(2), AlgebraModel::albert(),
      AlgebraModel::direct_sum({AlgebraModel::matrix(2), AlgebraModel::spin(3)})};
  for (const ModelPtr& m : models) {
    json j = model_to_json(m);
    ModelPtr back = model_from_json(j);
    CHECK(m->same_structure(*back));
    CHECK(model_to_json(back) == j);
  }
}

TEST_CASE("element round trip is bit identical for finite doubles") {
  ModelPtr m = AlgebraModel::matrix(3);
  Rng rng = Rng::derive(5, "ser", 0);
  std::vector<cplx> c(m->dim());
  for (cplx& z : c) z = cplx(rng.normal() * 1e-7, rng.normal() * 1e9);
  c[0] = cplx(0.1, -0.3);  // not exactly representable decimals
  Element e = m->element(std::move(c));
  std::string text = element_to_json(e).dump();
  Element back = element_from_json(json::parse(text));
  REQUIRE(back.dim() == e.dim());
  for (int i = 0; i < e.dim(); ++i) CHECK(back.coords[i] == e.coords[i]);
  // serialize -> parse -> serialize is a fixed point
  CHECK(element_to_json(back).dump() == text);
}

TEST_CASE("operator round trip with linearity flag") {
  ModelPtr m = AlgebraModel::matrix(2);
  Element a = m->element({cplx(0.5, 1), cplx(2, 0), cplx(0, -1), cplx(1, 1)});
  LinearOperator u = u_operator(a);
  json j = operator_to_json(u);
  CHECK(j.at("linearity") == "complex");
  LinearOperator back = operator_from_json(j);
  CHECK(back.linearity() == Linearity::Complex);
  CHECK(back.minus(u).op_norm() <= 1e-15);

  LinearOperator q = q_operator(m->unit());
  json jq = operator_to_json(q);
  CHECK(jq.at("linearity") == "conjugate");
  LinearOperator qback = operator_from_json(jq);
  CHECK(qback.minus(q).op_norm() <= 1e-15);
}

TEST_CASE("reconstruction report serialization carries the stage residuals") {
  ModelPtr m = AlgebraModel::matrix(2);
  DeltaOracle ident = [](const Element& u) { return u; };
  ReconstructOptions opt;
  opt.probe_unitaries = 10;
  opt.isometry_spot_checks = 5;
  ReconstructionReport rep = reconstruct(ident, m, m, opt);
  json j = reconstruction_report_to_json(rep, m);
  CHECK(j.at("verdict") == "pass");
  CHECK(j.at("stages").contains("omega_residual"));
  CHECK(j.at("stages").contains("extension_sup"));
  CHECK(j.at("stages").contains("central_symmetry"));
  CHECK(j.at("model").at("kind") == "matrix");
}

TEST_CASE("unknown kinds are rejected") {
  CHECK_THROWS_AS(model_from_json(json{{"kind", "banana"}}), ConfigError);
}
