#include "jbstar/serialize.hpp"

namespace jbstar {

json model_to_json(const ModelPtr& m) {
  switch (m->kind()) {
    case AlgebraModel::Kind::Matrix:
      return json{{"kind", "matrix"}, {"n", m->param()}};
    case AlgebraModel::Kind::Spin:
      return json{{"kind", "spin"}, {"k", m->param()}};
    case AlgebraModel::Kind::Albert:
      return json{{"kind", "albert"}};
    case AlgebraModel::Kind::DirectSum: {
      json parts = json::array();
      for (const ModelPtr& p : m->parts()) parts.push_back(model_to_json(p));
      return json{{"kind", "direct_sum"}, {"summands", parts}};
    }
    default:
      throw InvalidParameter("serialize: isotope models are runtime-only");
  }
}

ModelPtr model_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "matrix") return AlgebraModel::matrix(j.at("n").get<int>());
  if (kind == "spin") return AlgebraModel::spin(j.at("k").get<int>());
  if (kind == "albert") return AlgebraModel::albert();
  if (kind == "direct_sum") {
    std::vector<ModelPtr> parts;
    for (const json& p : j.at("summands")) parts.push_back(model_from_json(p));
    return AlgebraModel::direct_sum(std::move(parts));
  }
  throw ConfigError("unknown model kind: " + kind);
}

json element_to_json(const Element& e) {
  json coords = json::array();
  for (const cplx& z : e.coords) coords.push_back(json::array({z.real(), z.imag()}));
  return json{{"model", model_to_json(e.model)}, {"coords", coords}};
}

Element element_from_json(const json& j) {
  ModelPtr m = model_from_json(j.at("model"));
  std::vector<cplx> coords;
  for (const json& z : j.at("coords")) coords.emplace_back(z.at(0).get<double>(), z.at(1).get<double>());
  return m->element(std::move(coords));
}

namespace {

std::string linearity_name(Linearity f) {
  switch (f) {
    case Linearity::Complex:
      return "complex";
    case Linearity::Conjugate:
      return "conjugate";
    default:
      return "real";
  }
}

Linearity linearity_from_name(const std::string& s) {
  if (s == "complex") return Linearity::Complex;
  if (s == "conjugate") return Linearity::Conjugate;
  if (s == "real") return Linearity::Real;
  throw ConfigError("unknown linearity: " + s);
}

}  // namespace

json operator_to_json(const LinearOperator& op) {
  const CMatrix& r = op.real_matrix();
  json entries = json::array();
  for (int i = 0; i < r.rows(); ++i)
    for (int j = 0; j < r.cols(); ++j) entries.push_back(r(i, j).real());
  return json{{"source", model_to_json(op.source())},
              {"target", model_to_json(op.target())},
              {"linearity", linearity_name(op.linearity())},
              {"real_matrix", json{{"rows", r.rows()}, {"cols", r.cols()}, {"entries", entries}}}};
}

LinearOperator operator_from_json(const json& j) {
  ModelPtr source = model_from_json(j.at("source"));
  ModelPtr target = model_from_json(j.at("target"));
  const json& rm = j.at("real_matrix");
  const int rows = rm.at("rows").get<int>();
  const int cols = rm.at("cols").get<int>();
  const json& entries = rm.at("entries");
  if (static_cast<int>(entries.size()) != rows * cols)
    throw ConfigError("operator entries length mismatch");
  CMatrix r(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int c = 0; c < cols; ++c) r(i, c) = entries[static_cast<size_t>(i) * cols + c].get<double>();
  const Linearity flag = linearity_from_name(j.at("linearity").get<std::string>());
  // rebuild through the realified action so the flag is validated
  const int ds = source->dim();
  LinearOperator rebuilt = LinearOperator::from_function(source, target, [&](const Element& x) {
    std::vector<cplx> out(target->dim(), 0.0);
    for (int c = 0; c < ds; ++c) {
      const double xr = x.coords[c].real(), xi = x.coords[c].imag();
      for (int i = 0; i < target->dim(); ++i) {
        out[i] += cplx(r(i, c).real() * xr + r(i, c + ds).real() * xi,
                       r(i + target->dim(), c).real() * xr + r(i + target->dim(), c + ds).real() * xi);
      }
    }
    return target->element(std::move(out));
  });
  if (rebuilt.linearity() != flag)
    throw ConfigError("operator linearity flag disagrees with the stored matrix");
  return rebuilt;
}

json reconstruction_report_to_json(const ReconstructionReport& rep, const ModelPtr& model) {
  json stages = json::object();
  for (const auto& [name, value] : rep.residuals) stages[name] = value;
  return json{{"stages", stages},
              {"verdict", rep.verdict},
              {"seed", rep.seed},
              {"model", model_to_json(model)},
              {"hypothesis1_held", rep.hypothesis1_held},
              {"wall_seconds", rep.wall_seconds}};
}

}  // namespace jbstar
