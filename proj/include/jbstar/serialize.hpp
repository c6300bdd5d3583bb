#pragma once

#include <json.hpp>

#include "jbstar/isometry.hpp"
#include "jbstar/model.hpp"
#include "jbstar/operators.hpp"

namespace jbstar {

using json = nlohmann::json;

// Frozen JSON schema (see README): models are {"kind": "matrix"|"spin"|
// "albert"|"direct_sum", ...}, elements are {"model": ..., "coords":
// [[re, im], ...]}, operators add "linearity" and the realified matrix.
json model_to_json(const ModelPtr& m);
ModelPtr model_from_json(const json& j);

json element_to_json(const Element& e);
Element element_from_json(const json& j);

json operator_to_json(const LinearOperator& op);
LinearOperator operator_from_json(const json& j);

json reconstruction_report_to_json(const ReconstructionReport& rep, const ModelPtr& model);

}  // namespace jbstar
