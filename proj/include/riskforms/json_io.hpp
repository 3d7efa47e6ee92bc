#pragma once

// JSON interchange for models, forms, kernels and problems ("riskforms/1").

#include <string>

#include "json.hpp"
#include "riskforms/instances.hpp"
#include "riskforms/twostage.hpp"

namespace riskforms::io {

using nlohmann::json;

inline constexpr const char* kSchema = "riskforms/1";

/// Reads and parses a JSON file. Throws ParseError with "path:byte N" on bad
/// syntax and ValidationError when the file cannot be read.
json read_json_file(const std::string& path);
json parse_json(const std::string& text, const std::string& source = "<input>");

// Decoders. Errors carry the JSON pointer of the offending value in location().
FiniteModel model_from_json(const json& j);
RiskFormSpec form_from_json(const json& j, const std::string& at = "");
ProductModel product_from_json(const json& j);
CompositeForm composite_from_json(const json& j, const std::string& at = "");
MultiModel multi_model_from_json(const json& j);
NestedForm nested_form_from_json(const json& j);
Prior prior_from_json(const json& j, const std::string& at = "");
ControlledKernel controlled_kernel_from_json(const json& j, const std::string& at = "");
TwoStageProblem problem_from_json(const json& j);

// Encoders; each decodes back to an equal value.
json to_json(const FiniteModel& m);
json to_json(const RiskFormSpec& f);
json to_json(const ProductModel& pm);
json to_json(const CompositeForm& cf);
json to_json(const MultiModel& mm);
json to_json(const NestedForm& nf);
json to_json(const Prior& prior, const ControlledKernel& ck);
json to_json(const TwoStageProblem& p);
json to_json(const Solution& s);
json to_json(const Matrix& m);

json error_to_json(const Error& e);

/// Serialization used for every CLI result (doubles round-trip exactly).
std::string dump(const json& j);

}  // namespace riskforms::io
