#include "oranval/classifier/classification.hpp"

#include "oranval/common/error.hpp"

namespace oranval {

std::string_view to_string(Label l) { return l == Label::Executed ? "Executed" : "NotExecuted"; }

nlohmann::json to_json(const ClassificationResult& r) {
  return {{"step", r.step_ordinal},       {"log_index", r.log_index},     {"label", to_string(r.label)},
          {"confidence", r.confidence}, {"explanation", r.explanation}, {"backend", r.backend}};
}

ClassificationResult classification_from_json(const nlohmann::json& j) {
  ClassificationResult r;
  r.step_ordinal = j.at("step").get<int>();
  r.log_index = j.at("log_index").get<int>();
  const auto label = j.at("label").get<std::string>();
  if (label == "Executed") {
    r.label = Label::Executed;
  } else if (label == "NotExecuted") {
    r.label = Label::NotExecuted;
  } else {
    throw SchemaError("unknown label '" + label + "'", "label");
  }
  r.confidence = j.at("confidence").get<int>();
  r.explanation = j.value("explanation", "");
  r.backend = j.value("backend", "");
  return r;
}

}  // namespace oranval
