#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

#include "oranval/log_ingest/log_model.hpp"
#include "oranval/retrieval/flow.hpp"

namespace oranval {

enum class Label { Executed, NotExecuted };

std::string_view to_string(Label l);

struct ClassificationResult {
  int step_ordinal = 0;
  int log_index = 0;
  Label label = Label::NotExecuted;
  int confidence = 0;  // percent, advisory only
  std::string explanation;
  std::string backend;

  bool executed() const { return label == Label::Executed; }

  friend bool operator==(const ClassificationResult&, const ClassificationResult&) = default;
};

nlohmann::json to_json(const ClassificationResult& r);
ClassificationResult classification_from_json(const nlohmann::json& j);

// Answers "is this step executed in this log entry?". Implementations must be
// callable from multiple threads.
class StepClassifier {
 public:
  virtual ~StepClassifier() = default;
  virtual ClassificationResult classify(const FlowStep& step, const LogRecord& record) const = 0;
  virtual std::string id() const = 0;
};

}  // namespace oranval
