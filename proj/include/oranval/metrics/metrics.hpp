#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "oranval/common/retry.hpp"
#include "oranval/orchestrator/test_case.hpp"
#include "oranval/retrieval/clients.hpp"

namespace oranval {

struct FlowDistance {
  double value = 0.0;
  std::size_t embedding_dimension = 0;
  std::string backend;
};

// Euclidean distance between the embeddings of two serialized flows.
FlowDistance flow_distance(const std::string& generated, const std::string& truth,
                           const EmbeddingClient& client, const RetryPolicy& retry = {});

struct ConfusionMatrix {
  long tp = 0;
  long fp = 0;
  long tn = 0;
  long fn = 0;

  long total() const noexcept { return tp + fp + tn + fn; }
  bool operator==(const ConfusionMatrix&) const = default;
};

struct PredictedVerdicts {
  VerdictKind val = VerdictKind::Fail;
  std::optional<VerdictKind> debug;
};

// Truth Pass counts as positive, PartialPass and Fail as negative. The
// prediction is positive iff Val says Pass.
ConfusionMatrix score_run(const std::map<std::string, VerdictKind>& ground_truth,
                          const std::map<std::string, PredictedVerdicts>& predicted);

double validation_accuracy(const ConfusionMatrix& cm);

nlohmann::json to_json(const ConfusionMatrix& cm);
nlohmann::json to_json(const FlowDistance& d);

struct CaseMetric {
  std::string case_id;
  std::optional<double> flow_distance;
  std::optional<VerdictKind> truth;
  std::optional<VerdictKind> val;
  std::optional<VerdictKind> debug;
};

// case_id,flow_distance,truth,val,debug
std::string metrics_to_csv(const std::vector<CaseMetric>& rows);

}  // namespace oranval
