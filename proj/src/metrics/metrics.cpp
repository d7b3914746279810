#include "oranval/metrics/metrics.hpp"

#include <cstdio>

#include "oranval/common/error.hpp"

namespace oranval {

FlowDistance flow_distance(const std::string& generated, const std::string& truth,
                           const EmbeddingClient& client, const RetryPolicy& retry) {
  if (generated.empty() || truth.empty()) throw Error(ErrorKind::Metric, "flow_distance needs two non-empty texts");
  Embedding g = with_retries(retry, [&] { return client.embed(generated); });
  Embedding t = with_retries(retry, [&] { return client.embed(truth); });
  if (g.size() != t.size()) {
    throw Error(ErrorKind::Metric, "embedding dimensions differ: " + std::to_string(g.size()) + " vs " +
                                       std::to_string(t.size()));
  }
  return {euclidean_distance(g, t), g.size(), client.id()};
}

ConfusionMatrix score_run(const std::map<std::string, VerdictKind>& ground_truth,
                          const std::map<std::string, PredictedVerdicts>& predicted) {
  for (const auto& [id, _] : ground_truth) {
    if (!predicted.count(id)) throw Error(ErrorKind::Scoring, "no prediction for case " + id);
  }
  for (const auto& [id, _] : predicted) {
    if (!ground_truth.count(id)) throw Error(ErrorKind::Scoring, "no ground truth for case " + id);
  }
  ConfusionMatrix cm;
  for (const auto& [id, truth] : ground_truth) {
    bool actual = truth == VerdictKind::Pass;
    bool pred = predicted.at(id).val == VerdictKind::Pass;
    if (actual && pred) ++cm.tp;
    else if (!actual && pred) ++cm.fp;
    else if (!actual && !pred) ++cm.tn;
    else ++cm.fn;
  }
  return cm;
}

double validation_accuracy(const ConfusionMatrix& cm) {
  if (cm.tp < 0 || cm.fp < 0 || cm.tn < 0 || cm.fn < 0) throw Error(ErrorKind::Metric, "negative confusion count");
  if (cm.total() == 0) throw Error(ErrorKind::UndefinedAccuracy, "accuracy is undefined for an empty campaign");
  return static_cast<double>(cm.tp + cm.tn) / static_cast<double>(cm.total());
}

nlohmann::json to_json(const ConfusionMatrix& cm) {
  nlohmann::json j{{"tp", cm.tp}, {"fp", cm.fp}, {"tn", cm.tn}, {"fn", cm.fn}};
  if (cm.total() > 0) j["accuracy"] = validation_accuracy(cm);
  else j["accuracy"] = nullptr;
  return j;
}

nlohmann::json to_json(const FlowDistance& d) {
  return {{"value", d.value}, {"embedding_dimension", d.embedding_dimension}, {"backend", d.backend}};
}

std::string metrics_to_csv(const std::vector<CaseMetric>& rows) {
  std::string out = "case_id,flow_distance,truth,val,debug\n";
  auto kind = [](const std::optional<VerdictKind>& k) { return k ? std::string(to_string(*k)) : std::string(); };
  for (const auto& r : rows) {
    std::string dist;
    if (r.flow_distance) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.6f", *r.flow_distance);
      dist = buf;
    }
    out += r.case_id + "," + dist + "," + kind(r.truth) + "," + kind(r.val) + "," + kind(r.debug) + "\n";
  }
  return out;
}

}  // namespace oranval
