#pragma once

#include <optional>
#include <string>
#include <vector>

#include "oranval/classifier/classification.hpp"
#include "oranval/common/error.hpp"
#include "oranval/log_ingest/log_model.hpp"
#include "oranval/retrieval/flow.hpp"
#include "oranval/validation/debug_matrix.hpp"
#include "oranval/validation/verdict.hpp"

namespace oranval {

// Raised when the classifier fails mid-run. Whatever was classified before the
// failure is kept for inspection.
class AbortedRunError : public Error {
 public:
  AbortedRunError(const std::string& message, std::vector<ClassificationResult> partial_trace,
                  std::optional<DebugMatrix> partial_matrix = std::nullopt);

  const std::vector<ClassificationResult>& partial_trace() const { return trace_; }
  const std::optional<DebugMatrix>& partial_matrix() const { return matrix_; }

 private:
  std::vector<ClassificationResult> trace_;
  std::optional<DebugMatrix> matrix_;
};

struct ValResult {
  Verdict verdict;
  // Every classification performed, in call order.
  std::vector<ClassificationResult> trace;
};

// Greedy chronological matcher. Walks the log once; a match advances both the
// step and the log index, a miss advances the log index only. Pass iff every
// step is matched before the log is exhausted. An empty log is a Fail; an
// empty flow throws Error(InvalidFlow).
ValResult validate(const ApprovedFlow& flow, const LogSequence& logs, const StepClassifier& classifier);

struct DebugOptions {
  std::size_t parallelism = 1;
  // Treat two steps sharing one earliest log index as out of order.
  bool strict_chronology = false;
};

struct DebugResult {
  DebugMatrix matrix;
  Verdict verdict;
};

// Classifies every (step, log index) cell, then derives the verdict with
// classify_outcome.
DebugResult debug(const ApprovedFlow& flow, const LogSequence& logs, const StepClassifier& classifier,
                  const DebugOptions& options = {});

// Verdict from a complete matrix alone: earliest executed index per step,
// chronology check on consecutive present steps (strictly decreasing index is
// a violation), Pass / PartialPass / Fail. Step descriptions, when supplied,
// are quoted in the inference. Throws Error(IncompleteMatrix).
Verdict classify_outcome(const DebugMatrix& matrix, int step_count, bool strict_chronology = false,
                         const std::vector<FlowStep>* steps = nullptr);

}  // namespace oranval
