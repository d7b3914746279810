#include "oranval/validation/engine.hpp"

#include <algorithm>
#include <map>
#include <mutex>

#include "oranval/common/parallel.hpp"
#include "oranval/common/text.hpp"

namespace oranval {

AbortedRunError::AbortedRunError(const std::string& message, std::vector<ClassificationResult> partial_trace,
                                 std::optional<DebugMatrix> partial_matrix)
    : Error(ErrorKind::AbortedRun, message), trace_(std::move(partial_trace)), matrix_(std::move(partial_matrix)) {}

namespace {

std::string describe(int step, const std::vector<FlowStep>* steps) {
  std::string out = "step " + std::to_string(step);
  if (steps && step >= 1 && step <= static_cast<int>(steps->size())) {
    out += " (" + (*steps)[static_cast<std::size_t>(step - 1)].description + ")";
  }
  return out;
}

void require_steps(const ApprovedFlow& flow) {
  if (flow.step_count() == 0) throw Error(ErrorKind::InvalidFlow, "procedural flow has no steps");
}

}  // namespace

ValResult validate(const ApprovedFlow& flow, const LogSequence& logs, const StepClassifier& classifier) {
  require_steps(flow);
  const auto& steps = flow.steps();
  const int step_count = flow.step_count();
  const int n = static_cast<int>(logs.size());

  ValResult out;
  if (n == 0) {
    out.verdict.kind = VerdictKind::Fail;
    for (int s = 1; s <= step_count; ++s) out.verdict.missing_steps.push_back(s);
    out.verdict.inference = "empty log";
    return out;
  }

  int s = 1;
  int i = 1;
  while (s <= step_count && i <= n) {
    ClassificationResult r;
    try {
      r = classifier.classify(steps[static_cast<std::size_t>(s - 1)], logs.at(i));
    } catch (const std::exception& e) {
      throw AbortedRunError("validation aborted at step " + std::to_string(s) + ", log index " + std::to_string(i) +
                                ": " + e.what(),
                            std::move(out.trace));
    }
    r.step_ordinal = s;
    r.log_index = i;
    const bool executed = r.executed();
    out.trace.push_back(std::move(r));
    if (executed) {
      out.verdict.matched_assignment.push_back({s, i});
      ++s;
    }
    ++i;
  }

  if (s <= step_count) {
    out.verdict.kind = VerdictKind::Fail;
    for (int k = s; k <= step_count; ++k) out.verdict.missing_steps.push_back(k);
    const int after = out.verdict.matched_assignment.empty() ? 0 : out.verdict.matched_assignment.back().log_index;
    out.verdict.inference = "validation converged at " + describe(s, &steps) + ": not found in log indices " +
                            std::to_string(after + 1) + ".." + std::to_string(n) + " after " +
                            std::to_string(s - 1) + " of " + std::to_string(step_count) + " steps matched";
  } else {
    out.verdict.kind = VerdictKind::Pass;
    out.verdict.inference = "all " + std::to_string(step_count) + " steps matched in chronological order";
  }
  return out;
}

DebugResult debug(const ApprovedFlow& flow, const LogSequence& logs, const StepClassifier& classifier,
                  const DebugOptions& options) {
  require_steps(flow);
  const auto& steps = flow.steps();
  const int step_count = flow.step_count();
  const int n = static_cast<int>(logs.size());

  DebugMatrix matrix(step_count, n);
  std::mutex matrix_mutex;
  const std::size_t cells = static_cast<std::size_t>(step_count) * static_cast<std::size_t>(n);
  try {
    bounded_parallel_for(cells, options.parallelism, [&](std::size_t c) {
      const int s = static_cast<int>(c / static_cast<std::size_t>(n)) + 1;
      const int i = static_cast<int>(c % static_cast<std::size_t>(n)) + 1;
      ClassificationResult r = classifier.classify(steps[static_cast<std::size_t>(s - 1)], logs.at(i));
      r.step_ordinal = s;
      r.log_index = i;
      std::lock_guard lock(matrix_mutex);
      matrix.set(std::move(r));
    });
  } catch (const std::exception& e) {
    throw AbortedRunError(std::string("debug aborted after ") + std::to_string(matrix.classified()) + " of " +
                              std::to_string(cells) + " cells: " + e.what(),
                          {}, std::move(matrix));
  }

  Verdict verdict = classify_outcome(matrix, step_count, options.strict_chronology, &steps);
  if (n == 0) verdict.inference = "empty log";
  return {std::move(matrix), std::move(verdict)};
}

Verdict classify_outcome(const DebugMatrix& matrix, int step_count, bool strict_chronology,
                         const std::vector<FlowStep>* steps) {
  if (!matrix.complete()) {
    throw Error(ErrorKind::IncompleteMatrix, "matrix has " + std::to_string(matrix.classified()) + " of " +
                                                 std::to_string(matrix.steps() * matrix.log_entries()) +
                                                 " cells classified");
  }
  if (matrix.steps() != step_count) {
    throw Error(ErrorKind::IncompleteMatrix, "matrix covers " + std::to_string(matrix.steps()) +
                                                 " steps, flow has " + std::to_string(step_count));
  }

  // Earliest executed index per step, in step order.
  std::vector<StepMatch> earliest;
  std::vector<int> missing;
  for (int s = 1; s <= step_count; ++s) {
    int first = 0;
    for (int i = 1; i <= matrix.log_entries(); ++i) {
      if (matrix.at(s, i)->executed()) {
        first = i;
        break;
      }
    }
    if (first == 0) {
      missing.push_back(s);
    } else {
      earliest.push_back({s, first});
    }
  }

  std::vector<OrderViolation> violations;
  for (std::size_t j = 0; j + 1 < earliest.size(); ++j) {
    const bool out_of_order = strict_chronology ? earliest[j + 1].log_index <= earliest[j].log_index
                                                : earliest[j + 1].log_index < earliest[j].log_index;
    if (out_of_order) violations.push_back({earliest[j], earliest[j + 1]});
  }

  Verdict v;
  v.matched_assignment = earliest;
  v.missing_steps = missing;
  v.out_of_order_pairs = violations;

  if (!missing.empty()) {
    v.kind = VerdictKind::Fail;
    std::vector<std::string> names;
    for (int s : missing) names.push_back(describe(s, steps));
    v.inference = "missing signaling: " + text::join(names, "; ") + (missing.size() == 1 ? " is" : " are") +
                  " absent from all " + std::to_string(matrix.log_entries()) + " log entries";
    if (!violations.empty()) v.inference += "; " + std::to_string(violations.size()) + " out-of-order step pair(s) also observed";
  } else if (!violations.empty()) {
    v.kind = VerdictKind::PartialPass;
    std::vector<std::string> details;
    for (const auto& p : violations) {
      details.push_back(describe(p.later.step, steps) + " executed prematurely at log index " +
                        std::to_string(p.later.log_index) + ", before step " + std::to_string(p.earlier.step) +
                        " at log index " + std::to_string(p.earlier.log_index));
    }
    v.inference = "Incorrect chronology in signaling sequence: ";
    if (violations.size() > 1) {
      v.inference += "multiple discrepancies in the expected chronology (" + std::to_string(violations.size()) +
                     " out-of-order step pairs): ";
    }
    v.inference += text::join(details, "; ");
  } else {
    v.kind = VerdictKind::Pass;
    v.inference = "all " + std::to_string(step_count) + " steps present in chronological order";
  }
  return v;
}

}  // namespace oranval
