#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "oranval/classifier/classification.hpp"
#include "oranval/metrics/metrics.hpp"
#include "oranval/orchestrator/config.hpp"
#include "oranval/orchestrator/run_store.hpp"
#include "oranval/orchestrator/test_case.hpp"
#include "oranval/retrieval/approval.hpp"
#include "oranval/retrieval/vector_index.hpp"
#include "oranval/validation/engine.hpp"

namespace oranval {

// Milliseconds since the epoch. Injected so that reports are reproducible.
using Clock = std::function<std::int64_t()>;
Clock system_clock_ms();

struct Backends {
  std::shared_ptr<const EmbeddingClient> embedding;
  std::shared_ptr<const EmbeddingClient> metric_embedding;
  std::shared_ptr<const RerankerClient> reranker;
  std::shared_ptr<const GenerationClient> generator;
  std::shared_ptr<const StepClassifier> classifier;
};

Backends make_backends(const OrchestratorConfig& config);

// Val, then Debug iff Val failed. Shared by the orchestrator and the CLI.
struct Evaluation {
  ValResult val;
  std::optional<DebugResult> debug;
};

Evaluation evaluate(const ApprovedFlow& flow, const LogSequence& logs, const StepClassifier& classifier,
                    const DebugOptions& options = {});

nlohmann::json to_json(const RetrievalResult& r);
RetrievalResult retrieval_from_json(const nlohmann::json& j);

struct LogUpload {
  std::string name;
  std::string content;
};

enum class Decision { Approve, Reject };

struct ApprovalDecision {
  Decision decision = Decision::Approve;
  std::string operator_id;
  std::vector<StepEdit> edits;
};

struct RunOptions {
  bool auto_approve = false;
  std::string operator_id = "auto-approve";
  std::optional<std::string> run_id;
};

// Report document, schema "oranval.report/v1". Throws Error(Report) for an
// aborted run or one without a Val verdict.
nlohmann::json compile_report(const RunRecord& run, const TestCase& test_case,
                              const std::optional<FlowDistance>& distance = std::nullopt);

class Orchestrator {
 public:
  Orchestrator(OrchestratorConfig config, std::vector<TestCase> repository, std::shared_ptr<const VectorIndex> index,
               Backends backends, Clock clock = system_clock_ms());

  const OrchestratorConfig& config() const { return config_; }
  const RunStore& store() const { return store_; }
  const std::vector<TestCase>& test_cases() const { return repository_; }
  const TestCase& test_case(const std::string& id) const;

  // Query, retrieval, generation, then parks the run in AwaitingApproval.
  // Stage failures leave the run Aborted with its cause rather than throwing.
  RunRecord start_run(const std::string& tc_id, const LogUpload& logs,
                      const std::optional<std::string>& run_id = std::nullopt);

  // Approve: ingest, validate, debug on Fail, compile the report.
  // Reject: the run returns to FlowPending with a new draft carrying edits.
  RunRecord decide(const std::string& run_id, const ApprovalDecision& decision);

  // FlowPending -> AwaitingApproval with the current draft.
  RunRecord resubmit(const std::string& run_id);

  // start_run, then approve at once when options.auto_approve is set.
  RunRecord run_test_case(const std::string& tc_id, const LogUpload& logs, const RunOptions& options = {});

  // Loads and verifies a run. A run interrupted while validating or debugging
  // is carried to completion; any other state is returned as stored.
  RunRecord resume_run(const std::string& run_id);

  RunRecord get_run(const std::string& run_id) const;
  std::vector<std::string> list_runs() const { return store_.list(); }

  // Error(State) unless the run awaits approval.
  ApprovalTicket pending_approval(const std::string& run_id) const;
  // Error(NotFound) when the run has no debug matrix.
  DebugMatrix matrix(const std::string& run_id) const;
  std::string matrix_csv(const std::string& run_id) const;
  nlohmann::json report(const std::string& run_id) const;

 private:
  std::shared_ptr<std::mutex> run_lock(const std::string& run_id);
  std::string new_run_id(const std::string& tc_id);
  void execute_validation(RunRecord& run, const std::string& actor);
  void abort(RunRecord& run, const std::string& stage, const std::exception& e);
  std::optional<FlowDistance> score_flow(const RunRecord& run, const TestCase& tc) const;

  OrchestratorConfig config_;
  std::vector<TestCase> repository_;
  std::shared_ptr<const VectorIndex> index_;
  Backends backends_;
  Clock clock_;
  RunStore store_;
  std::string config_hash_;

  std::mutex locks_mu_;
  std::map<std::string, std::shared_ptr<std::mutex>> locks_;
  std::uint64_t id_counter_ = 0;
};

}  // namespace oranval
