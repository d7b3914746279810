#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "oranval/retrieval/flow.hpp"
#include "oranval/validation/verdict.hpp"

namespace oranval {

enum class RunState { Created, FlowPending, AwaitingApproval, Validating, Debugging, Completed, Aborted };

std::string_view to_string(RunState s);
std::optional<RunState> parse_run_state(std::string_view s);

// Created -> FlowPending -> AwaitingApproval -> Validating -> Completed
//                  ^               |                |
//                  +--- reject ----+                +-> Debugging -> Completed
// Any non-terminal state may move to Aborted.
bool transition_allowed(RunState from, RunState to);

struct Transition {
  RunState from = RunState::Created;
  RunState to = RunState::Created;
  std::int64_t at_ms = 0;
  std::string actor;

  friend bool operator==(const Transition&, const Transition&) = default;
};

struct StageTiming {
  std::string stage;
  std::int64_t duration_ms = 0;

  friend bool operator==(const StageTiming&, const StageTiming&) = default;
};

struct RunRecord {
  std::string run_id;
  std::string test_case_id;
  RunState state = RunState::Created;
  ProceduralFlow flow;
  std::string logs_origin;
  std::optional<Verdict> val_verdict;
  std::optional<Verdict> debug_verdict;
  std::optional<std::string> matrix_ref;
  std::optional<std::string> report_ref;
  std::vector<StageTiming> timings;
  std::optional<std::string> abort_stage;
  std::optional<std::string> abort_cause;
  std::string config_hash;
  std::string classifier_id;
  std::int64_t created_at_ms = 0;
  std::vector<Transition> history;
  // Artifact file name -> checksum of its content.
  std::map<std::string, std::string> artifacts;

  friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

// Applies the transition and appends it to history; Error(State) if illegal.
// Completed additionally requires a Val verdict, Debugging a Val Fail.
void advance(RunRecord& run, RunState to, std::int64_t at_ms, std::string actor = "system");

nlohmann::json to_json(const RunRecord& run);
RunRecord run_from_json(const nlohmann::json& j);

}  // namespace oranval
