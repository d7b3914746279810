#include "oranval/orchestrator/run_record.hpp"

#include "oranval/common/error.hpp"

namespace oranval {

using nlohmann::json;

std::string_view to_string(RunState s) {
  switch (s) {
    case RunState::Created: return "Created";
    case RunState::FlowPending: return "FlowPending";
    case RunState::AwaitingApproval: return "AwaitingApproval";
    case RunState::Validating: return "Validating";
    case RunState::Debugging: return "Debugging";
    case RunState::Completed: return "Completed";
    case RunState::Aborted: return "Aborted";
  }
  return "Created";
}

std::optional<RunState> parse_run_state(std::string_view s) {
  for (auto st : {RunState::Created, RunState::FlowPending, RunState::AwaitingApproval, RunState::Validating,
                  RunState::Debugging, RunState::Completed, RunState::Aborted}) {
    if (to_string(st) == s) return st;
  }
  return std::nullopt;
}

bool transition_allowed(RunState from, RunState to) {
  using S = RunState;
  if (from == S::Completed || from == S::Aborted) return false;
  if (to == S::Aborted) return true;
  switch (from) {
    case S::Created: return to == S::FlowPending;
    case S::FlowPending: return to == S::AwaitingApproval;
    case S::AwaitingApproval: return to == S::Validating || to == S::FlowPending;
    case S::Validating: return to == S::Completed || to == S::Debugging;
    case S::Debugging: return to == S::Completed;
    default: return false;
  }
}

void advance(RunRecord& run, RunState to, std::int64_t at_ms, std::string actor) {
  if (!transition_allowed(run.state, to)) {
    throw Error(ErrorKind::State, "run " + run.run_id + ": illegal transition " + std::string(to_string(run.state)) +
                                      " -> " + std::string(to_string(to)));
  }
  if (to == RunState::Completed && !run.val_verdict) {
    throw Error(ErrorKind::State, "run " + run.run_id + ": cannot complete without a validation verdict");
  }
  if (to == RunState::Debugging && (!run.val_verdict || run.val_verdict->kind != VerdictKind::Fail)) {
    throw Error(ErrorKind::State, "run " + run.run_id + ": debug stage requires a failed validation");
  }
  run.history.push_back({run.state, to, at_ms, std::move(actor)});
  run.state = to;
}

namespace {

template <typename T>
json opt(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

json opt_verdict(const std::optional<Verdict>& v) { return v ? to_json(*v) : json(nullptr); }

std::optional<std::string> opt_string(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<std::string>();
}

}  // namespace

json to_json(const RunRecord& run) {
  json history = json::array();
  for (const auto& t : run.history) {
    history.push_back({{"from", to_string(t.from)}, {"to", to_string(t.to)}, {"at_ms", t.at_ms}, {"actor", t.actor}});
  }
  json timings = json::array();
  for (const auto& t : run.timings) timings.push_back({{"stage", t.stage}, {"duration_ms", t.duration_ms}});
  return {{"schema", "oranval.run/v1"},
          {"run_id", run.run_id},
          {"test_case_id", run.test_case_id},
          {"state", to_string(run.state)},
          {"flow", to_json(run.flow)},
          {"logs_origin", run.logs_origin},
          {"val_verdict", opt_verdict(run.val_verdict)},
          {"debug_verdict", opt_verdict(run.debug_verdict)},
          {"matrix_ref", opt(run.matrix_ref)},
          {"report_ref", opt(run.report_ref)},
          {"timings", timings},
          {"abort_stage", opt(run.abort_stage)},
          {"abort_cause", opt(run.abort_cause)},
          {"config_hash", run.config_hash},
          {"classifier", run.classifier_id},
          {"created_at_ms", run.created_at_ms},
          {"history", history},
          {"artifacts", run.artifacts}};
}

RunRecord run_from_json(const json& j) {
  if (j.value("schema", "") != "oranval.run/v1") throw SchemaError("not an oranval.run/v1 document", "schema");
  RunRecord r;
  r.run_id = j.at("run_id").get<std::string>();
  r.test_case_id = j.at("test_case_id").get<std::string>();
  const auto state = parse_run_state(j.at("state").get<std::string>());
  if (!state) throw SchemaError("unknown run state", "state");
  r.state = *state;
  r.flow = flow_from_json(j.at("flow"));
  r.logs_origin = j.at("logs_origin").get<std::string>();
  if (!j.at("val_verdict").is_null()) r.val_verdict = verdict_from_json(j.at("val_verdict"));
  if (!j.at("debug_verdict").is_null()) r.debug_verdict = verdict_from_json(j.at("debug_verdict"));
  r.matrix_ref = opt_string(j, "matrix_ref");
  r.report_ref = opt_string(j, "report_ref");
  for (const auto& t : j.at("timings")) r.timings.push_back({t.at("stage"), t.at("duration_ms")});
  r.abort_stage = opt_string(j, "abort_stage");
  r.abort_cause = opt_string(j, "abort_cause");
  r.config_hash = j.at("config_hash").get<std::string>();
  r.classifier_id = j.at("classifier").get<std::string>();
  r.created_at_ms = j.at("created_at_ms").get<std::int64_t>();
  for (const auto& t : j.at("history")) {
    const auto from = parse_run_state(t.at("from").get<std::string>());
    const auto to = parse_run_state(t.at("to").get<std::string>());
    if (!from || !to) throw SchemaError("unknown run state in history", "history");
    r.history.push_back({*from, *to, t.at("at_ms").get<std::int64_t>(), t.at("actor").get<std::string>()});
  }
  r.artifacts = j.at("artifacts").get<std::map<std::string, std::string>>();
  return r;
}

}  // namespace oranval
