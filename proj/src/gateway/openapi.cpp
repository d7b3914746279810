#include "oranval/gateway/gateway.hpp"

namespace oranval {

using nlohmann::json;

namespace {

json ref(const std::string& name) { return {{"$ref", "#/components/schemas/" + name}}; }

json str() { return {{"type", "string"}}; }
json integer() { return {{"type", "integer"}}; }
json nullable(json schema) { return {{"oneOf", {std::move(schema), {{"type", "null"}}}}}; }
json array_of(json items) { return {{"type", "array"}, {"items", std::move(items)}}; }

json object(json properties, std::vector<std::string> required) {
  return {{"type", "object"}, {"properties", std::move(properties)}, {"required", std::move(required)}};
}

json reply(const std::string& schema, const std::string& description = "OK") {
  return {{"description", description}, {"content", {{"application/json", {{"schema", ref(schema)}}}}}};
}

json errors(std::initializer_list<int> codes, json responses) {
  for (int c : codes) responses[std::to_string(c)] = reply("Error", "error");
  return responses;
}

json run_id_param() {
  return {{"name", "run_id"}, {"in", "path"}, {"required", true}, {"schema", str()}};
}

}  // namespace

json Gateway::openapi() {
  json schemas;
  schemas["Error"] = object({{"error", object({{"code", str()}, {"message", str()}, {"field", str()}},
                                              {"code", "message"})}},
                            {"error"});
  schemas["TestCase"] = object({{"id", str()},
                                {"title", str()},
                                {"category", {{"type", "string"}, {"enum", {"interoperability", "e2e", "conformance", "security"}}}},
                                {"components", array_of(str())},
                                {"interfaces", array_of(str())},
                                {"spec_refs", array_of(str())},
                                {"description", str()},
                                {"has_ground_truth", {{"type", "boolean"}}},
                                {"ground_truth_label", nullable(ref("VerdictKind"))}},
                               {"id", "title", "category"});
  schemas["TestCaseList"] = object({{"schema", str()}, {"test_cases", array_of(ref("TestCase"))}}, {"test_cases"});
  schemas["VerdictKind"] = {{"type", "string"}, {"enum", {"Pass", "PartialPass", "Fail"}}};
  schemas["StepMatch"] = object({{"step", integer()}, {"log_index", integer()}}, {"step", "log_index"});
  schemas["Verdict"] = object({{"kind", ref("VerdictKind")},
                               {"matched_assignment", array_of(ref("StepMatch"))},
                               {"missing_steps", array_of(integer())},
                               {"out_of_order_pairs",
                                array_of(object({{"earlier", ref("StepMatch")}, {"later", ref("StepMatch")}},
                                                {"earlier", "later"}))},
                               {"inference", str()}},
                              {"kind", "matched_assignment", "missing_steps", "out_of_order_pairs", "inference"});
  schemas["FlowStep"] = object({{"ordinal", integer()},
                                {"description", str()},
                                {"message_name", nullable(str())},
                                {"endpoints", nullable(object({{"sender", str()}, {"receiver", str()}}, {"sender", "receiver"}))},
                                {"qualifier", nullable(str())},
                                {"protocol", nullable(str())}},
                               {"ordinal", "description"});
  schemas["Flow"] = object({{"schema", {{"const", "oranval.flow/v1"}}},
                            {"steps", array_of(ref("FlowStep"))},
                            {"provenance", array_of(object({{"doc_id", str()}, {"rank", integer()}, {"chunk_id", str()}},
                                                           {"doc_id", "rank", "chunk_id"}))},
                            {"approval", {{"type", "string"}, {"enum", {"Draft", "PendingApproval", "Approved", "Rejected"}}}},
                            {"approved_by", nullable(str())},
                            {"edits", array_of(object({{"ordinal", integer()}, {"before", str()}, {"after", str()},
                                                       {"operator", str()}},
                                                      {"ordinal", "before", "after", "operator"}))},
                            {"notes", array_of(str())}},
                           {"schema", "steps", "approval"});
  schemas["RunState"] = {{"type", "string"},
                         {"enum", {"Created", "FlowPending", "AwaitingApproval", "Validating", "Debugging", "Completed",
                                   "Aborted"}}};
  schemas["Run"] = object({{"schema", {{"const", "oranval.run/v1"}}},
                           {"run_id", str()},
                           {"test_case_id", str()},
                           {"state", ref("RunState")},
                           {"flow", ref("Flow")},
                           {"logs_origin", str()},
                           {"val_verdict", nullable(ref("Verdict"))},
                           {"debug_verdict", nullable(ref("Verdict"))},
                           {"matrix_ref", nullable(str())},
                           {"report_ref", nullable(str())},
                           {"timings", array_of(object({{"stage", str()}, {"duration_ms", integer()}}, {"stage", "duration_ms"}))},
                           {"abort_stage", nullable(str())},
                           {"abort_cause", nullable(str())},
                           {"config_hash", str()},
                           {"classifier", str()},
                           {"history", array_of(object({{"from", ref("RunState")}, {"to", ref("RunState")},
                                                        {"at_ms", integer()}, {"actor", str()}},
                                                       {"from", "to", "at_ms", "actor"}))}},
                          {"schema", "run_id", "test_case_id", "state"});
  schemas["Approval"] = object({{"schema", {{"const", "oranval.approval/v1"}}},
                                {"run_id", str()},
                                {"state", ref("RunState")},
                                {"steps", array_of(ref("FlowStep"))},
                                {"references", array_of(object({{"rank", integer()}, {"doc_id", str()},
                                                                {"section", nullable(str())}, {"chunk_id", str()},
                                                                {"excerpt", str()}},
                                                               {"rank", "doc_id", "chunk_id", "excerpt"}))}},
                               {"schema", "run_id", "steps", "references"});
  schemas["ApprovalDecision"] = object({{"decision", {{"type", "string"}, {"enum", {"approve", "reject"}}}},
                                        {"edits", array_of(object({{"ordinal", integer()}, {"description", str()}},
                                                                  {"ordinal", "description"}))}},
                                       {"decision"});
  schemas["CreateRun"] = object({{"test_case_id", str()},
                                 {"run_id", str()},
                                 {"log", object({{"name", str()}, {"content", str()}}, {"content"})}},
                                {"test_case_id", "log"});
  schemas["Verdicts"] = object({{"schema", {{"const", "oranval.verdicts/v1"}}},
                                {"run_id", str()},
                                {"state", ref("RunState")},
                                {"val", nullable(ref("Verdict"))},
                                {"debug", nullable(ref("Verdict"))}},
                               {"run_id", "state", "val", "debug"});
  schemas["MatrixCell"] = nullable(object({{"label", {{"type", "string"}, {"enum", {"Executed", "NotExecuted"}}}},
                                           {"confidence", integer()},
                                           {"explanation_ref", integer()},
                                           {"backend", str()}},
                                          {"label", "confidence", "explanation_ref"}));
  schemas["Matrix"] = object({{"schema", {{"const", "oranval.matrix/v1"}}},
                              {"steps", integer()},
                              {"log_entries", integer()},
                              {"grid", array_of(array_of(ref("MatrixCell")))},
                              {"explanations", array_of(str())}},
                             {"schema", "steps", "log_entries", "grid", "explanations"});
  schemas["Report"] = object({{"schema", {{"const", "oranval.report/v1"}}},
                              {"run_id", str()},
                              {"test_case", ref("TestCase")},
                              {"flow", ref("Flow")},
                              {"verdicts", object({{"val", ref("Verdict")}, {"debug", nullable(ref("Verdict"))}}, {"val", "debug"})},
                              {"matched_assignment", array_of(ref("StepMatch"))},
                              {"evidence", object({{"source", str()}, {"missing_steps", array_of(integer())},
                                                   {"out_of_order_pairs", {{"type", "array"}}}, {"inference", str()}},
                                                  {"missing_steps", "out_of_order_pairs", "inference"})},
                              {"matrix_ref", nullable(str())},
                              {"config_hash", str()}},
                             {"schema", "run_id", "verdicts", "evidence", "config_hash"});

  const json idem = {{"name", "Idempotency-Key"}, {"in", "header"}, {"required", false}, {"schema", str()}};
  json paths;
  paths["/api/v1/health"]["get"] = {{"summary", "Liveness"}, {"security", json::array()},
                                     {"responses", {{"200", {{"description", "OK"}}}}}};
  paths["/api/v1/openapi.json"]["get"] = {{"summary", "This document"}, {"security", json::array()},
                                          {"responses", {{"200", {{"description", "OK"}}}}}};
  paths["/api/v1/test-cases"]["get"] = {{"summary", "List test cases"},
                                        {"responses", errors({401}, {{"200", reply("TestCaseList")}})}};
  paths["/api/v1/test-cases/{id}"]["get"] = {
      {"summary", "One test case"},
      {"parameters", {{{"name", "id"}, {"in", "path"}, {"required", true}, {"schema", str()}}}},
      {"responses", errors({401, 404}, {{"200", reply("TestCase")}})}};
  paths["/api/v1/runs"]["get"] = {{"summary", "List runs"}, {"responses", errors({401}, {{"200", {{"description", "OK"}}}})}};
  paths["/api/v1/runs"]["post"] = {
      {"summary", "Create a run; it parks in AwaitingApproval"},
      {"parameters", {idem}},
      {"requestBody",
       {{"required", true},
        {"content",
         {{"application/json", {{"schema", ref("CreateRun")}}},
          {"multipart/form-data",
           {{"schema", object({{"test_case_id", str()}, {"run_id", str()}, {"log", {{"type", "string"}, {"format", "binary"}}}},
                              {"test_case_id", "log"})}}}}}}},
      {"responses", errors({400, 401, 404, 409, 422}, {{"201", reply("Run")}})}};
  paths["/api/v1/runs/{run_id}"]["get"] = {{"summary", "Run state"},
                                           {"parameters", {run_id_param()}},
                                           {"responses", errors({401, 404, 500}, {{"200", reply("Run")}})}};
  paths["/api/v1/runs/{run_id}/approval"]["get"] = {
      {"summary", "Pending approval payload: flow steps and top specification excerpts"},
      {"parameters", {run_id_param()}},
      {"responses", errors({401, 404, 409}, {{"200", reply("Approval")}})}};
  paths["/api/v1/runs/{run_id}/approval"]["post"] = {
      {"summary", "Approve or reject the flow, optionally with step edits"},
      {"parameters",
       {run_id_param(), idem, {{"name", "X-Operator-Id"}, {"in", "header"}, {"required", true}, {"schema", str()}}}},
      {"requestBody", {{"required", true}, {"content", {{"application/json", {{"schema", ref("ApprovalDecision")}}}}}}},
      {"responses", errors({400, 401, 404, 409, 422}, {{"200", reply("Run")}})}};
  paths["/api/v1/runs/{run_id}/resubmit"]["post"] = {
      {"summary", "Resubmit a rejected draft for approval"},
      {"parameters", {run_id_param(), idem}},
      {"responses", errors({401, 404, 409, 422}, {{"200", reply("Run")}})}};
  paths["/api/v1/runs/{run_id}/verdicts"]["get"] = {{"summary", "Val and Debug verdicts"},
                                                    {"parameters", {run_id_param()}},
                                                    {"responses", errors({401, 404}, {{"200", reply("Verdicts")}})}};
  paths["/api/v1/runs/{run_id}/matrix"]["get"] = {
      {"summary", "Debug matrix"},
      {"parameters",
       {run_id_param(),
        {{"name", "format"}, {"in", "query"}, {"required", false},
         {"schema", {{"type", "string"}, {"enum", {"json", "csv"}}}}}}},
      {"responses",
       errors({400, 401, 404},
              {{"200", {{"description", "OK"},
                        {"content", {{"application/json", {{"schema", ref("Matrix")}}},
                                     {"text/csv", {{"schema", str()}}}}}}}})}};
  paths["/api/v1/runs/{run_id}/report"]["get"] = {{"summary", "Compiled report"},
                                                  {"parameters", {run_id_param()}},
                                                  {"responses", errors({401, 404, 409}, {{"200", reply("Report")}})}};

  return {{"openapi", "3.1.0"},
          {"info", {{"title", "oranval gateway"}, {"version", "1.0.0"}}},
          {"servers", {{{"url", "/"}}}},
          {"security", {{{"bearer", json::array()}}}},
          {"components",
           {{"schemas", schemas},
            {"securitySchemes", {{"bearer", {{"type", "http"}, {"scheme", "bearer"}}}}}}},
          {"paths", paths}};
}

}  // namespace oranval
