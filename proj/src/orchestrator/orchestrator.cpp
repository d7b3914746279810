#include "oranval/orchestrator/orchestrator.hpp"

#include <cctype>
#include <chrono>
#include <cmath>
#include <random>

#include "oranval/backends/http.hpp"
#include "oranval/backends/offline.hpp"
#include "oranval/classifier/llm_classifier.hpp"
#include "oranval/common/error.hpp"
#include "oranval/common/text.hpp"
#include "oranval/log_ingest/ingest.hpp"
#include "oranval/orchestrator/repository.hpp"
#include "oranval/retrieval/flow_generator.hpp"
#include "oranval/retrieval/query_formatter.hpp"
#include "oranval/validation/matrix_export.hpp"

namespace oranval {

using nlohmann::json;

namespace {

constexpr const char* kLogSource = "logs.source";
constexpr const char* kLogs = "logs.json";
constexpr const char* kRetrieval = "retrieval.json";
constexpr const char* kFlow = "flow.json";
constexpr const char* kTicket = "ticket.json";
constexpr const char* kValTrace = "val_trace.json";
constexpr const char* kMatrix = "matrix.json";
constexpr const char* kMatrixCsv = "matrix.csv";
constexpr const char* kPartialMatrix = "matrix.partial.json";
constexpr const char* kReport = "report.json";

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::shared_ptr<const EmbeddingClient> make_embedding(const BackendSettings& s,
                                                      const std::shared_ptr<ConcurrencyLimiter>& limiter) {
  if (s.kind == "http") return std::make_shared<HttpEmbeddingClient>(s.http, limiter);
  return std::make_shared<HashingEmbedding>(s.dimension);
}

json trace_json(const std::vector<ClassificationResult>& trace) {
  json out = json::array();
  for (const auto& r : trace) out.push_back(to_json(r));
  return out;
}

class StageTimer {
 public:
  StageTimer(RunRecord& run, const Clock& clock, std::string stage)
      : run_(run), clock_(clock), stage_(std::move(stage)), start_(clock()) {}
  ~StageTimer() { run_.timings.push_back({stage_, clock_() - start_}); }
  StageTimer(const StageTimer&) = delete;
  StageTimer& operator=(const StageTimer&) = delete;

 private:
  RunRecord& run_;
  const Clock& clock_;
  std::string stage_;
  std::int64_t start_;
};

}  // namespace

Clock system_clock_ms() {
  return [] {
    return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::system_clock::now().time_since_epoch())
        .count();
  };
}

Backends make_backends(const OrchestratorConfig& config) {
  auto limiter = std::make_shared<ConcurrencyLimiter>(config.max_in_flight);
  Backends b;
  b.embedding = make_embedding(config.embedding, limiter);
  b.metric_embedding = make_embedding(config.metric_embedding, limiter);
  if (config.reranker.kind == "http") b.reranker = std::make_shared<HttpRerankerClient>(config.reranker.http, limiter);
  else b.reranker = std::make_shared<LexicalReranker>();
  if (config.generator.kind == "http") b.generator = std::make_shared<HttpChatClient>(config.generator.http, limiter);
  else b.generator = std::make_shared<ExtractiveGenerator>();
  if (config.classifier == "llm") {
    LlmClassifierOptions opts;
    opts.transport_retry = config.retry;
    b.classifier = std::make_shared<LlmClassifier>(std::make_shared<HttpChatClient>(config.chat.http, limiter), opts);
  } else {
    b.classifier = std::make_shared<DeterministicClassifier>(config.match_rules);
  }
  return b;
}

Evaluation evaluate(const ApprovedFlow& flow, const LogSequence& logs, const StepClassifier& classifier,
                    const DebugOptions& options) {
  Evaluation e{validate(flow, logs, classifier), std::nullopt};
  if (e.val.verdict.kind == VerdictKind::Fail) e.debug = debug(flow, logs, classifier, options);
  return e;
}

json to_json(const RetrievalResult& r) {
  json ranked = json::array();
  for (const auto& c : r.ranked) {
    json score = nullptr;
    if (c.rerank_score && std::isfinite(*c.rerank_score)) score = *c.rerank_score;
    ranked.push_back({{"chunk_id", c.chunk.chunk_id},
                      {"doc_id", c.chunk.doc_id},
                      {"section", c.chunk.section ? json(*c.chunk.section) : json(nullptr)},
                      {"text", c.chunk.text},
                      {"word_count", c.chunk.word_count},
                      {"distance", c.distance},
                      {"distance_rank", c.distance_rank},
                      {"rerank_score", score}});
  }
  return {{"schema", "oranval.retrieval/v1"},
          {"query", r.query},
          {"k_retrieve", r.k_retrieve},
          {"k_final", r.k_final},
          {"reranked", r.reranked},
          {"warnings", r.warnings},
          {"ranked", ranked}};
}

RetrievalResult retrieval_from_json(const json& j) {
  if (j.value("schema", "") != "oranval.retrieval/v1") throw SchemaError("not an oranval.retrieval/v1 document", "schema");
  RetrievalResult r;
  r.query = j.at("query").get<std::string>();
  r.k_retrieve = j.at("k_retrieve").get<std::size_t>();
  r.k_final = j.at("k_final").get<std::size_t>();
  r.reranked = j.at("reranked").get<bool>();
  r.warnings = j.at("warnings").get<std::vector<std::string>>();
  for (const auto& c : j.at("ranked")) {
    RankedChunk rc;
    rc.chunk.chunk_id = c.at("chunk_id").get<std::string>();
    rc.chunk.doc_id = c.at("doc_id").get<std::string>();
    if (!c.at("section").is_null()) rc.chunk.section = c.at("section").get<std::string>();
    rc.chunk.text = c.at("text").get<std::string>();
    rc.chunk.word_count = c.at("word_count").get<int>();
    rc.distance = c.at("distance").get<double>();
    rc.distance_rank = c.at("distance_rank").get<std::size_t>();
    if (!c.at("rerank_score").is_null()) rc.rerank_score = c.at("rerank_score").get<double>();
    r.ranked.push_back(std::move(rc));
  }
  return r;
}

json compile_report(const RunRecord& run, const TestCase& tc, const std::optional<FlowDistance>& distance) {
  if (run.state == RunState::Aborted) {
    throw Error(ErrorKind::Report, "run " + run.run_id + " was aborted during " + run.abort_stage.value_or("?") +
                                       ": " + run.abort_cause.value_or("unknown cause") +
                                       "; see its record.json for the abort record");
  }
  if (!run.val_verdict) throw Error(ErrorKind::Report, "run " + run.run_id + " has no validation verdict yet");

  const Verdict& evidence = run.debug_verdict ? *run.debug_verdict : *run.val_verdict;
  json trail = json::array();
  for (const auto& t : run.history) {
    if (t.from == RunState::AwaitingApproval || t.to == RunState::AwaitingApproval) {
      trail.push_back({{"from", to_string(t.from)}, {"to", to_string(t.to)}, {"at_ms", t.at_ms}, {"actor", t.actor}});
    }
  }
  json timings = json::array();
  for (const auto& t : run.timings) timings.push_back({{"stage", t.stage}, {"duration_ms", t.duration_ms}});
  json val_assignment = json::array();
  for (const auto& m : run.val_verdict->matched_assignment) {
    val_assignment.push_back({{"step", m.step}, {"log_index", m.log_index}});
  }
  json pairs = json::array();
  for (const auto& p : evidence.out_of_order_pairs) {
    pairs.push_back({{"earlier", {{"step", p.earlier.step}, {"log_index", p.earlier.log_index}}},
                     {"later", {{"step", p.later.step}, {"log_index", p.later.log_index}}}});
  }
  json metrics = json::object();
  metrics["flow_distance"] = distance ? to_json(*distance) : json(nullptr);

  return {{"schema", "oranval.report/v1"},
          {"run_id", run.run_id},
          {"test_case", to_json(tc)},
          {"state", to_string(run.state)},
          {"flow", to_json(run.flow)},
          {"approval_trail", trail},
          {"verdicts",
           {{"val", to_json(*run.val_verdict)},
            {"debug", run.debug_verdict ? to_json(*run.debug_verdict) : json(nullptr)}}},
          {"matched_assignment", val_assignment},
          {"evidence",
           {{"source", run.debug_verdict ? "debug" : "val"},
            {"missing_steps", evidence.missing_steps},
            {"out_of_order_pairs", pairs},
            {"inference", evidence.inference}}},
          {"matrix_ref", run.matrix_ref ? json(*run.matrix_ref) : json(nullptr)},
          {"logs_origin", run.logs_origin},
          {"classifier", run.classifier_id},
          {"timings", timings},
          {"metrics", metrics},
          {"config_hash", run.config_hash}};
}

Orchestrator::Orchestrator(OrchestratorConfig config, std::vector<TestCase> repository,
                           std::shared_ptr<const VectorIndex> index, Backends backends, Clock clock)
    : config_(std::move(config)),
      repository_(std::move(repository)),
      index_(std::move(index)),
      backends_(std::move(backends)),
      clock_(std::move(clock)),
      store_(config_.runs_dir),
      config_hash_(oranval::config_hash(config_)) {
  if (!backends_.classifier) throw Error(ErrorKind::Config, "orchestrator needs a step classifier");
}

const TestCase& Orchestrator::test_case(const std::string& id) const {
  for (const auto& tc : repository_) {
    if (tc.id == id) return tc;
  }
  throw Error(ErrorKind::NotFound, "unknown test case " + id);
}

std::shared_ptr<std::mutex> Orchestrator::run_lock(const std::string& run_id) {
  std::lock_guard lock(locks_mu_);
  auto& m = locks_[run_id];
  if (!m) m = std::make_shared<std::mutex>();
  return m;
}

std::string Orchestrator::new_run_id(const std::string& tc_id) {
  std::string prefix;
  for (char c : tc_id) prefix += std::isalnum(static_cast<unsigned char>(c)) ? c : '-';
  if (prefix.empty() || !std::isalnum(static_cast<unsigned char>(prefix.front()))) prefix = "run" + prefix;
  std::uint64_t n;
  {
    std::lock_guard lock(locks_mu_);
    n = ++id_counter_;
  }
  std::random_device rd;
  const std::string seed = std::to_string(clock_()) + "/" + std::to_string(n) + "/" + std::to_string(rd());
  return prefix + "-" + text::fnv1a64_hex(seed).substr(0, 12);
}

void Orchestrator::abort(RunRecord& run, const std::string& stage, const std::exception& e) {
  run.abort_stage = stage;
  if (const auto* err = dynamic_cast<const Error*>(&e)) {
    run.abort_cause = std::string(to_string(err->kind())) + ": " + err->what();
  } else {
    run.abort_cause = e.what();
  }
  if (const auto* aborted = dynamic_cast<const AbortedRunError*>(&e)) {
    store_.write_artifact(run, kValTrace, dump(trace_json(aborted->partial_trace())));
    if (aborted->partial_matrix()) store_.write_artifact(run, kPartialMatrix, dump(matrix_to_json(*aborted->partial_matrix())));
  }
  advance(run, RunState::Aborted, clock_());
  store_.save(run);
}

RunRecord Orchestrator::start_run(const std::string& tc_id, const LogUpload& logs,
                                  const std::optional<std::string>& requested_id) {
  const TestCase& tc = test_case(tc_id);
  if (logs.content.empty()) throw SchemaError("log upload is empty", "log");
  const std::string run_id = requested_id ? *requested_id : new_run_id(tc_id);
  check_run_id(run_id);
  auto lock = run_lock(run_id);
  std::lock_guard guard(*lock);
  if (store_.exists(run_id)) throw Error(ErrorKind::State, "run id " + run_id + " is already in use");

  RunRecord run;
  run.run_id = run_id;
  run.test_case_id = tc.id;
  run.logs_origin = logs.name.empty() ? std::string(kLogSource) : logs.name;
  run.config_hash = config_hash_;
  run.classifier_id = backends_.classifier->id();
  run.created_at_ms = clock_();
  store_.write_artifact(run, kLogSource, logs.content);
  store_.save(run);

  std::string stage = "query";
  try {
    advance(run, RunState::FlowPending, clock_());
    if (!index_ || !backends_.embedding || !backends_.reranker || !backends_.generator) {
      throw Error(ErrorKind::Config, "retrieval backends are not configured");
    }
    RetrievalResult context;
    {
      stage = "retrieval";
      StageTimer timer(run, clock_, stage);
      const std::string query = format_query(tc);
      auto candidates = retrieve(query, *index_, *backends_.embedding, config_.k_retrieve);
      context = rerank(candidates, *backends_.reranker, {config_.k_final, config_.parallelism});
    }
    store_.write_artifact(run, kRetrieval, dump(to_json(context)));
    {
      stage = "generation";
      StageTimer timer(run, clock_, stage);
      GenerationOptions opts;
      opts.retry = config_.retry;
      run.flow = generate_flow(context.query, context.ranked, *backends_.generator, opts);
    }
    stage = "approval";
    const ApprovalTicket ticket = submit_for_approval(run.flow, context.ranked, config_.k_approval);
    store_.write_artifact(run, kFlow, dump(to_json(run.flow)));
    store_.write_artifact(run, kTicket, dump(to_json(ticket)));
    advance(run, RunState::AwaitingApproval, clock_());
    store_.save(run);
  } catch (const std::exception& e) {
    abort(run, stage, e);
  }
  return run;
}

RunRecord Orchestrator::decide(const std::string& run_id, const ApprovalDecision& decision) {
  auto lock = run_lock(run_id);
  std::lock_guard guard(*lock);
  RunRecord run = store_.load(run_id);
  if (run.state != RunState::AwaitingApproval) {
    throw Error(ErrorKind::State, "run " + run_id + " is " + std::string(to_string(run.state)) +
                                      ", not AwaitingApproval");
  }
  if (text::trim(decision.operator_id).empty()) {
    throw Error(ErrorKind::State, "an authenticated operator id is required to decide on a flow");
  }
  if (decision.decision == Decision::Reject) {
    run.flow = reject(run.flow, decision.operator_id, decision.edits);
    advance(run, RunState::FlowPending, clock_(), decision.operator_id);
    store_.write_artifact(run, kFlow, dump(to_json(run.flow)));
    store_.save(run);
    return run;
  }
  approve(run.flow, decision.operator_id, decision.edits);
  advance(run, RunState::Validating, clock_(), decision.operator_id);
  store_.write_artifact(run, kFlow, dump(to_json(run.flow)));
  store_.save(run);
  execute_validation(run, decision.operator_id);
  return run;
}

RunRecord Orchestrator::resubmit(const std::string& run_id) {
  auto lock = run_lock(run_id);
  std::lock_guard guard(*lock);
  RunRecord run = store_.load(run_id);
  if (run.state != RunState::FlowPending || run.flow.steps.empty()) {
    throw Error(ErrorKind::State, "run " + run_id + " has no draft flow to resubmit");
  }
  const auto context = retrieval_from_json(json::parse(store_.read_artifact(run, kRetrieval)));
  const ApprovalTicket ticket = submit_for_approval(run.flow, context.ranked, config_.k_approval);
  store_.write_artifact(run, kFlow, dump(to_json(run.flow)));
  store_.write_artifact(run, kTicket, dump(to_json(ticket)));
  advance(run, RunState::AwaitingApproval, clock_());
  store_.save(run);
  return run;
}

RunRecord Orchestrator::run_test_case(const std::string& tc_id, const LogUpload& logs, const RunOptions& options) {
  RunRecord run = start_run(tc_id, logs, options.run_id);
  if (options.auto_approve && run.state == RunState::AwaitingApproval) {
    run = decide(run.run_id, {Decision::Approve, options.operator_id, {}});
  }
  return run;
}

std::optional<FlowDistance> Orchestrator::score_flow(const RunRecord& run, const TestCase& tc) const {
  const auto truth = ground_truth_steps(tc);
  if (truth.empty() || run.flow.steps.empty() || !backends_.metric_embedding) return std::nullopt;
  try {
    return flow_distance(canonical_flow_text(run.flow), canonical_flow_text(truth), *backends_.metric_embedding,
                         config_.retry);
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

void Orchestrator::execute_validation(RunRecord& run, const std::string& actor) {
  std::string stage = "ingest";
  try {
    LogSequence logs;
    {
      StageTimer timer(run, clock_, stage);
      store_.read_artifact(run, kLogSource);
      logs = ingest_file(store_.dir(run.run_id) / kLogSource, config_.dissector, config_.protocols, run.logs_origin);
    }
    store_.write_artifact(run, kLogs, serialize_canonical(logs));

    const ApprovedFlow flow = ApprovedFlow::from(run.flow);
    if (run.state == RunState::Validating) {
      stage = "validate";
      ValResult val;
      {
        StageTimer timer(run, clock_, stage);
        val = validate(flow, logs, *backends_.classifier);
      }
      store_.write_artifact(run, kValTrace, dump(trace_json(val.trace)));
      run.val_verdict = val.verdict;
      if (val.verdict.kind == VerdictKind::Fail) {
        advance(run, RunState::Debugging, clock_(), actor);
        store_.save(run);
      }
    }
    if (run.state == RunState::Debugging) {
      stage = "debug";
      DebugResult result;
      {
        StageTimer timer(run, clock_, stage);
        result = debug(flow, logs, *backends_.classifier, {config_.parallelism, config_.strict_debug_chronology});
      }
      store_.write_artifact(run, kMatrix, dump(matrix_to_json(result.matrix)));
      store_.write_artifact(run, kMatrixCsv, matrix_to_csv(result.matrix));
      run.matrix_ref = kMatrix;
      run.debug_verdict = result.verdict;
    }
    advance(run, RunState::Completed, clock_(), actor);
    stage = "report";
    const TestCase& tc = test_case(run.test_case_id);
    const json report = compile_report(run, tc, score_flow(run, tc));
    store_.write_artifact(run, kReport, dump(report));
    run.report_ref = kReport;
    store_.save(run);
  } catch (const std::exception& e) {
    abort(run, stage, e);
  }
}

RunRecord Orchestrator::resume_run(const std::string& run_id) {
  auto lock = run_lock(run_id);
  std::lock_guard guard(*lock);
  RunRecord run = store_.load(run_id);
  if (run.state == RunState::Validating || run.state == RunState::Debugging) {
    std::erase_if(run.timings, [&](const StageTiming& t) {
      return t.stage == "ingest" || t.stage == "debug" || (run.state == RunState::Validating && t.stage == "validate");
    });
    execute_validation(run, "resume");
  }
  return run;
}

RunRecord Orchestrator::get_run(const std::string& run_id) const { return store_.load(run_id); }

ApprovalTicket Orchestrator::pending_approval(const std::string& run_id) const {
  const RunRecord run = store_.load(run_id);
  if (run.state != RunState::AwaitingApproval) {
    throw Error(ErrorKind::State, "run " + run_id + " is " + std::string(to_string(run.state)) +
                                      ", not AwaitingApproval");
  }
  return ticket_from_json(json::parse(store_.read_artifact(run, kTicket)));
}

DebugMatrix Orchestrator::matrix(const std::string& run_id) const {
  const RunRecord run = store_.load(run_id);
  if (!run.matrix_ref) throw Error(ErrorKind::NotFound, "run " + run_id + " has no debug matrix");
  return matrix_from_json(json::parse(store_.read_artifact(run, *run.matrix_ref)));
}

std::string Orchestrator::matrix_csv(const std::string& run_id) const {
  const RunRecord run = store_.load(run_id);
  if (!run.matrix_ref) throw Error(ErrorKind::NotFound, "run " + run_id + " has no debug matrix");
  return store_.read_artifact(run, kMatrixCsv);
}

json Orchestrator::report(const std::string& run_id) const {
  const RunRecord run = store_.load(run_id);
  if (run.state == RunState::Aborted) compile_report(run, test_case(run.test_case_id));
  if (!run.report_ref) {
    throw Error(ErrorKind::State, "run " + run_id + " is " + std::string(to_string(run.state)) +
                                      " and has no report yet");
  }
  return json::parse(store_.read_artifact(run, *run.report_ref));
}

}  // namespace oranval
