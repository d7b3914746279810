// oranval: headless front end to the orchestrator.
//
// Exit codes: 0 Pass, 1 Fail, 2 PartialPass (debug), 3 error or usage
// error, 4 run parked awaiting approval.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "oranval/backends/offline.hpp"
#include "oranval/common/error.hpp"
#include "oranval/common/file_io.hpp"
#include "oranval/gateway/gateway.hpp"
#include "oranval/log_ingest/ingest.hpp"
#include "oranval/metrics/metrics.hpp"
#include "oranval/orchestrator/orchestrator.hpp"
#include "oranval/orchestrator/repository.hpp"
#include "oranval/retrieval/chunker.hpp"
#include "oranval/validation/matrix_export.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace oranval;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitPartial = 2;
constexpr int kExitError = 3;
constexpr int kExitParked = 4;

struct Globals {
  std::string config_path;
  bool quiet = false;
  bool verbose = false;
};

OrchestratorConfig load_settings(const Globals& g) {
  if (!g.config_path.empty()) return load_config(g.config_path);
  if (fs::exists("oranval.yaml")) return load_config("oranval.yaml");
  return config_from_yaml("", fs::current_path());
}

Clock cli_clock() {
  if (const char* fixed = std::getenv("ORANVAL_FIXED_CLOCK_MS"); fixed && *fixed) {
    const std::int64_t value = std::stoll(fixed);
    return [value] { return value; };
  }
  return system_clock_ms();
}

std::shared_ptr<const VectorIndex> open_index(const OrchestratorConfig& c, const Backends& b, const Globals& g) {
  if (fs::exists(c.index_path)) return std::make_shared<VectorIndex>(VectorIndex::load(c.index_path));
  if (fs::is_directory(c.corpus_dir)) {
    if (g.verbose) std::cerr << "index " << c.index_path << " not found; indexing " << c.corpus_dir << " in memory\n";
    return std::make_shared<VectorIndex>(
        build_index(chunk_corpus(c.corpus_dir, c.chunking), *b.embedding, {c.retry, c.parallelism}));
  }
  return nullptr;
}

std::unique_ptr<Orchestrator> open_orchestrator(const Globals& g) {
  auto config = load_settings(g);
  auto repo = load_repository(config.repository_dir);
  auto backends = make_backends(config);
  auto index = open_index(config, backends, g);
  return std::make_unique<Orchestrator>(std::move(config), std::move(repo), std::move(index), std::move(backends),
                                        cli_clock());
}

void print(const json& j) { std::cout << j.dump(2) << "\n"; }

int verdict_exit(const std::optional<Verdict>& val, const std::optional<Verdict>& debug) {
  if (!val) return kExitError;
  if (val->kind == VerdictKind::Pass) return kExitPass;
  if (debug && debug->kind == VerdictKind::PartialPass) return kExitPartial;
  return kExitFail;
}

int run_exit(const RunRecord& run) {
  switch (run.state) {
    case RunState::Completed: return verdict_exit(run.val_verdict, run.debug_verdict);
    case RunState::AwaitingApproval:
    case RunState::FlowPending: return kExitParked;
    default: return kExitError;
  }
}

void print_run(const RunRecord& run, const Globals& g) {
  if (g.quiet) return;
  json j = to_json(run);
  j.erase("artifacts");
  print(j);
}

ApprovedFlow load_approved_flow(const std::string& path) {
  json j;
  try {
    j = json::parse(io::read_file(path));
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("flow file is not JSON: ") + e.what(), e.byte);
  }
  return ApprovedFlow::from(flow_from_json(j));
}

std::vector<StepEdit> parse_edit_flags(const std::vector<std::string>& flags) {
  std::vector<StepEdit> edits;
  for (const auto& f : flags) {
    const auto eq = f.find('=');
    if (eq == std::string::npos || eq == 0) throw Error(ErrorKind::Usage, "--edit expects N=new step text, got " + f);
    edits.push_back({std::stoi(f.substr(0, eq)), f.substr(eq + 1)});
  }
  return edits;
}

void hitl_bypass_notice() {
  std::cerr << "\n"
            << "************************************************************\n"
            << "*  WARNING: --auto-approve BYPASSES THE HUMAN APPROVAL GATE *\n"
            << "*  The generated flow is approved without operator review. *\n"
            << "*  Use only in CI with deterministic backends.             *\n"
            << "************************************************************\n\n";
}

std::map<std::string, VerdictKind> read_truth(const std::string& path) {
  std::map<std::string, VerdictKind> out;
  const json j = json::parse(io::read_file(path));
  for (const auto& [id, v] : j.items()) {
    const auto k = parse_verdict_kind(v.get<std::string>());
    if (!k) throw SchemaError("unknown verdict for " + id, "$." + id);
    out[id] = *k;
  }
  return out;
}

std::map<std::string, PredictedVerdicts> read_predictions(const std::string& path) {
  std::map<std::string, PredictedVerdicts> out;
  const json j = json::parse(io::read_file(path));
  for (const auto& [id, v] : j.items()) {
    PredictedVerdicts p;
    const auto val = parse_verdict_kind(v.at("val").get<std::string>());
    if (!val) throw SchemaError("unknown val verdict for " + id, "$." + id + ".val");
    p.val = *val;
    if (v.contains("debug") && !v.at("debug").is_null()) {
      p.debug = parse_verdict_kind(v.at("debug").get<std::string>());
      if (!p.debug) throw SchemaError("unknown debug verdict for " + id, "$." + id + ".debug");
    }
    out[id] = p;
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"O-RAN signaling test orchestrator"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("-c,--config", g.config_path, "Configuration file (default ./oranval.yaml)");
  auto* quiet = app.add_flag("-q,--quiet", g.quiet, "Print nothing but errors");
  auto* verbose = app.add_flag("-v,--verbose", g.verbose, "Print progress to stderr");
  quiet->excludes(verbose);

  int exit_code = kExitPass;

  // index build <corpus>
  auto* index_cmd = app.add_subcommand("index", "Specification index");
  index_cmd->require_subcommand(1);
  auto* index_build = index_cmd->add_subcommand("build", "Chunk and embed a corpus directory");
  std::string corpus;
  std::string index_out;
  index_build->add_option("corpus", corpus, "Corpus directory")->required();
  index_build->add_option("-o,--out", index_out, "Index file (default: config index_path)");
  index_build->callback([&] {
    const auto config = load_settings(g);
    const auto backends = make_backends(config);
    const auto chunks = chunk_corpus(corpus, config.chunking);
    const auto index = build_index(chunks, *backends.embedding, {config.retry, config.parallelism});
    const fs::path out = index_out.empty() ? config.index_path : fs::path(index_out);
    index.save(out);
    if (!g.quiet) {
      print({{"index", out.string()}, {"chunks", index.size()}, {"dimension", index.dimension()},
             {"embedding", backends.embedding->id()}});
    }
  });

  // ingest <capture|log>
  auto* ingest_cmd = app.add_subcommand("ingest", "Normalize a capture or log file to the canonical log schema");
  std::string ingest_in;
  std::string ingest_out;
  std::vector<std::string> ingest_protocols;
  ingest_cmd->add_option("input", ingest_in, "Capture or log file")->required()->check(CLI::ExistingFile);
  ingest_cmd->add_option("-o,--out", ingest_out, "Write canonical JSON here instead of stdout");
  ingest_cmd->add_option("-p,--protocol", ingest_protocols, "Keep only these protocol layers");
  ingest_cmd->callback([&] {
    const auto config = load_settings(g);
    ProtocolFilter filter = config.protocols;
    if (!ingest_protocols.empty()) filter = std::set<std::string>(ingest_protocols.begin(), ingest_protocols.end());
    const auto seq = ingest_file(ingest_in, config.dissector, filter);
    const auto text = serialize_canonical(seq);
    if (ingest_out.empty()) {
      if (!g.quiet) std::cout << text;
    } else {
      io::write_file_atomic(ingest_out, text);
      if (g.verbose) std::cerr << seq.size() << " records written to " << ingest_out << "\n";
    }
  });

  // run <tc_id> --log <file> [--auto-approve]
  auto* run_cmd = app.add_subcommand("run", "Run a test case through the full workflow");
  std::string run_tc;
  std::string run_log;
  std::string run_id;
  bool auto_approve = false;
  run_cmd->add_option("test_case", run_tc, "Test case id")->required();
  run_cmd->add_option("--log", run_log, "Capture or log file")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--run-id", run_id, "Run identifier (default: generated)");
  run_cmd->add_flag("--auto-approve", auto_approve, "Approve the generated flow without review (CI only)");
  run_cmd->callback([&] {
    if (auto_approve) hitl_bypass_notice();
    auto orch = open_orchestrator(g);
    RunOptions opts;
    opts.auto_approve = auto_approve;
    if (!run_id.empty()) opts.run_id = run_id;
    const auto run = orch->run_test_case(run_tc, {fs::path(run_log).filename().string(), io::read_file(run_log)}, opts);
    print_run(run, g);
    if (run.state == RunState::AwaitingApproval && !g.quiet) {
      std::cerr << "run " << run.run_id << " awaits approval: oranval approve " << run.run_id
                << " --operator <id>\n";
    }
    exit_code = run_exit(run);
  });

  // approve / reject / resubmit / resume
  std::string decide_id;
  std::string operator_id;
  std::vector<std::string> edit_flags;
  auto* approve_cmd = app.add_subcommand("approve", "Approve a parked run's flow and complete the run");
  auto* reject_cmd = app.add_subcommand("reject", "Reject a parked run's flow, returning it to FlowPending");
  for (auto* cmd : {approve_cmd, reject_cmd}) {
    cmd->add_option("run_id", decide_id, "Run identifier")->required();
    cmd->add_option("--operator", operator_id, "Operator id recorded with the decision")->required();
    cmd->add_option("--edit", edit_flags, "Step edit as N=new text; repeatable");
  }
  approve_cmd->callback([&] {
    auto orch = open_orchestrator(g);
    const auto run = orch->decide(decide_id, {Decision::Approve, operator_id, parse_edit_flags(edit_flags)});
    print_run(run, g);
    exit_code = run_exit(run);
  });
  reject_cmd->callback([&] {
    auto orch = open_orchestrator(g);
    const auto run = orch->decide(decide_id, {Decision::Reject, operator_id, parse_edit_flags(edit_flags)});
    print_run(run, g);
    exit_code = run_exit(run);
  });
  auto* resubmit_cmd = app.add_subcommand("resubmit", "Resubmit a rejected draft for approval");
  resubmit_cmd->add_option("run_id", decide_id, "Run identifier")->required();
  resubmit_cmd->callback([&] {
    auto orch = open_orchestrator(g);
    const auto run = orch->resubmit(decide_id);
    print_run(run, g);
    exit_code = run_exit(run);
  });
  auto* resume_cmd = app.add_subcommand("resume", "Verify a stored run and finish it if it was interrupted");
  resume_cmd->add_option("run_id", decide_id, "Run identifier")->required();
  resume_cmd->callback([&] {
    auto orch = open_orchestrator(g);
    const auto run = orch->resume_run(decide_id);
    print_run(run, g);
    exit_code = run_exit(run);
  });

  // validate <flow> <log>, debug <flow> <log>
  std::string flow_path;
  std::string log_path;
  auto* validate_cmd = app.add_subcommand("validate", "Greedy chronological validation of a log against a flow");
  auto* debug_cmd = app.add_subcommand("debug", "Exhaustive step x log matrix and root-cause verdict");
  for (auto* cmd : {validate_cmd, debug_cmd}) {
    cmd->add_option("flow", flow_path, "Approved flow (JSON)")->required()->check(CLI::ExistingFile);
    cmd->add_option("log", log_path, "Capture or log file")->required()->check(CLI::ExistingFile);
  }
  std::string matrix_out;
  std::string matrix_format = "json";
  bool strict_chronology = false;
  debug_cmd->add_option("--matrix-out", matrix_out, "Write the matrix to this file");
  debug_cmd->add_option("--format", matrix_format, "Matrix file format")->check(CLI::IsMember({"json", "csv"}));
  debug_cmd->add_flag("--strict-chronology", strict_chronology, "Treat steps sharing a log index as out of order");
  validate_cmd->callback([&] {
    const auto config = load_settings(g);
    const auto backends = make_backends(config);
    const auto flow = load_approved_flow(flow_path);
    const auto logs = ingest_file(log_path, config.dissector, config.protocols);
    const auto result = validate(flow, logs, *backends.classifier);
    if (!g.quiet) print(to_json(result.verdict));
    exit_code = result.verdict.kind == VerdictKind::Pass ? kExitPass : kExitFail;
  });
  debug_cmd->callback([&] {
    const auto config = load_settings(g);
    const auto backends = make_backends(config);
    const auto flow = load_approved_flow(flow_path);
    const auto logs = ingest_file(log_path, config.dissector, config.protocols);
    const auto result = debug(flow, logs, *backends.classifier,
                              {config.parallelism, strict_chronology || config.strict_debug_chronology});
    if (!matrix_out.empty()) {
      io::write_file_atomic(matrix_out, matrix_format == "csv" ? matrix_to_csv(result.matrix)
                                                               : matrix_to_json(result.matrix).dump(2) + "\n");
    }
    if (!g.quiet) print(to_json(result.verdict));
    switch (result.verdict.kind) {
      case VerdictKind::Pass: exit_code = kExitPass; break;
      case VerdictKind::PartialPass: exit_code = kExitPartial; break;
      case VerdictKind::Fail: exit_code = kExitFail; break;
    }
  });

  // score <ground_truth> <predictions>
  auto* score_cmd = app.add_subcommand("score", "Confusion matrix and validation accuracy");
  std::string truth_path;
  std::string pred_path;
  score_cmd->add_option("ground_truth", truth_path, "JSON object: case id -> Pass|PartialPass|Fail")
      ->required()
      ->check(CLI::ExistingFile);
  score_cmd->add_option("predictions", pred_path, "JSON object: case id -> {val, debug}")
      ->required()
      ->check(CLI::ExistingFile);
  score_cmd->callback([&] {
    const auto cm = score_run(read_truth(truth_path), read_predictions(pred_path));
    if (!g.quiet) print(to_json(cm));
  });

  // report <run_id>
  auto* report_cmd = app.add_subcommand("report", "Print the compiled report of a run");
  std::string report_id;
  report_cmd->add_option("run_id", report_id, "Run identifier")->required();
  report_cmd->callback([&] {
    auto orch = open_orchestrator(g);
    const auto report = orch->report(report_id);
    if (!g.quiet) print(report);
    const auto run = orch->get_run(report_id);
    exit_code = verdict_exit(run.val_verdict, run.debug_verdict);
  });

  // serve
  auto* serve_cmd = app.add_subcommand("serve", "Serve the HTTP API");
  std::string bind;
  int port = 0;
  serve_cmd->add_option("--bind", bind, "Listen address (default: config)");
  serve_cmd->add_option("--port", port, "Listen port (default: config)");
  serve_cmd->callback([&] {
    auto orch = open_orchestrator(g);
    GatewayOptions opts;
    if (const char* token = std::getenv(orch->config().gateway.token_env.c_str()); token) opts.token = token;
    if (opts.token.empty()) std::cerr << "warning: " << orch->config().gateway.token_env << " is unset; API auth disabled\n";
    const std::string host = bind.empty() ? orch->config().gateway.bind : bind;
    const int p = port ? port : orch->config().gateway.port;
    Gateway gateway(*orch, opts);
    std::cerr << "serving /api/v1 on " << host << ":" << p << "\n";
    if (!gateway.listen(host, p)) throw Error(ErrorKind::Config, "cannot listen on " + host + ":" + std::to_string(p));
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitError;
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.kind()) << "]: " << e.what() << "\n";
    if (const auto* se = dynamic_cast<const SubprocessError*>(&e); se && !se->stderr_text().empty()) {
      std::cerr << se->stderr_text() << "\n";
    }
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return exit_code;
}
