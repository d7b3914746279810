#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>

#include <json.hpp>

#include "oranval/backends/offline.hpp"
#include "oranval/log_ingest/dissector.hpp"
#include "oranval/log_ingest/log_parser.hpp"
#include "oranval/retrieval/vector_index.hpp"
#include "oranval/validation/engine.hpp"
#include "orchestrator_support.hpp"

namespace oranval {
namespace {

using nlohmann::json;
using testing::campaign_dir;
using testing::fixture_dir;
using testing::TempDir;

// Every invocation shares the fixed clock so cross-process reports compare byte for byte.
ProcessResult cli(std::vector<std::string> args) {
  const std::string fixed = std::to_string(testing::kFixedClock);
  ::setenv("ORANVAL_FIXED_CLOCK_MS", fixed.c_str(), 1);
  args.insert(args.begin(), ORANVAL_CLI_PATH);
  return run_process(args);
}

std::string fixture_config_arg() { return (fixture_dir() / "oranval.yaml").string(); }

std::string flow_arg(const std::string& id) { return (campaign_dir() / id / "flow.json").string(); }
std::string log_arg(const std::string& id) { return (campaign_dir() / id / "log.json").string(); }

// Same settings as the fixture config, with every path absolute and runs kept under root.
std::filesystem::path write_config(const std::filesystem::path& root) {
  const auto f = fixture_dir();
  const auto path = root / "oranval.yaml";
  std::ofstream out(path);
  out << "runs_dir: " << (root / "runs").string() << "\n"
      << "repository_dir: " << (f / "test_cases").string() << "\n"
      << "corpus_dir: " << (f / "corpus").string() << "\n"
      << "index_path: " << (root / "absent.ovix").string() << "\n"
      << "retrieval:\n  k_retrieve: 100\n  k_final: 15\n  k_approval: 5\n  chunk_words: 400\n  chunk_overlap: 50\n"
      << "dissector:\n  executable: " << (f / "fake_tshark.sh").string() << "\n"
      << "backends:\n"
      << "  embedding: {kind: offline, dimension: 1024}\n"
      << "  metric_embedding: {kind: offline, dimension: 2048}\n"
      << "  reranker: {kind: offline}\n"
      << "  generator: {kind: offline}\n"
      << "classifier:\n  kind: deterministic\n";
  return path;
}

Verdict in_process(const std::string& id, bool with_debug) {
  const auto config = testing::fixture_config(std::filesystem::temp_directory_path());
  const auto b = make_backends(config);
  const auto flow = ApprovedFlow::from(flow_from_json(json::parse(testing::slurp(flow_arg(id)))));
  const auto logs = parse_log_file(testing::slurp(log_arg(id)));
  if (with_debug) return debug(flow, logs, *b.classifier).verdict;
  return validate(flow, logs, *b.classifier).verdict;
}

TEST(Cli, ValidatePassingCaseExitsZero) {
  const auto r = cli({"-c", fixture_config_arg(), "validate", flow_arg("TC-06"), log_arg("TC-06")});
  EXPECT_EQ(r.exit_code, 0) << r.stderr_text;
  EXPECT_EQ(json::parse(r.stdout_text), to_json(in_process("TC-06", false)));
}

TEST(Cli, ValidateFailingCaseExitsOne) {
  const auto r = cli({"-c", fixture_config_arg(), "validate", flow_arg("TC-01"), log_arg("TC-01")});
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_EQ(json::parse(r.stdout_text), to_json(in_process("TC-01", false)));
}

TEST(Cli, DebugPartialPassExitsTwo) {
  const auto r = cli({"-c", fixture_config_arg(), "debug", flow_arg("TC-01"), log_arg("TC-01")});
  EXPECT_EQ(r.exit_code, 2) << r.stderr_text;
  EXPECT_EQ(json::parse(r.stdout_text), to_json(in_process("TC-01", true)));
}

TEST(Cli, DebugFailExitsOne) {
  const auto r = cli({"-c", fixture_config_arg(), "debug", flow_arg("TC-10"), log_arg("TC-10")});
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_EQ(json::parse(r.stdout_text).at("kind"), "Fail");
}

TEST(Cli, DebugWritesCsvMatrix) {
  TempDir t("cli-matrix");
  const auto out = (t.path() / "m.csv").string();
  const auto r = cli({"-q", "-c", fixture_config_arg(), "debug", flow_arg("TC-11"), log_arg("TC-11"),
                      "--matrix-out", out, "--format", "csv"});
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_TRUE(r.stdout_text.empty());
  const auto csv = testing::slurp(out);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + 22 * 99);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(cli({"-c", fixture_config_arg(), "run", "TC-06"}).exit_code, 3);
  EXPECT_EQ(cli({"-q", "-v", "-c", fixture_config_arg(), "validate", flow_arg("TC-06"), log_arg("TC-06")}).exit_code,
            3);
  EXPECT_EQ(cli({}).exit_code, 3);
  const auto bad = cli({"-c", fixture_config_arg(), "debug", flow_arg("TC-06"), log_arg("TC-06"), "--format", "xml"});
  EXPECT_EQ(bad.exit_code, 3);
}

TEST(Cli, LibraryErrorsCarryTheirKind) {
  TempDir t("cli-err");
  const auto broken = t.path() / "broken.json";
  std::ofstream(broken) << "[{\"frame\": 1,";
  const auto r = cli({"-c", fixture_config_arg(), "validate", flow_arg("TC-06"), broken.string()});
  EXPECT_EQ(r.exit_code, 3);
  EXPECT_NE(r.stderr_text.find("error [parse_error]"), std::string::npos) << r.stderr_text;
}

TEST(Cli, IngestReplaysCapture) {
  const auto r = cli({"-c", fixture_config_arg(), "ingest", (fixture_dir() / "capture" / "tc06.pcap").string()});
  ASSERT_EQ(r.exit_code, 0) << r.stderr_text;
  const auto replayed = parse_log_file(r.stdout_text);
  const auto canonical = parse_log_file(testing::slurp(log_arg("TC-06")));
  ASSERT_EQ(replayed.size(), canonical.size());
  for (std::size_t i = 0; i < replayed.size(); ++i) {
    EXPECT_EQ(replayed.records[i].source_frame, canonical.records[i].source_frame);
  }
}

TEST(Cli, IndexBuildMatchesInProcessIndex) {
  TempDir t("cli-index");
  const auto out = t.path() / "corpus.ovix";
  const auto r = cli({"-c", fixture_config_arg(), "index", "build", (fixture_dir() / "corpus").string(), "-o",
                      out.string()});
  ASSERT_EQ(r.exit_code, 0) << r.stderr_text;
  const auto j = json::parse(r.stdout_text);
  EXPECT_EQ(j.at("dimension"), 1024);
  const auto loaded = VectorIndex::load(out);
  const auto config = testing::fixture_config(t.path());
  const auto expected = testing::fixture_index(config, make_backends(config));
  EXPECT_EQ(loaded.size(), j.at("chunks").get<std::size_t>());
  EXPECT_TRUE(loaded.entries() == expected->entries());
}

TEST(Cli, ScoreCampaign) {
  TempDir t("cli-score");
  const auto expected = json::parse(testing::slurp(campaign_dir() / "expected.json"));
  json truth = json::object(), pred = json::object();
  for (const auto& [id, e] : expected.items()) {
    truth[id] = e.at("truth");
    pred[id] = {{"val", e.at("val")}, {"debug", e.at("debug")}};
  }
  std::ofstream(t.path() / "truth.json") << truth.dump();
  std::ofstream(t.path() / "pred.json") << pred.dump();
  const auto r = cli({"score", (t.path() / "truth.json").string(), (t.path() / "pred.json").string()});
  ASSERT_EQ(r.exit_code, 0) << r.stderr_text;
  const auto cm = json::parse(r.stdout_text);
  EXPECT_EQ(cm.at("tp"), 7);
  EXPECT_EQ(cm.at("tn"), 8);
  EXPECT_EQ(cm.at("accuracy"), 1.0);
}

TEST(Cli, ParkedRunApprovedInAnotherProcess) {
  TempDir t("cli-park"), straight_dir("cli-straight");
  const auto config = write_config(t.path()).string();
  const auto log = t.path() / "TC-11.json";
  std::filesystem::copy_file(log_arg("TC-11"), log);

  const auto parked = cli({"-c", config, "run", "TC-11", "--log", log.string(), "--run-id", "x1"});
  ASSERT_EQ(parked.exit_code, 4) << parked.stderr_text;
  EXPECT_EQ(json::parse(parked.stdout_text).at("state"), "AwaitingApproval");

  const auto done = cli({"-c", config, "approve", "x1", "--operator", "op-2"});
  ASSERT_EQ(done.exit_code, 2) << done.stderr_text;
  EXPECT_EQ(cli({"-c", config, "approve", "x1", "--operator", "op-2"}).exit_code, 3);
  EXPECT_EQ(cli({"-q", "-c", config, "report", "x1"}).exit_code, 2);

  auto o = testing::fixture_orchestrator(straight_dir.path());
  const auto run = o->run_test_case("TC-11", testing::fixture_log("TC-11"), {.run_id = "x1"});
  ASSERT_EQ(run.state, RunState::AwaitingApproval);
  const auto finished = o->decide("x1", {Decision::Approve, "op-2", {}});
  EXPECT_EQ(json::parse(done.stdout_text).at("debug_verdict"), to_json(*finished.debug_verdict));
  EXPECT_EQ(testing::slurp(t.path() / "runs" / "x1" / "report.json"),
            testing::slurp(straight_dir.path() / "x1" / "report.json"));
}

TEST(Cli, AutoApproveWarnsAndCompletes) {
  TempDir t("cli-auto");
  const auto config = write_config(t.path()).string();
  const auto r = cli({"-c", config, "run", "TC-06", "--log", log_arg("TC-06"), "--auto-approve"});
  EXPECT_EQ(r.exit_code, 0) << r.stderr_text;
  EXPECT_NE(r.stderr_text.find("BYPASSES THE HUMAN APPROVAL GATE"), std::string::npos);
}

}  // namespace
}  // namespace oranval
