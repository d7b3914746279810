#include <gtest/gtest.h>

#include <atomic>
#include <chrono>

#include "oranval/classifier/deterministic.hpp"
#include "oranval/classifier/matrix_classifier.hpp"
#include "oranval/common/error.hpp"
#include "oranval/common/text.hpp"
#include "oranval/log_ingest/log_parser.hpp"
#include "oranval/validation/engine.hpp"
#include "oranval/validation/matrix_export.hpp"
#include "oracles.hpp"

namespace oranval {
namespace {

using testing::BoolGrid;
using testing::Rng;

struct Fixture {
  ApprovedFlow flow;
  LogSequence logs;
};

Fixture load_case(const std::string& id) {
  const auto dir = testing::campaign_dir() / id;
  return {ApprovedFlow::from(flow_from_json(nlohmann::json::parse(testing::slurp(dir / "flow.json")))),
          parse_log_file(testing::slurp(dir / "log.json"), std::nullopt, id)};
}

struct GridCase {
  ApprovedFlow flow;
  LogSequence logs;
  MatrixClassifier classifier;
  GridCase(const BoolGrid& g, std::vector<std::vector<int>> conf = {})
      : flow(testing::approved(testing::plain_flow(static_cast<int>(g.size())))),
        logs(testing::blank_logs(g.empty() ? 0 : static_cast<int>(g[0].size()))),
        classifier(g, std::move(conf)) {}
};

std::vector<int> assignment_columns(const Verdict& v) {
  std::vector<int> out;
  for (const auto& m : v.matched_assignment) out.push_back(m.log_index);
  return out;
}

std::vector<std::pair<int, int>> pair_steps(const Verdict& v) {
  std::vector<std::pair<int, int>> out;
  for (const auto& p : v.out_of_order_pairs) out.emplace_back(p.earlier.step, p.later.step);
  return out;
}

// --- Val

TEST(Validate, SingleStepAtFirstEntry) {
  GridCase c(BoolGrid{{true}});
  const auto r = validate(c.flow, c.logs, c.classifier);
  EXPECT_EQ(r.verdict.kind, VerdictKind::Pass);
  EXPECT_EQ(r.verdict.matched_assignment, (std::vector<StepMatch>{{1, 1}}));
}

TEST(Validate, DivergenceWitnessAssignment) {
  GridCase c({{false, false, false, false, true, false}, {false, false, true, false, false, true}});
  const auto r = validate(c.flow, c.logs, c.classifier);
  EXPECT_EQ(r.verdict.kind, VerdictKind::Pass);
  EXPECT_EQ(r.verdict.matched_assignment, (std::vector<StepMatch>{{1, 5}, {2, 6}}));
}

TEST(Validate, ConvergesAndReportsRemainder) {
  GridCase c({{true, false, false}, {false, false, false}, {false, false, true}});
  const auto r = validate(c.flow, c.logs, c.classifier);
  EXPECT_EQ(r.verdict.kind, VerdictKind::Fail);
  EXPECT_EQ(r.verdict.missing_steps, (std::vector<int>{2, 3}));
  EXPECT_NE(r.verdict.inference.find("converged at step 2"), std::string::npos);
}

TEST(Validate, WalksTheLogOnce) {
  Rng rng(5);
  for (int t = 0; t < 50; ++t) {
    GridCase c(testing::random_grid(rng, 5, 20, 0.2));
    const auto r = validate(c.flow, c.logs, c.classifier);
    EXPECT_LE(c.classifier.calls(), 20u);
    EXPECT_EQ(r.trace.size(), c.classifier.calls());
  }
}

TEST(Validate, EmptyFlowIsInvalid) {
  ProceduralFlow f;
  f.approval = ApprovalState::Approved;
  try {
    validate(ApprovedFlow::from(f), testing::blank_logs(2), MatrixClassifier({}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::InvalidFlow);
  }
}

TEST(Validate, EmptyLogFails) {
  GridCase c(BoolGrid{{}, {}});
  const auto r = validate(c.flow, c.logs, c.classifier);
  EXPECT_EQ(r.verdict.kind, VerdictKind::Fail);
  EXPECT_EQ(r.verdict.missing_steps, (std::vector<int>{1, 2}));
}

TEST(Validate, MoreStepsThanEntriesFails) {
  GridCase c({{true, true}, {true, true}, {true, true}});
  EXPECT_EQ(validate(c.flow, c.logs, c.classifier).verdict.kind, VerdictKind::Fail);
}

TEST(Validate, IncorrectMessageNameFixture) {
  const auto f = load_case("TC-10");
  const auto r = validate(f.flow, f.logs, DeterministicClassifier());
  EXPECT_EQ(r.verdict.kind, VerdictKind::Fail);
  EXPECT_EQ(r.verdict.missing_steps.front(), 3);
}

TEST(Validate, ParkedFlowCannotBeValidated) {
  auto flow = testing::plain_flow(2);
  flow.approval = ApprovalState::PendingApproval;
  EXPECT_THROW(ApprovedFlow::from(flow), Error);
}

// --- Debug

TEST(Debug, IdentityChronologyPasses) {
  BoolGrid g(4, std::vector<bool>(4, false));
  for (int s = 0; s < 4; ++s) g[s][s] = true;
  GridCase c(g);
  const auto d = debug(c.flow, c.logs, c.classifier);
  EXPECT_EQ(d.verdict.kind, VerdictKind::Pass);
  EXPECT_TRUE(d.matrix.complete());
}

TEST(Debug, AllNegativeFailsWithEveryStepMissing) {
  GridCase c(BoolGrid(3, std::vector<bool>(5, false)));
  const auto d = debug(c.flow, c.logs, c.classifier);
  EXPECT_EQ(d.verdict.kind, VerdictKind::Fail);
  EXPECT_EQ(d.verdict.missing_steps, (std::vector<int>{1, 2, 3}));
}

TEST(Debug, DivergenceWitnessIsPartialPass) {
  GridCase c({{false, false, false, false, true, false}, {false, false, true, false, false, true}});
  const auto d = debug(c.flow, c.logs, c.classifier);
  EXPECT_EQ(d.verdict.kind, VerdictKind::PartialPass);
  ASSERT_EQ(d.verdict.out_of_order_pairs.size(), 1u);
  EXPECT_EQ(d.verdict.out_of_order_pairs[0].earlier, (StepMatch{1, 5}));
  EXPECT_EQ(d.verdict.out_of_order_pairs[0].later, (StepMatch{2, 3}));
}

TEST(Debug, SharedEarliestIndexOnlyFailsStrictMode) {
  GridCase c({{false, true, false}, {false, true, false}});
  EXPECT_EQ(debug(c.flow, c.logs, c.classifier).verdict.kind, VerdictKind::Pass);
  EXPECT_EQ(debug(c.flow, c.logs, c.classifier, {1, true}).verdict.kind, VerdictKind::PartialPass);
}

TEST(Debug, PrematureFinalStepFixture) {
  const auto f = load_case("TC-01");
  const auto d = debug(f.flow, f.logs, DeterministicClassifier());
  EXPECT_EQ(d.verdict.kind, VerdictKind::PartialPass);
  EXPECT_NE(d.verdict.inference.find("executed prematurely"), std::string::npos);
  ASSERT_EQ(d.verdict.out_of_order_pairs.size(), 1u);
  EXPECT_EQ(d.verdict.out_of_order_pairs[0].later.step, 10);
}

TEST(Debug, MissingInitialContextSetupRequest) {
  for (const char* id : {"TC-07-5GC-CRASH", "TC-07-IMSI-MISMATCH", "TC-07-USIM-ALGO"}) {
    const auto f = load_case(id);
    const auto d = debug(f.flow, f.logs, DeterministicClassifier());
    EXPECT_EQ(d.verdict.kind, VerdictKind::Fail) << id;
    const auto& miss = d.verdict.missing_steps;
    EXPECT_NE(std::find(miss.begin(), miss.end(), 9), miss.end()) << id;
    EXPECT_NE(d.verdict.inference.find("INITIAL CONTEXT SETUP REQUEST"), std::string::npos) << id;
  }
}

TEST(Debug, MultipleDiscrepanciesMatrix) {
  const auto f = load_case("TC-11");
  const auto d = debug(f.flow, f.logs, DeterministicClassifier());
  EXPECT_EQ(d.matrix.steps(), 22);
  EXPECT_EQ(d.matrix.log_entries(), 99);
  EXPECT_EQ(d.verdict.kind, VerdictKind::PartialPass);
  EXPECT_NE(text::to_lower(d.verdict.inference).find("multiple discrepancies"), std::string::npos);
  EXPECT_EQ(pair_steps(d.verdict), (std::vector<std::pair<int, int>>{{10, 11}, {16, 17}, {21, 22}}));
}

TEST(Debug, ClassifyOutcomeNeedsCompleteMatrix) {
  DebugMatrix m(2, 2);
  m.set({1, 1, Label::Executed, 100, "", "t"});
  try {
    classify_outcome(m, 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::IncompleteMatrix);
  }
}

class ExplodingClassifier : public StepClassifier {
 public:
  explicit ExplodingClassifier(std::size_t after) : after_(after) {}
  ClassificationResult classify(const FlowStep& step, const LogRecord& record) const override {
    if (calls_.fetch_add(1) >= after_) throw Error(ErrorKind::Classification, "backend gone");
    return {step.ordinal, record.index, Label::NotExecuted, 0, "", "exploding"};
  }
  std::string id() const override { return "exploding"; }

 private:
  std::size_t after_;
  mutable std::atomic<std::size_t> calls_{0};
};

TEST(Debug, ClassifierFailureKeepsPartialMatrix) {
  const auto flow = testing::approved(testing::plain_flow(3));
  const auto logs = testing::blank_logs(4);
  try {
    debug(flow, logs, ExplodingClassifier(5));
    FAIL();
  } catch (const AbortedRunError& e) {
    ASSERT_TRUE(e.partial_matrix());
    EXPECT_EQ(e.partial_matrix()->classified(), 5u);
    EXPECT_FALSE(e.partial_matrix()->complete());
    const std::string csv = matrix_to_csv(*e.partial_matrix());
    EXPECT_NE(csv.find("Unclassified"), std::string::npos);
  }
  try {
    validate(flow, logs, ExplodingClassifier(2));
    FAIL();
  } catch (const AbortedRunError& e) {
    EXPECT_EQ(e.partial_trace().size(), 2u);
  }
}

TEST(Debug, ParallelMatchesSequential) {
  const auto f = load_case("TC-07");
  const auto a = debug(f.flow, f.logs, DeterministicClassifier());
  const auto b = debug(f.flow, f.logs, DeterministicClassifier(), {4, false});
  EXPECT_EQ(a.matrix, b.matrix);
  EXPECT_EQ(a.verdict, b.verdict);
}

// --- oracle agreement and properties over random grids

TEST(Oracle, ValEqualsExhaustiveAssignmentSearch) {
  Rng rng(0xA11CE);
  for (int t = 0; t < 1500; ++t) {
    const int m = rng.uniform(1, 6);
    const int n = rng.uniform(1, 12);
    const auto g = testing::random_grid(rng, m, n, 0.1 + 0.6 * rng.unit());
    GridCase c(g);
    const auto v = validate(c.flow, c.logs, c.classifier).verdict;
    const auto expect = oracle::first_increasing_assignment(g);
    ASSERT_EQ(v.kind == VerdictKind::Pass, expect.has_value()) << "trial " << t;
    if (expect) {
      ASSERT_EQ(assignment_columns(v), *expect) << "trial " << t;
    }
  }
}

TEST(Oracle, DebugEqualsReferenceOutcome) {
  Rng rng(0xBEEF);
  for (int t = 0; t < 1500; ++t) {
    const int m = rng.uniform(1, 6);
    const int n = rng.uniform(1, 12);
    const auto g = testing::random_grid(rng, m, n, 0.05 + 0.5 * rng.unit());
    const bool strict = rng.chance(0.3);
    GridCase c(g);
    const auto d = debug(c.flow, c.logs, c.classifier, {1, strict}).verdict;
    const auto o = oracle::debug_outcome(g, strict);
    ASSERT_EQ(std::string(to_string(d.kind)), o.kind) << "trial " << t;
    ASSERT_EQ(d.missing_steps, o.missing) << "trial " << t;
    ASSERT_EQ(pair_steps(d), o.pairs) << "trial " << t;
  }
}

TEST(Property, VerdictImplications) {
  Rng rng(77);
  for (int t = 0; t < 1000; ++t) {
    const auto g = testing::random_grid(rng, rng.uniform(1, 6), rng.uniform(1, 12), 0.1 + 0.5 * rng.unit());
    GridCase c(g);
    const auto val = validate(c.flow, c.logs, c.classifier).verdict.kind;
    const auto dbg = debug(c.flow, c.logs, c.classifier).verdict.kind;
    if (dbg == VerdictKind::Fail) {
      ASSERT_EQ(val, VerdictKind::Fail) << t;
    }
    if (val == VerdictKind::Pass) {
      ASSERT_NE(dbg, VerdictKind::Fail) << t;
    }
  }
}

TEST(Property, IncreasingEarliestOccurrencesImplyValPass) {
  Rng rng(91);
  for (int t = 0; t < 1000; ++t) {
    const int m = rng.uniform(1, 6);
    const int n = rng.uniform(m, 12);
    // Strictly increasing first hits; later columns random.
    std::vector<int> cols(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) cols[i] = i;
    for (int i = n - 1; i > 0; --i) std::swap(cols[i], cols[rng.uniform(0, i)]);
    std::vector<int> firsts(cols.begin(), cols.begin() + m);
    std::sort(firsts.begin(), firsts.end());
    BoolGrid g(static_cast<std::size_t>(m), std::vector<bool>(static_cast<std::size_t>(n), false));
    for (int s = 0; s < m; ++s) {
      g[s][firsts[s]] = true;
      for (int i = firsts[s] + 1; i < n; ++i) g[s][i] = rng.chance(0.3);
    }
    GridCase c(g);
    ASSERT_EQ(validate(c.flow, c.logs, c.classifier).verdict.kind, VerdictKind::Pass) << t;
    ASSERT_EQ(debug(c.flow, c.logs, c.classifier).verdict.kind, VerdictKind::Pass) << t;
  }
}

TEST(Property, ConfidenceDoesNotChangeVerdicts) {
  Rng rng(313);
  for (int t = 0; t < 500; ++t) {
    const int m = rng.uniform(1, 6);
    const int n = rng.uniform(1, 12);
    const auto g = testing::random_grid(rng, m, n, 0.3);
    std::vector<std::vector<int>> c1(m, std::vector<int>(n)), c2(m, std::vector<int>(n));
    for (int s = 0; s < m; ++s)
      for (int i = 0; i < n; ++i) {
        c1[s][i] = rng.uniform(0, 100);
        c2[s][i] = rng.uniform(0, 100);
      }
    GridCase a(g, c1), b(g, c2);
    const auto va = validate(a.flow, a.logs, a.classifier).verdict;
    const auto vb = validate(b.flow, b.logs, b.classifier).verdict;
    ASSERT_EQ(va, vb);
    ASSERT_EQ(debug(a.flow, a.logs, a.classifier).verdict, debug(b.flow, b.logs, b.classifier).verdict);
  }
}

// --- matrix export

TEST(MatrixExport, GridAddressing) {
  GridCase c({{true, false, false}, {false, false, true}});
  const auto d = debug(c.flow, c.logs, c.classifier);
  const auto j = matrix_to_json(d.matrix);
  EXPECT_EQ(j["schema"], "oranval.matrix/v1");
  ASSERT_EQ(j["grid"].size(), 2u);
  ASSERT_EQ(j["grid"][0].size(), 3u);
  EXPECT_EQ(j["grid"][0][0]["label"], "Executed");
  EXPECT_EQ(j["grid"][1][2]["label"], "Executed");
  EXPECT_EQ(j["grid"][1][0]["label"], "NotExecuted");
  EXPECT_EQ(matrix_from_json(j), d.matrix);
}

TEST(MatrixExport, CsvIsRowMajor) {
  GridCase c({{true, false}, {false, true}}, {{90, 5}, {5, 80}});
  const auto csv = matrix_to_csv(debug(c.flow, c.logs, c.classifier).matrix);
  const auto lines = text::split_lines(csv);
  ASSERT_GE(lines.size(), 5u);
  EXPECT_EQ(lines[0], "step,log_index,label,confidence,explanation_ref");
  EXPECT_EQ(lines[1].rfind("1,1,Executed,90,", 0), 0u);
  EXPECT_EQ(lines[2].rfind("1,2,NotExecuted,5,", 0), 0u);
  EXPECT_EQ(lines[4].rfind("2,2,Executed,80,", 0), 0u);
}

TEST(MatrixExport, PartialGridHasNullCells) {
  DebugMatrix m(2, 2);
  m.set({2, 1, Label::Executed, 100, "seen", "t"});
  EXPECT_THROW(m.set({2, 1, Label::Executed, 100, "again", "t"}), Error);
  EXPECT_THROW(m.set({3, 1, Label::Executed, 100, "", "t"}), Error);
  const auto j = matrix_to_json(m);
  EXPECT_TRUE(j["grid"][0][0].is_null());
  EXPECT_FALSE(j["grid"][1][0].is_null());
  EXPECT_EQ(matrix_from_json(j), m);
  EXPECT_NE(matrix_to_csv(m).find("1,1,Unclassified,,"), std::string::npos);
}

TEST(MatrixExport, Fig5LayoutFromFixture) {
  const auto f = load_case("TC-11");
  const auto j = matrix_to_json(debug(f.flow, f.logs, DeterministicClassifier()).matrix);
  EXPECT_EQ(j["steps"], 22);
  EXPECT_EQ(j["log_entries"], 99);
  EXPECT_EQ(text::split_lines(matrix_to_csv(matrix_from_json(j))).size(), 1u + 22u * 99u);
}

// --- performance floors

TEST(Performance, ValAndDebugAtCampaignScale) {
  auto f = load_case("TC-11");
  LogRecord extra = f.logs.records.back();
  extra.index = 100;
  f.logs.records.push_back(extra);
  ASSERT_EQ(f.logs.size(), 100u);
  const DeterministicClassifier c;
  auto t0 = std::chrono::steady_clock::now();
  validate(f.flow, f.logs, c);
  const double val_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  f.logs.records.pop_back();
  t0 = std::chrono::steady_clock::now();
  const auto d = debug(f.flow, f.logs, c);
  const double dbg_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  EXPECT_EQ(d.matrix.classified(), 2178u);
  EXPECT_LT(val_s, 1.0);
  EXPECT_LT(dbg_s, 5.0);
}

}  // namespace
}  // namespace oranval
