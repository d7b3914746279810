#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "oranval/backends/offline.hpp"
#include "oranval/common/error.hpp"
#include "oranval/orchestrator/test_case.hpp"
#include "oranval/retrieval/approval.hpp"
#include "oranval/retrieval/chunker.hpp"
#include "oranval/retrieval/flow_generator.hpp"
#include "oranval/retrieval/query_formatter.hpp"
#include "oranval/retrieval/retriever.hpp"
#include "oranval/retrieval/vector_index.hpp"
#include "support.hpp"

namespace oranval {
namespace {

using testing::Rng;

std::string words(int n, const std::string& stem = "w") {
  std::string out;
  for (int i = 0; i < n; ++i) out += (i ? " " : "") + stem + std::to_string(i);
  return out;
}

// Looks each text up in a table; anything unknown is a test bug.
class TableEmbedding : public EmbeddingClient {
 public:
  std::map<std::string, Embedding> table;
  Embedding embed(std::string_view text) const override {
    auto it = table.find(std::string(text));
    if (it == table.end()) throw std::runtime_error("no mock embedding for: " + std::string(text));
    return it->second;
  }
  std::string id() const override { return "table"; }
};

class TableReranker : public RerankerClient {
 public:
  std::map<std::string, double> scores;
  std::set<std::string> failing;
  double score(std::string_view, std::string_view passage) const override {
    if (failing.count(std::string(passage))) throw std::runtime_error("reranker timeout");
    return scores.at(std::string(passage));
  }
  std::string id() const override { return "table"; }
};

double naive_distance(const Embedding& a, const Embedding& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (double(a[i]) - double(b[i])) * (double(a[i]) - double(b[i]));
  return std::sqrt(s);
}

SpecChunk chunk(const std::string& id, const std::string& doc, const std::string& text) {
  return SpecChunk{id, doc, std::nullopt, text, 1};
}

// --- chunking

TEST(Chunker, ThousandWordsGiveFourWindows) {
  const std::string doc = words(1000);
  const auto chunks = chunk_document("d", doc, {300, 50});
  const int stride = 300 - 50;
  const int expected = static_cast<int>(std::ceil((1000.0 - 50) / stride));
  ASSERT_EQ(static_cast<int>(chunks.size()), expected);
  std::set<std::string> covered;
  for (const auto& c : chunks) {
    EXPECT_NE(doc.find(c.text), std::string::npos);
    EXPECT_LE(c.word_count, 300);
    std::istringstream in(c.text);
    for (std::string w; in >> w;) covered.insert(w);
  }
  EXPECT_EQ(covered.size(), 1000u);
  for (std::size_t k = 1; k < chunks.size(); ++k) {
    EXPECT_NE(chunks[k].chunk_id, chunks[k - 1].chunk_id);
    EXPECT_EQ(chunks[k].doc_id, "d");
  }
}

TEST(Chunker, ShortDocIsOneChunk) {
  const std::string doc = words(100);
  const auto chunks = chunk_document("d", doc);
  ASSERT_EQ(chunks.size(), 1u);
  EXPECT_EQ(chunks[0].text, doc);
  EXPECT_EQ(chunks[0].word_count, 100);
}

TEST(Chunker, ExactlyChunkWordsIsOneChunk) {
  EXPECT_EQ(chunk_document("d", words(300)).size(), 1u);
  EXPECT_EQ(chunk_document("d", words(301)).size(), 2u);
}

TEST(Chunker, NearestHeadingBecomesSection) {
  const std::string doc = "# Top\n\nintro words here\n\n## Setup\n\n" + words(20);
  const auto chunks = chunk_document("d", doc, {10, 2});
  ASSERT_GE(chunks.size(), 2u);
  EXPECT_EQ(chunks.front().section.value_or(""), "Top");
  EXPECT_EQ(chunks.back().section.value_or(""), "Setup");
}

TEST(Chunker, OverlapMustBeSmallerThanWindow) {
  EXPECT_THROW(chunk_document("d", "a b c", {50, 50}), std::invalid_argument);
}

TEST(Chunker, CorpusDirectoryIsChunkedInPathOrder) {
  const auto chunks = chunk_corpus(testing::fixture_dir() / "corpus", {400, 50});
  std::set<std::string> docs;
  for (const auto& c : chunks) docs.insert(c.doc_id);
  EXPECT_EQ(docs.size(), 14u);
  EXPECT_TRUE(std::is_sorted(chunks.begin(), chunks.end(),
                             [](const SpecChunk& a, const SpecChunk& b) { return a.doc_id < b.doc_id; }));
}

// --- index

TEST(VectorIndex, BuildsFromDistinctUnitVectors) {
  TableEmbedding e;
  e.table = {{"a", {1, 0, 0}}, {"b", {0, 1, 0}}, {"c", {0, 0, 1}}};
  const auto index = build_index({chunk("1", "x", "a"), chunk("2", "x", "b"), chunk("3", "y", "c")}, e);
  EXPECT_EQ(index.size(), 3u);
  EXPECT_EQ(index.dimension(), 3u);
}

TEST(VectorIndex, MixedDimensionsFail) {
  TableEmbedding e;
  e.table = {{"a", {1, 0, 0}}, {"b", {0, 1}}};
  try {
    build_index({chunk("1", "x", "a"), chunk("2", "x", "b")}, e);
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.kind(), ErrorKind::IndexBuild);
  }
}

TEST(VectorIndex, PersistedIndexAnswersIdentically) {
  testing::TempDir tmp("index");
  const HashingEmbedding e(256);
  const auto index = build_index(chunk_corpus(testing::fixture_dir() / "corpus"), e);
  index.save(tmp.path() / "i.ovix");
  const auto loaded = VectorIndex::load(tmp.path() / "i.ovix");
  EXPECT_EQ(loaded, index);
  for (const char* q : {"F1 setup", "bearer context release", "registration accept over NG"}) {
    const auto a = retrieve(q, index, e, 7);
    const auto b = retrieve(q, loaded, e, 7);
    ASSERT_EQ(a.ranked.size(), b.ranked.size());
    for (std::size_t k = 0; k < a.ranked.size(); ++k) {
      EXPECT_EQ(a.ranked[k].chunk, b.ranked[k].chunk);
      EXPECT_EQ(a.ranked[k].distance, b.ranked[k].distance);
    }
  }
}

TEST(VectorIndex, TruncatedFileIsIntegrityError) {
  testing::TempDir tmp("index");
  const HashingEmbedding e(32);
  build_index({chunk("1", "x", "alpha beta")}, e).save(tmp.path() / "i.ovix");
  const std::string bytes = testing::slurp(tmp.path() / "i.ovix");
  io::write_file_atomic(tmp.path() / "i.ovix", bytes.substr(0, bytes.size() - 9));
  try {
    VectorIndex::load(tmp.path() / "i.ovix");
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.kind(), ErrorKind::Integrity);
  }
}

// --- retrieval

TEST(Retrieve, IdenticalEmbeddingRanksFirstAtZero) {
  TableEmbedding e;
  e.table = {{"a", {1, 0, 0}}, {"b", {0, 1, 0}}, {"c", {0, 0, 1}}, {"q", {0, 1, 0}}};
  const auto index = build_index({chunk("1", "x", "a"), chunk("2", "x", "b"), chunk("3", "y", "c")}, e);
  const auto r = retrieve("q", index, e, 3);
  EXPECT_EQ(r.ranked.front().chunk.chunk_id, "2");
  EXPECT_EQ(r.ranked.front().distance, 0.0);
  EXPECT_EQ(r.ranked.front().distance_rank, 1u);
}

TEST(Retrieve, FiveVectorsMatchExhaustiveSort) {
  TableEmbedding e;
  const std::vector<Embedding> vs{{3, 1, 0}, {-1, 2, 2}, {0.5f, 0.5f, 0.5f}, {4, 4, -1}, {0, -2, 1}};
  std::vector<SpecChunk> chunks;
  for (int i = 0; i < 5; ++i) {
    e.table["t" + std::to_string(i)] = vs[i];
    chunks.push_back(chunk("c" + std::to_string(i), "d", "t" + std::to_string(i)));
  }
  e.table["q"] = {1, 1, 0};
  const auto index = build_index(chunks, e);
  std::vector<std::pair<double, std::string>> expect;
  for (int i = 0; i < 5; ++i) expect.emplace_back(naive_distance(vs[i], e.table["q"]), "c" + std::to_string(i));
  std::sort(expect.begin(), expect.end());
  const auto r = retrieve("q", index, e, 5);
  ASSERT_EQ(r.ranked.size(), 5u);
  for (int k = 0; k < 5; ++k) {
    EXPECT_EQ(r.ranked[k].chunk.chunk_id, expect[k].second);
    EXPECT_NEAR(r.ranked[k].distance, expect[k].first, 1e-9);
  }
}

TEST(Retrieve, OversizedKReturnsEverything) {
  const HashingEmbedding e(64);
  const auto index = build_index({chunk("1", "x", "alpha"), chunk("2", "x", "beta"), chunk("3", "y", "gamma")}, e);
  const auto r = retrieve("alpha", index, e, 100);
  EXPECT_EQ(r.ranked.size(), 3u);
  EXPECT_TRUE(std::is_sorted(r.ranked.begin(), r.ranked.end(),
                             [](const RankedChunk& a, const RankedChunk& b) { return a.distance < b.distance; }));
}

TEST(Retrieve, EmptyIndexFails) {
  const HashingEmbedding e(8);
  try {
    retrieve("q", VectorIndex(8), e);
    FAIL();
  } catch (const Error& err) {
    EXPECT_EQ(err.kind(), ErrorKind::EmptyIndex);
  }
}

TEST(Rerank, DistanceRankThirtyOvertakesRankOne) {
  TableEmbedding e;
  TableReranker rr;
  std::vector<SpecChunk> chunks;
  for (int i = 0; i < 40; ++i) {
    const std::string t = "text" + std::to_string(i);
    e.table[t] = {static_cast<float>(i + 1), 0};
    rr.scores[t] = 0.1;
    chunks.push_back(chunk("c" + std::to_string(100 + i), "doc" + std::to_string(i), t));
  }
  e.table["q"] = {0, 0};
  rr.scores["text0"] = -0.2;
  rr.scores["text29"] = 0.9;
  const auto index = build_index(chunks, e);
  const auto r = rerank(retrieve("q", index, e, 40), rr, {15});
  EXPECT_EQ(r.ranked.front().chunk.text, "text29");
  EXPECT_EQ(r.ranked.front().distance_rank, 30u);
  EXPECT_TRUE(r.reranked);
  EXPECT_EQ(r.ranked.size(), 15u);
}

TEST(Rerank, EqualScoresFallBackToDistance) {
  TableEmbedding e;
  TableReranker rr;
  std::vector<SpecChunk> chunks;
  for (int i = 0; i < 6; ++i) {
    const std::string t = "t" + std::to_string(i);
    e.table[t] = {static_cast<float>(6 - i)};
    rr.scores[t] = 0.5;
    chunks.push_back(chunk("c" + std::to_string(i), "d" + std::to_string(i), t));
  }
  e.table["q"] = {0};
  const auto base = retrieve("q", build_index(chunks, e), e, 6);
  const auto r = rerank(base, rr, {6});
  for (std::size_t k = 0; k < 6; ++k) EXPECT_EQ(r.ranked[k].chunk.chunk_id, base.ranked[k].chunk.chunk_id);
}

TEST(Rerank, UniqueDocumentCap) {
  TableEmbedding e;
  TableReranker rr;
  Rng rng(7);
  std::vector<SpecChunk> chunks;
  for (int i = 0; i < 40; ++i) {
    const std::string t = "t" + std::to_string(i);
    e.table[t] = {static_cast<float>(rng.unit()), static_cast<float>(rng.unit())};
    rr.scores[t] = rng.unit();
    chunks.push_back(chunk("c" + std::to_string(i), "doc" + std::to_string(i % 10), t));
  }
  e.table["q"] = {0.5f, 0.5f};
  const auto r = rerank(retrieve("q", build_index(chunks, e), e, 40), rr, {15});
  EXPECT_LE(r.ranked.size(), 10u);
  std::set<std::string> docs;
  for (const auto& c : r.ranked) docs.insert(c.chunk.doc_id);
  EXPECT_EQ(docs.size(), r.ranked.size());
}

TEST(Rerank, FailingCallSinksTheChunkWithWarning) {
  TableEmbedding e;
  TableReranker rr;
  std::vector<SpecChunk> chunks;
  for (int i = 0; i < 3; ++i) {
    const std::string t = "t" + std::to_string(i);
    e.table[t] = {static_cast<float>(i)};
    rr.scores[t] = 1.0 - 0.1 * i;
    chunks.push_back(chunk("c" + std::to_string(i), "d" + std::to_string(i), t));
  }
  rr.failing.insert("t0");
  e.table["q"] = {0};
  const auto r = rerank(retrieve("q", build_index(chunks, e), e, 3), rr, {3});
  EXPECT_EQ(r.ranked.back().chunk.chunk_id, "c0");
  EXPECT_EQ(r.ranked.back().rerank_score, -std::numeric_limits<double>::infinity());
  EXPECT_EQ(r.warnings.size(), 1u);
}

// 200 chunks over 25 documents; both stages are checked against an exhaustive
// ordering computed here.
TEST(RetrievalFidelity, TwoHundredChunkCorpusMatchesOracle) {
  TableEmbedding e;
  TableReranker rr;
  Rng rng(2024);
  std::vector<SpecChunk> chunks;
  for (int i = 0; i < 200; ++i) {
    const std::string t = "passage " + std::to_string(i);
    Embedding v(6);
    for (auto& x : v) x = static_cast<float>(rng.unit() * 2 - 1);
    e.table[t] = v;
    // Coarse scores so that ties exercise the distance and id tie-breaks.
    rr.scores[t] = rng.uniform(0, 8) / 8.0;
    chunks.push_back(chunk("chunk-" + std::to_string(1000 + rng.uniform(0, 8999)) + "-" + std::to_string(i),
                           "doc" + std::to_string(i % 25), t));
  }
  e.table["q"] = Embedding(6, 0.1f);
  const auto index = build_index(chunks, e);

  struct Row {
    double d;
    std::string id;
    std::string doc;
    double score;
    std::size_t drank;
  };
  std::vector<Row> rows;
  for (const auto& c : chunks) rows.push_back({naive_distance(e.table[c.text], e.table["q"]), c.chunk_id, c.doc_id,
                                               rr.scores[c.text], 0});
  std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.d != b.d ? a.d < b.d : a.id < b.id; });
  for (std::size_t k = 0; k < rows.size(); ++k) rows[k].drank = k + 1;

  const auto r = retrieve("q", index, e, 100);
  ASSERT_EQ(r.ranked.size(), 100u);
  for (std::size_t k = 0; k < 100; ++k) {
    EXPECT_EQ(r.ranked[k].chunk.chunk_id, rows[k].id);
    EXPECT_EQ(r.ranked[k].distance_rank, k + 1);
  }

  std::vector<Row> cand(rows.begin(), rows.begin() + 100);
  std::sort(cand.begin(), cand.end(), [](const Row& a, const Row& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.d != b.d) return a.d < b.d;
    return a.id < b.id;
  });
  std::vector<std::string> expect;
  std::set<std::string> used;
  for (const auto& row : cand) {
    if (expect.size() == 15) break;
    if (used.insert(row.doc).second) expect.push_back(row.id);
  }
  const auto rr_out = rerank(r, rr, {15});
  ASSERT_EQ(rr_out.ranked.size(), expect.size());
  for (std::size_t k = 0; k < expect.size(); ++k) EXPECT_EQ(rr_out.ranked[k].chunk.chunk_id, expect[k]);
}

// --- query

TestCase initial_access() {
  TestCase tc;
  tc.id = "TC-07";
  tc.title = "UE Initial Access";
  tc.category = TestCategory::EndToEnd;
  tc.components = {"gNB-DU", "gNB-CU", "AMF"};
  return tc;
}

TEST(Query, NamesProcedureAndEveryComponent) {
  const std::string q = format_query(initial_access());
  EXPECT_EQ(q.rfind("Give the UE Initial Access procedure between gNB-DU, gNB-CU, and AMF.", 0), 0u) << q;
  EXPECT_EQ(q.find("runs over"), std::string::npos);
  EXPECT_EQ(q.find("Referenced"), std::string::npos);
}

TEST(Query, InterfacesAndRefsAddClauses) {
  auto tc = initial_access();
  tc.interfaces = {"F1", "NG"};
  tc.spec_refs = {"3GPP TS 38.401"};
  const std::string q = format_query(tc);
  EXPECT_NE(q.find("F1 and NG"), std::string::npos);
  EXPECT_NE(q.find("3GPP TS 38.401"), std::string::npos);
  EXPECT_EQ(q, format_query(tc));
}

// --- generation

TEST(StepParser, TwoSteps) {
  const auto p = parse_numbered_steps(
      "1. UE sends RRC Setup Request to the gNB-DU.\n2. gNB-DU sends Initial UL RRC Message Transfer to the gNB-CU.");
  ASSERT_EQ(p.steps.size(), 2u);
  EXPECT_EQ(p.steps[1].ordinal, 2);
  EXPECT_TRUE(p.notes.empty());
}

TEST(StepParser, GapsAreRenumberedWithNote) {
  const auto p = parse_numbered_steps("1. A sends X to B\n2. B sends Y to A\n4. A sends Z to B\n");
  ASSERT_EQ(p.steps.size(), 3u);
  EXPECT_EQ(p.steps[2].ordinal, 3);
  EXPECT_NE(p.steps[2].description.find("Z"), std::string::npos);
  EXPECT_EQ(p.notes.size(), 1u);
}

TEST(StepParser, InlineMarkers) {
  const auto p = parse_numbered_steps("First, 1) A sends X to B, then 2) B sends Y to A.");
  EXPECT_EQ(p.steps.size(), 2u);
}

TEST(StepParser, DescribeStepExtractsParts) {
  const auto s = describe_step(13, "The gNB-CU sends a UL NAS TRANSPORT (Registration Complete) to the AMF.");
  EXPECT_EQ(s.message_name.value_or(""), "UL NAS TRANSPORT");
  EXPECT_EQ(s.qualifier.value_or(""), "Registration Complete");
  ASSERT_TRUE(s.endpoints);
  EXPECT_EQ(s.endpoints->sender, "gNB-CU");
  EXPECT_EQ(s.endpoints->receiver, "AMF");
}

class CannedGenerator : public GenerationClient {
 public:
  explicit CannedGenerator(std::string reply) : reply_(std::move(reply)) {}
  std::string generate(std::string_view) const override { return reply_; }
  std::string id() const override { return "canned"; }

 private:
  std::string reply_;
};

std::vector<RankedChunk> context_of(int docs) {
  std::vector<RankedChunk> ctx;
  for (int i = 0; i < docs; ++i) {
    RankedChunk c;
    c.chunk = chunk("c" + std::to_string(i), "doc" + std::to_string(i / 2), "excerpt " + std::to_string(i));
    c.distance_rank = static_cast<std::size_t>(i + 1);
    ctx.push_back(c);
  }
  return ctx;
}

TEST(Generate, EmptyContextIsPrecondition) {
  try {
    generate_flow("q", {}, CannedGenerator("1. x\n2. y"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Precondition);
  }
}

TEST(Generate, UnparseableReplyKeepsRawText) {
  try {
    generate_flow("q", context_of(2), CannedGenerator("I cannot help with that."));
    FAIL();
  } catch (const ReplyError& e) {
    EXPECT_EQ(e.kind(), ErrorKind::GenerationParse);
    EXPECT_EQ(e.raw_reply(), "I cannot help with that.");
  }
}

TEST(Generate, DraftCarriesProvenance) {
  const auto flow = generate_flow("q", context_of(4), CannedGenerator("1. A sends X to B\n2. B sends Y to A"));
  EXPECT_EQ(flow.approval, ApprovalState::Draft);
  EXPECT_EQ(flow.steps.size(), 2u);
  EXPECT_EQ(flow.provenance.size(), 4u);
}

TEST(Generate, ExtractiveGeneratorCopiesBestBlock) {
  const auto chunks = chunk_corpus(testing::fixture_dir() / "corpus", {400, 50});
  std::vector<RankedChunk> ctx;
  for (const auto& c : chunks) {
    RankedChunk r;
    r.chunk = c;
    ctx.push_back(r);
  }
  const auto prompt = build_generation_prompt("Give the F1 Setup for NR procedure between gNB-DU and gNB-CU.", ctx);
  const auto flow = parse_numbered_steps(ExtractiveGenerator().generate(prompt));
  ASSERT_EQ(flow.steps.size(), 4u);
  EXPECT_EQ(flow.steps[0].message_name.value_or(""), "F1 SETUP REQUEST");
}

// --- approval gate

ProceduralFlow draft() {
  ProceduralFlow f;
  f.steps = {describe_step(1, "The A sends a X REQUEST to the B."), describe_step(2, "The B sends a X RESPONSE to the A.")};
  return f;
}

TEST(Approval, TicketListsFiveDistinctDocuments) {
  auto f = draft();
  const auto ticket = submit_for_approval(f, context_of(12));
  EXPECT_EQ(f.approval, ApprovalState::PendingApproval);
  ASSERT_EQ(ticket.references.size(), 5u);
  std::set<std::string> docs;
  for (const auto& r : ticket.references) docs.insert(r.doc_id);
  EXPECT_EQ(docs.size(), 5u);
  EXPECT_EQ(ticket.references[0].rank, 1);
  EXPECT_EQ(ticket_from_json(to_json(ticket)), ticket);
}

TEST(Approval, ApproveAppliesEdits) {
  auto f = draft();
  submit_for_approval(f, context_of(2));
  approve(f, "op-1", {{2, "The B sends a X FAILURE to the A."}});
  EXPECT_EQ(f.approval, ApprovalState::Approved);
  EXPECT_EQ(f.approved_by.value_or(""), "op-1");
  ASSERT_EQ(f.edits.size(), 1u);
  EXPECT_EQ(f.steps[1].message_name.value_or(""), "X FAILURE");
  EXPECT_NO_THROW(ApprovedFlow::from(f));
}

TEST(Approval, RejectReturnsNewDraftWithEditLog) {
  auto f = draft();
  submit_for_approval(f, context_of(2));
  auto next = reject(f, "op-1", {{1, "The A sends a Y REQUEST to the B."}});
  EXPECT_EQ(f.approval, ApprovalState::Rejected);
  EXPECT_EQ(next.approval, ApprovalState::Draft);
  EXPECT_EQ(next.edits.size(), 1u);
  EXPECT_EQ(next.steps[0].message_name.value_or(""), "Y REQUEST");
}

TEST(Approval, GateRejectsWrongStatesAndAnonymousOperators) {
  auto f = draft();
  EXPECT_THROW(approve(f, "op"), Error);
  EXPECT_THROW(ApprovedFlow::from(f), Error);
  submit_for_approval(f, context_of(1));
  EXPECT_THROW(submit_for_approval(f, context_of(1)), Error);
  EXPECT_THROW(approve(f, ""), Error);
  EXPECT_THROW(ApprovedFlow::from(f), Error);
}

TEST(FlowJson, RoundTripAndFieldPaths) {
  auto f = draft();
  f.steps[0].protocol = "f1ap";
  f.notes = {"renumbered"};
  EXPECT_EQ(flow_from_json(to_json(f)), f);
  auto j = to_json(f);
  j["steps"][1]["ordinal"] = "two";
  try {
    flow_from_json(j);
    FAIL();
  } catch (const SchemaError& e) {
    EXPECT_EQ(e.field(), "$.steps[1].ordinal");
  }
}

}  // namespace
}  // namespace oranval
