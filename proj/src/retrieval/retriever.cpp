#include "oranval/retrieval/retriever.hpp"

#include <algorithm>
#include <limits>
#include <mutex>
#include <set>

#include "oranval/common/error.hpp"
#include "oranval/common/parallel.hpp"

namespace oranval {

RetrievalResult retrieve(const std::string& query, const VectorIndex& index, const EmbeddingClient& client,
                         std::size_t k_retrieve) {
  if (k_retrieve < 1) throw Error(ErrorKind::Precondition, "k_retrieve must be >= 1");
  if (index.empty()) throw Error(ErrorKind::EmptyIndex, "cannot retrieve from an empty index");

  const Embedding q = client.embed(query);
  if (q.size() != index.dimension()) {
    throw Error(ErrorKind::Backend, "query embedding dimension " + std::to_string(q.size()) +
                                        " does not match index dimension " + std::to_string(index.dimension()));
  }

  std::vector<std::pair<double, std::size_t>> scored;
  scored.reserve(index.size());
  const auto& entries = index.entries();
  for (std::size_t i = 0; i < entries.size(); ++i) scored.emplace_back(euclidean_distance(q, entries[i].embedding), i);

  auto less = [&](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first < b.first;
    return entries[a.second].chunk.chunk_id < entries[b.second].chunk.chunk_id;
  };
  const std::size_t k = std::min(k_retrieve, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(k), scored.end(), less);

  RetrievalResult result;
  result.query = query;
  result.k_retrieve = k_retrieve;
  result.ranked.reserve(k);
  for (std::size_t r = 0; r < k; ++r) {
    result.ranked.push_back({entries[scored[r].second].chunk, scored[r].first, std::nullopt, r + 1});
  }
  return result;
}

RetrievalResult rerank(const RetrievalResult& result, const RerankerClient& reranker,
                       const RerankOptions& options) {
  if (result.ranked.empty()) throw Error(ErrorKind::Precondition, "nothing to rerank");
  if (options.k_final < 1) throw Error(ErrorKind::Precondition, "k_final must be >= 1");

  std::vector<RankedChunk> candidates = result.ranked;
  std::vector<std::string> failures(candidates.size());
  bounded_parallel_for(candidates.size(), options.parallelism, [&](std::size_t i) {
    try {
      candidates[i].rerank_score = reranker.score(result.query, candidates[i].chunk.text);
    } catch (const std::exception& e) {
      candidates[i].rerank_score = -std::numeric_limits<double>::infinity();
      failures[i] = "reranker failed on " + candidates[i].chunk.chunk_id + ": " + e.what();
    }
  });

  std::sort(candidates.begin(), candidates.end(), [](const RankedChunk& a, const RankedChunk& b) {
    if (*a.rerank_score != *b.rerank_score) return *a.rerank_score > *b.rerank_score;
    if (a.distance != b.distance) return a.distance < b.distance;
    return a.chunk.chunk_id < b.chunk.chunk_id;
  });

  RetrievalResult out;
  out.query = result.query;
  out.k_retrieve = result.k_retrieve;
  out.k_final = options.k_final;
  out.reranked = true;
  out.warnings = result.warnings;
  for (auto& f : failures) {
    if (!f.empty()) out.warnings.push_back(std::move(f));
  }
  std::set<std::string> seen_docs;
  for (auto& c : candidates) {
    if (seen_docs.size() >= options.k_final) break;
    if (!seen_docs.insert(c.chunk.doc_id).second) continue;
    out.ranked.push_back(std::move(c));
  }
  return out;
}

}  // namespace oranval
