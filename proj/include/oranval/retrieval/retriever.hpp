#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "oranval/retrieval/clients.hpp"
#include "oranval/retrieval/vector_index.hpp"

namespace oranval {

struct RankedChunk {
  SpecChunk chunk;
  double distance = 0.0;
  std::optional<double> rerank_score;
  // 1-based position in the distance ordering.
  std::size_t distance_rank = 0;
};

struct RetrievalResult {
  std::string query;
  std::vector<RankedChunk> ranked;
  std::size_t k_retrieve = 0;
  std::size_t k_final = 0;
  bool reranked = false;
  std::vector<std::string> warnings;
};

// The k_retrieve nearest chunks by Euclidean distance, ties by chunk_id.
RetrievalResult retrieve(const std::string& query, const VectorIndex& index,
                         const EmbeddingClient& client, std::size_t k_retrieve = 100);

struct RerankOptions {
  std::size_t k_final = 15;
  std::size_t parallelism = 1;
};

// Scores every candidate, orders by score (desc), distance (asc), chunk_id
// (asc), then keeps each document's best chunk until k_final documents are
// selected. A failing reranker call scores the chunk -inf and adds a warning.
RetrievalResult rerank(const RetrievalResult& result, const RerankerClient& reranker,
                       const RerankOptions& options = {});

}  // namespace oranval
