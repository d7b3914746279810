#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "oranval/retrieval/clients.hpp"

namespace oranval {

// Lowercased alphanumeric words of at least two characters.
std::vector<std::string> lexical_tokens(std::string_view text);

// Feature-hashed bag of words, L2-normalized. Deterministic and dependency
// free, for CI and air-gapped labs.
class HashingEmbedding final : public EmbeddingClient {
 public:
  explicit HashingEmbedding(std::size_t dimension = 1024);

  Embedding embed(std::string_view text) const override;
  std::string id() const override { return "hashing-" + std::to_string(dimension_); }
  std::size_t dimension() const { return dimension_; }

 private:
  std::size_t dimension_;
};

// Fraction of distinct query tokens found in the passage, minus a small
// length penalty so that terse on-topic chunks beat long tangential ones.
class LexicalReranker final : public RerankerClient {
 public:
  double score(std::string_view query, std::string_view passage) const override;
  std::string id() const override { return "lexical"; }
};

// Answers a generation prompt by copying the numbered list from the context
// block that best overlaps the question. Expects the layout produced by
// build_generation_prompt ("[k] doc ..." blocks, then "Question: ...").
class ExtractiveGenerator final : public GenerationClient {
 public:
  std::string generate(std::string_view prompt) const override;
  std::string id() const override { return "extractive"; }
};

}  // namespace oranval
