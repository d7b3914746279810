#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <unordered_map>
#include <vector>

#include "oranval/common/retry.hpp"
#include "oranval/retrieval/clients.hpp"
#include "oranval/retrieval/spec_chunk.hpp"

namespace oranval {

struct IndexEntry {
  SpecChunk chunk;
  Embedding embedding;

  friend bool operator==(const IndexEntry&, const IndexEntry&) = default;
};

// Exact (brute-force) store of chunk embeddings with their metadata.
class VectorIndex {
 public:
  VectorIndex() = default;
  explicit VectorIndex(std::size_t dimension) : dimension_(dimension) {}

  // Throws Error(IndexBuild) on a dimension mismatch or duplicate chunk id.
  void add(SpecChunk chunk, Embedding embedding);

  std::size_t dimension() const { return dimension_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const std::vector<IndexEntry>& entries() const { return entries_; }

  // Binary format: magic "OVIX", u32 version, u64 dimension, u64 count, then
  // per entry length-prefixed strings and raw little-endian float32 values.
  void save(const std::filesystem::path& path) const;
  static VectorIndex load(const std::filesystem::path& path);

  friend bool operator==(const VectorIndex& a, const VectorIndex& b) {
    return a.dimension_ == b.dimension_ && a.entries_ == b.entries_;
  }

 private:
  std::size_t dimension_ = 0;
  std::vector<IndexEntry> entries_;
  std::unordered_map<std::string, std::size_t> by_id_;
};

struct IndexBuildOptions {
  RetryPolicy retry;
  std::size_t parallelism = 1;
};

VectorIndex build_index(const std::vector<SpecChunk>& chunks, const EmbeddingClient& client,
                        const IndexBuildOptions& options = {});

}  // namespace oranval
