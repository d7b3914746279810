#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "oranval/retrieval/spec_chunk.hpp"

namespace oranval {

struct ChunkingOptions {
  int chunk_words = 300;
  int overlap_words = 50;
};

// Sliding word window of chunk_words with overlap_words shared between
// neighbours. A window end is moved to a paragraph break when one lies within
// 10% of the target size. Chunk text is the verbatim source span; the section
// label is the nearest preceding markdown heading. Requires
// chunk_words > overlap_words >= 0 (std::invalid_argument otherwise).
std::vector<SpecChunk> chunk_document(const std::string& doc_id, std::string_view text,
                                      const ChunkingOptions& options = {});

// Chunks every *.txt / *.md file under corpus_dir (sorted by path); doc_id is
// the file name.
std::vector<SpecChunk> chunk_corpus(const std::filesystem::path& corpus_dir,
                                    const ChunkingOptions& options = {});

}  // namespace oranval
