#pragma once

#include <optional>
#include <string>

namespace oranval {

struct SpecChunk {
  std::string chunk_id;
  std::string doc_id;
  std::optional<std::string> section;
  std::string text;
  int word_count = 0;

  friend bool operator==(const SpecChunk&, const SpecChunk&) = default;
};

}  // namespace oranval
