#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace oranval {

using Embedding = std::vector<float>;

// Backend interfaces. Implementations must be safe to call concurrently.
class EmbeddingClient {
 public:
  virtual ~EmbeddingClient() = default;
  virtual Embedding embed(std::string_view text) const = 0;
  virtual std::string id() const = 0;
};

class RerankerClient {
 public:
  virtual ~RerankerClient() = default;
  // Relevance of passage to query; larger is more relevant, may be negative.
  virtual double score(std::string_view query, std::string_view passage) const = 0;
  virtual std::string id() const = 0;
};

class GenerationClient {
 public:
  virtual ~GenerationClient() = default;
  virtual std::string generate(std::string_view prompt) const = 0;
  virtual std::string id() const = 0;
};

double euclidean_distance(const Embedding& a, const Embedding& b);

}  // namespace oranval
