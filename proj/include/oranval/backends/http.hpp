#pragma once

#include <chrono>
#include <memory>
#include <string>
#include <string_view>

#include <json.hpp>

#include "oranval/classifier/llm_classifier.hpp"
#include "oranval/retrieval/clients.hpp"

namespace oranval {

// Caps in-flight requests across every client sharing it.
class ConcurrencyLimiter {
 public:
  explicit ConcurrencyLimiter(std::size_t max_in_flight);
  ~ConcurrencyLimiter();

  void acquire();
  void release();
  std::size_t max_in_flight() const { return max_; }

 private:
  struct State;
  std::unique_ptr<State> state_;
  std::size_t max_;
};

struct HttpBackendConfig {
  // "http://host:port[/prefix]"; endpoint paths are appended to the prefix.
  std::string base_url;
  std::string model;
  // Name of the environment variable holding the bearer token (may be empty).
  std::string api_key_env;
  std::chrono::milliseconds timeout{60000};
};

// POSTs a JSON body and returns the parsed JSON reply. Non-2xx statuses and
// transport failures raise Error(Backend); the token never appears in the
// message.
nlohmann::json post_json(const HttpBackendConfig& config, std::string_view path, const nlohmann::json& body,
                         ConcurrencyLimiter* limiter = nullptr);

// POST {base}/v1/embeddings {"model", "input"} -> data[0].embedding
class HttpEmbeddingClient final : public EmbeddingClient {
 public:
  HttpEmbeddingClient(HttpBackendConfig config, std::shared_ptr<ConcurrencyLimiter> limiter = nullptr);
  Embedding embed(std::string_view text) const override;
  std::string id() const override { return "http-embed:" + config_.model; }

 private:
  HttpBackendConfig config_;
  std::shared_ptr<ConcurrencyLimiter> limiter_;
};

// POST {base}/v1/rerank {"model", "query", "documents": [passage]} -> results[0].relevance_score
class HttpRerankerClient final : public RerankerClient {
 public:
  HttpRerankerClient(HttpBackendConfig config, std::shared_ptr<ConcurrencyLimiter> limiter = nullptr);
  double score(std::string_view query, std::string_view passage) const override;
  std::string id() const override { return "http-rerank:" + config_.model; }

 private:
  HttpBackendConfig config_;
  std::shared_ptr<ConcurrencyLimiter> limiter_;
};

// POST {base}/v1/chat/completions, temperature 0 -> choices[0].message.content
class HttpChatClient final : public ChatBackend, public GenerationClient {
 public:
  HttpChatClient(HttpBackendConfig config, std::shared_ptr<ConcurrencyLimiter> limiter = nullptr);
  std::string complete(std::string_view system_prompt, std::string_view user_prompt) const override;
  std::string generate(std::string_view prompt) const override { return complete({}, prompt); }
  std::string id() const override { return "http-chat:" + config_.model; }

 private:
  HttpBackendConfig config_;
  std::shared_ptr<ConcurrencyLimiter> limiter_;
};

}  // namespace oranval
