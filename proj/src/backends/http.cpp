#include "oranval/backends/http.hpp"

#include <condition_variable>
#include <cstdlib>
#include <mutex>
#include <stdexcept>

#include <httplib.h>

#include "oranval/common/error.hpp"

namespace oranval {

struct ConcurrencyLimiter::State {
  std::mutex mu;
  std::condition_variable cv;
  std::size_t in_flight = 0;
};

ConcurrencyLimiter::ConcurrencyLimiter(std::size_t max_in_flight)
    : state_(std::make_unique<State>()), max_(max_in_flight == 0 ? 1 : max_in_flight) {}

ConcurrencyLimiter::~ConcurrencyLimiter() = default;

void ConcurrencyLimiter::acquire() {
  std::unique_lock lock(state_->mu);
  state_->cv.wait(lock, [&] { return state_->in_flight < max_; });
  ++state_->in_flight;
}

void ConcurrencyLimiter::release() {
  {
    std::lock_guard lock(state_->mu);
    --state_->in_flight;
  }
  state_->cv.notify_one();
}

namespace {

struct SplitUrl {
  std::string origin;
  std::string prefix;
};

SplitUrl split_url(const std::string& url) {
  const auto scheme = url.find("://");
  if (scheme == std::string::npos) throw Error(ErrorKind::Config, "backend url lacks a scheme: " + url);
  const auto slash = url.find('/', scheme + 3);
  if (slash == std::string::npos) return {url, ""};
  std::string prefix = url.substr(slash);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  return {url.substr(0, slash), prefix};
}

class Slot {
 public:
  explicit Slot(ConcurrencyLimiter* l) : l_(l) {
    if (l_) l_->acquire();
  }
  ~Slot() {
    if (l_) l_->release();
  }
  Slot(const Slot&) = delete;
  Slot& operator=(const Slot&) = delete;

 private:
  ConcurrencyLimiter* l_;
};

}  // namespace

nlohmann::json post_json(const HttpBackendConfig& config, std::string_view path, const nlohmann::json& body,
                         ConcurrencyLimiter* limiter) {
  const auto url = split_url(config.base_url);
  httplib::Client client(url.origin);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(config.timeout);
  client.set_connection_timeout(secs.count(), 0);
  client.set_read_timeout(secs.count(), 0);
  httplib::Headers headers;
  if (!config.api_key_env.empty()) {
    if (const char* token = std::getenv(config.api_key_env.c_str()); token && *token) {
      headers.emplace("Authorization", std::string("Bearer ") + token);
    }
  }
  const std::string target = url.prefix + std::string(path);
  Slot slot(limiter);
  auto res = client.Post(target, headers, body.dump(), "application/json");
  if (!res) {
    throw Error(ErrorKind::Backend, "POST " + url.origin + target + " failed: " + httplib::to_string(res.error()));
  }
  if (res->status < 200 || res->status >= 300) {
    throw Error(ErrorKind::Backend, "POST " + url.origin + target + " returned HTTP " + std::to_string(res->status));
  }
  try {
    return nlohmann::json::parse(res->body);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Backend, "POST " + url.origin + target + " returned invalid JSON: " + e.what());
  }
}

HttpEmbeddingClient::HttpEmbeddingClient(HttpBackendConfig config, std::shared_ptr<ConcurrencyLimiter> limiter)
    : config_(std::move(config)), limiter_(std::move(limiter)) {}

Embedding HttpEmbeddingClient::embed(std::string_view text) const {
  const auto reply = post_json(config_, "/v1/embeddings", {{"model", config_.model}, {"input", text}}, limiter_.get());
  try {
    return reply.at("data").at(0).at("embedding").get<Embedding>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Backend, std::string("unexpected embeddings reply: ") + e.what());
  }
}

HttpRerankerClient::HttpRerankerClient(HttpBackendConfig config, std::shared_ptr<ConcurrencyLimiter> limiter)
    : config_(std::move(config)), limiter_(std::move(limiter)) {}

double HttpRerankerClient::score(std::string_view query, std::string_view passage) const {
  const nlohmann::json body{{"model", config_.model}, {"query", query}, {"documents", {passage}}};
  const auto reply = post_json(config_, "/v1/rerank", body, limiter_.get());
  try {
    return reply.at("results").at(0).at("relevance_score").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Backend, std::string("unexpected rerank reply: ") + e.what());
  }
}

HttpChatClient::HttpChatClient(HttpBackendConfig config, std::shared_ptr<ConcurrencyLimiter> limiter)
    : config_(std::move(config)), limiter_(std::move(limiter)) {}

std::string HttpChatClient::complete(std::string_view system_prompt, std::string_view user_prompt) const {
  nlohmann::json messages = nlohmann::json::array();
  if (!system_prompt.empty()) messages.push_back({{"role", "system"}, {"content", system_prompt}});
  messages.push_back({{"role", "user"}, {"content", user_prompt}});
  const nlohmann::json body{{"model", config_.model}, {"messages", messages}, {"temperature", 0}};
  const auto reply = post_json(config_, "/v1/chat/completions", body, limiter_.get());
  try {
    return reply.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Backend, std::string("unexpected chat reply: ") + e.what());
  }
}

}  // namespace oranval
