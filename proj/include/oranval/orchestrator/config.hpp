#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "oranval/backends/http.hpp"
#include "oranval/classifier/deterministic.hpp"
#include "oranval/common/retry.hpp"
#include "oranval/log_ingest/dissector.hpp"
#include "oranval/retrieval/chunker.hpp"

namespace oranval {

struct BackendSettings {
  // "offline" uses the in-process deterministic backends, "http" a remote
  // OpenAI-compatible server.
  std::string kind = "offline";
  std::size_t dimension = 1024;
  HttpBackendConfig http;
};

struct GatewaySettings {
  std::string bind = "127.0.0.1";
  int port = 8080;
  // Environment variable holding the static bearer token; auth is disabled
  // when the variable is unset or empty.
  std::string token_env = "ORANVAL_API_TOKEN";
};

struct OrchestratorConfig {
  std::filesystem::path runs_dir = "runs";
  std::filesystem::path repository_dir = "test_cases";
  std::filesystem::path corpus_dir = "corpus";
  std::filesystem::path index_path = "index.ovix";

  std::size_t k_retrieve = 100;
  std::size_t k_final = 15;
  std::size_t k_approval = 5;
  ChunkingOptions chunking;

  DissectorConfig dissector;
  ProtocolFilter protocols;

  std::size_t max_in_flight = 4;
  BackendSettings embedding;
  BackendSettings metric_embedding{"offline", 2048, {}};
  BackendSettings reranker;
  BackendSettings generator;
  BackendSettings chat;

  RetryPolicy retry;

  // "deterministic" or "llm".
  std::string classifier = "deterministic";
  MatchRules match_rules;
  bool strict_debug_chronology = false;
  std::size_t parallelism = 1;

  GatewaySettings gateway;
};

// Relative paths are resolved against base_dir. Unknown keys are rejected so
// that typos do not silently fall back to defaults. Throws Error(Config).
OrchestratorConfig config_from_yaml(const std::string& yaml_text, const std::filesystem::path& base_dir = {});
OrchestratorConfig load_config(const std::filesystem::path& path);

// Every setting that can change a verdict, as canonical JSON. Secrets are
// never part of it: only the name of the token variable is recorded.
nlohmann::json config_snapshot(const OrchestratorConfig& config);
std::string config_hash(const OrchestratorConfig& config);

}  // namespace oranval
