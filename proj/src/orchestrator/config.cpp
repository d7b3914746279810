#include "oranval/orchestrator/config.hpp"

#include <set>

#include <yaml-cpp/yaml.h>

#include "oranval/common/error.hpp"
#include "oranval/common/file_io.hpp"
#include "oranval/common/text.hpp"

namespace oranval {

namespace {

void check_keys(const YAML::Node& node, const std::string& where, const std::set<std::string>& allowed) {
  if (!node.IsMap()) throw Error(ErrorKind::Config, where + " must be a mapping");
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.count(key)) throw Error(ErrorKind::Config, "unknown config key " + where + "." + key);
  }
}

template <typename T>
void read(const YAML::Node& node, const char* key, const std::string& where, T& out) {
  if (!node[key]) return;
  try {
    out = node[key].as<T>();
  } catch (const YAML::Exception& e) {
    throw Error(ErrorKind::Config, "invalid value for " + where + "." + key + ": " + e.what());
  }
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return (path.is_absolute() || base.empty() ? path : base / path).lexically_normal();
}

BackendSettings read_backend(const YAML::Node& node, const std::string& where, BackendSettings out) {
  if (!node) return out;
  check_keys(node, where, {"kind", "dimension", "base_url", "model", "api_key_env", "timeout_ms"});
  read(node, "kind", where, out.kind);
  read(node, "dimension", where, out.dimension);
  read(node, "base_url", where, out.http.base_url);
  read(node, "model", where, out.http.model);
  read(node, "api_key_env", where, out.http.api_key_env);
  if (node["timeout_ms"]) out.http.timeout = std::chrono::milliseconds(node["timeout_ms"].as<long>());
  if (out.kind != "offline" && out.kind != "http") {
    throw Error(ErrorKind::Config, where + ".kind must be offline or http, got " + out.kind);
  }
  if (out.kind == "http" && out.http.base_url.empty()) throw Error(ErrorKind::Config, where + ".base_url is required");
  if (out.dimension == 0) throw Error(ErrorKind::Config, where + ".dimension must be positive");
  return out;
}

nlohmann::json backend_json(const BackendSettings& b) {
  nlohmann::json j{{"kind", b.kind}};
  if (b.kind == "offline") {
    j["dimension"] = b.dimension;
  } else {
    j["base_url"] = b.http.base_url;
    j["model"] = b.http.model;
    j["api_key_env"] = b.http.api_key_env;
  }
  return j;
}

}  // namespace

OrchestratorConfig config_from_yaml(const std::string& yaml_text, const std::filesystem::path& base_dir) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    throw Error(ErrorKind::Config, std::string("config is not valid YAML: ") + e.what());
  }
  OrchestratorConfig c;
  if (!root || root.IsNull()) return c;
  check_keys(root, "config", {"runs_dir", "repository_dir", "corpus_dir", "index_path", "retrieval", "dissector",
                              "backends", "retry", "classifier", "validation", "gateway"});

  if (root["runs_dir"]) c.runs_dir = resolve(base_dir, root["runs_dir"].as<std::string>());
  else c.runs_dir = resolve(base_dir, c.runs_dir.string());
  if (root["repository_dir"]) c.repository_dir = resolve(base_dir, root["repository_dir"].as<std::string>());
  else c.repository_dir = resolve(base_dir, c.repository_dir.string());
  if (root["corpus_dir"]) c.corpus_dir = resolve(base_dir, root["corpus_dir"].as<std::string>());
  else c.corpus_dir = resolve(base_dir, c.corpus_dir.string());
  if (root["index_path"]) c.index_path = resolve(base_dir, root["index_path"].as<std::string>());
  else c.index_path = resolve(base_dir, c.index_path.string());

  if (auto r = root["retrieval"]) {
    check_keys(r, "retrieval", {"k_retrieve", "k_final", "k_approval", "chunk_words", "chunk_overlap"});
    read(r, "k_retrieve", "retrieval", c.k_retrieve);
    read(r, "k_final", "retrieval", c.k_final);
    read(r, "k_approval", "retrieval", c.k_approval);
    read(r, "chunk_words", "retrieval", c.chunking.chunk_words);
    read(r, "chunk_overlap", "retrieval", c.chunking.overlap_words);
  }
  if (c.k_retrieve < 1 || c.k_final < 1 || c.k_approval < 1) throw Error(ErrorKind::Config, "k values must be >= 1");
  if (c.chunking.chunk_words <= c.chunking.overlap_words || c.chunking.overlap_words < 0) {
    throw Error(ErrorKind::Config, "retrieval.chunk_words must exceed retrieval.chunk_overlap >= 0");
  }

  if (auto d = root["dissector"]) {
    check_keys(d, "dissector", {"executable", "decode_as", "preferences", "export_format", "extra_args", "protocols"});
    read(d, "executable", "dissector", c.dissector.executable);
    // A bare name is looked up on PATH; anything with a slash is a path.
    if (c.dissector.executable.find('/') != std::string::npos) {
      c.dissector.executable = resolve(base_dir, c.dissector.executable).string();
    }
    read(d, "decode_as", "dissector", c.dissector.decode_as);
    read(d, "preferences", "dissector", c.dissector.preferences);
    read(d, "export_format", "dissector", c.dissector.export_format);
    read(d, "extra_args", "dissector", c.dissector.extra_args);
    if (d["protocols"]) {
      std::vector<std::string> protos;
      read(d, "protocols", "dissector", protos);
      c.protocols = std::set<std::string>(protos.begin(), protos.end());
    }
  }

  if (auto b = root["backends"]) {
    check_keys(b, "backends", {"max_in_flight", "embedding", "metric_embedding", "reranker", "generator", "chat"});
    read(b, "max_in_flight", "backends", c.max_in_flight);
    c.embedding = read_backend(b["embedding"], "backends.embedding", c.embedding);
    c.metric_embedding = read_backend(b["metric_embedding"], "backends.metric_embedding", c.metric_embedding);
    c.reranker = read_backend(b["reranker"], "backends.reranker", c.reranker);
    c.generator = read_backend(b["generator"], "backends.generator", c.generator);
    c.chat = read_backend(b["chat"], "backends.chat", c.chat);
  }

  if (auto r = root["retry"]) {
    check_keys(r, "retry", {"max_attempts", "backoff_ms"});
    read(r, "max_attempts", "retry", c.retry.max_attempts);
    if (r["backoff_ms"]) c.retry.backoff = std::chrono::milliseconds(r["backoff_ms"].as<long>());
  }
  if (c.retry.max_attempts < 1) throw Error(ErrorKind::Config, "retry.max_attempts must be >= 1");

  if (auto k = root["classifier"]) {
    check_keys(k, "classifier", {"kind", "strict", "restrict_to_protocol", "require_endpoints", "endpoint_aliases",
                                     "message_aliases"});
    read(k, "kind", "classifier", c.classifier);
    read(k, "strict", "classifier", c.match_rules.strict);
    read(k, "restrict_to_protocol", "classifier", c.match_rules.restrict_to_protocol);
    read(k, "require_endpoints", "classifier", c.match_rules.require_endpoints);
    read(k, "endpoint_aliases", "classifier", c.match_rules.endpoint_aliases);
    read(k, "message_aliases", "classifier", c.match_rules.message_aliases);
  }
  if (c.classifier != "deterministic" && c.classifier != "llm") {
    throw Error(ErrorKind::Config, "classifier.kind must be deterministic or llm, got " + c.classifier);
  }
  if (c.classifier == "llm" && c.chat.kind != "http") {
    throw Error(ErrorKind::Config, "classifier.kind llm requires backends.chat.kind http");
  }

  if (auto v = root["validation"]) {
    check_keys(v, "validation", {"strict_debug_chronology", "parallelism"});
    read(v, "strict_debug_chronology", "validation", c.strict_debug_chronology);
    read(v, "parallelism", "validation", c.parallelism);
  }
  if (c.parallelism < 1) throw Error(ErrorKind::Config, "validation.parallelism must be >= 1");

  if (auto g = root["gateway"]) {
    check_keys(g, "gateway", {"bind", "port", "token_env"});
    read(g, "bind", "gateway", c.gateway.bind);
    read(g, "port", "gateway", c.gateway.port);
    read(g, "token_env", "gateway", c.gateway.token_env);
  }
  return c;
}

OrchestratorConfig load_config(const std::filesystem::path& path) {
  std::string content;
  try {
    content = io::read_file(path);
  } catch (const Error& e) {
    throw Error(ErrorKind::Config, std::string("cannot read config: ") + e.what());
  }
  return config_from_yaml(content, path.parent_path());
}

nlohmann::json config_snapshot(const OrchestratorConfig& c) {
  nlohmann::json protocols = nullptr;
  if (c.protocols) protocols = std::vector<std::string>(c.protocols->begin(), c.protocols->end());
  nlohmann::json aliases = nlohmann::json::object();
  for (const auto& [k, v] : c.match_rules.endpoint_aliases) aliases[k] = v;
  nlohmann::json message_aliases = nlohmann::json::object();
  for (const auto& [k, v] : c.match_rules.message_aliases) message_aliases[k] = v;
  return {
      {"retrieval",
       {{"k_retrieve", c.k_retrieve},
        {"k_final", c.k_final},
        {"k_approval", c.k_approval},
        {"chunk_words", c.chunking.chunk_words},
        {"chunk_overlap", c.chunking.overlap_words}}},
      {"dissector",
       {{"executable", c.dissector.executable},
        {"decode_as", c.dissector.decode_as},
        {"preferences", c.dissector.preferences},
        {"export_format", c.dissector.export_format},
        {"extra_args", c.dissector.extra_args},
        {"protocols", protocols}}},
      {"backends",
       {{"embedding", backend_json(c.embedding)},
        {"metric_embedding", backend_json(c.metric_embedding)},
        {"reranker", backend_json(c.reranker)},
        {"generator", backend_json(c.generator)},
        {"chat", backend_json(c.chat)}}},
      {"retry", {{"max_attempts", c.retry.max_attempts}, {"backoff_ms", c.retry.backoff.count()}}},
      {"classifier",
       {{"kind", c.classifier},
        {"strict", c.match_rules.strict},
        {"restrict_to_protocol", c.match_rules.restrict_to_protocol},
        {"require_endpoints", c.match_rules.require_endpoints},
        {"endpoint_aliases", aliases},
        {"message_aliases", message_aliases}}},
      {"validation", {{"strict_debug_chronology", c.strict_debug_chronology}}},
  };
}

std::string config_hash(const OrchestratorConfig& config) {
  return text::fnv1a64_hex(config_snapshot(config).dump());
}

}  // namespace oranval
