#include "oranval/log_ingest/dissector.hpp"

#include <fcntl.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cmath>
#include <cstring>
#include <cstdlib>
#include <map>
#include <memory>
#include <mutex>

#include "oranval/common/error.hpp"
#include "oranval/common/file_io.hpp"

extern char** environ;

namespace oranval {

namespace fs = std::filesystem;
// Dissector field order is significant; keep it.
using json = nlohmann::ordered_json;

namespace {

bool is_executable_file(const fs::path& p) {
  std::error_code ec;
  return fs::is_regular_file(p, ec) && ::access(p.c_str(), X_OK) == 0;
}

std::mutex& capture_lock(const fs::path& capture) {
  static std::mutex registry_mutex;
  static std::map<std::string, std::unique_ptr<std::mutex>> locks;
  std::error_code ec;
  auto key = fs::weakly_canonical(capture, ec).string();
  if (ec) key = capture.string();
  std::lock_guard guard(registry_mutex);
  auto& slot = locks[key];
  if (!slot) slot = std::make_unique<std::mutex>();
  return *slot;
}

std::string strip_suffix(std::string key, std::string_view suffix) {
  if (key.size() > suffix.size() && key.compare(key.size() - suffix.size(), suffix.size(), suffix) == 0)
    key.erase(key.size() - suffix.size());
  return key;
}

void flatten(const std::string& key, const json& value, std::vector<std::string>& out) {
  if (value.is_object()) {
    out.push_back(strip_suffix(strip_suffix(key, "_tree"), "_element"));
    for (const auto& [k, v] : value.items()) flatten(k, v, out);
  } else if (value.is_array()) {
    for (const auto& item : value) flatten(key, item, out);
  } else if (value.is_string()) {
    out.push_back(key + ": " + value.get<std::string>());
  } else if (!value.is_null()) {
    out.push_back(key + ": " + value.dump());
  }
}

std::string frame_field(const json& frame, const char* name) {
  if (auto it = frame.find(name); it != frame.end() && it->is_string()) return it->get<std::string>();
  return {};
}

}  // namespace

fs::path find_executable(std::string_view name) {
  if (name.empty()) return {};
  if (name.find('/') != std::string_view::npos) {
    return is_executable_file(fs::path(name)) ? fs::path(name) : fs::path();
  }
  const char* path_env = std::getenv("PATH");
  if (!path_env) return {};
  std::string_view dirs(path_env);
  while (!dirs.empty()) {
    const auto colon = dirs.find(':');
    const auto dir = dirs.substr(0, colon);
    if (!dir.empty()) {
      fs::path candidate = fs::path(dir) / fs::path(name);
      if (is_executable_file(candidate)) return candidate;
    }
    if (colon == std::string_view::npos) break;
    dirs.remove_prefix(colon + 1);
  }
  return {};
}

ProcessResult run_process(const std::vector<std::string>& argv) {
  if (argv.empty()) throw Error(ErrorKind::Config, "empty command line");

  char out_tmpl[] = "/tmp/oranval-out-XXXXXX";
  char err_tmpl[] = "/tmp/oranval-err-XXXXXX";
  const int out_fd = ::mkstemp(out_tmpl);
  const int err_fd = ::mkstemp(err_tmpl);
  if (out_fd < 0 || err_fd < 0) throw Error(ErrorKind::Subprocess, "cannot create capture files");

  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_adddup2(&actions, out_fd, STDOUT_FILENO);
  posix_spawn_file_actions_adddup2(&actions, err_fd, STDERR_FILENO);

  std::vector<char*> cargv;
  cargv.reserve(argv.size() + 1);
  for (const auto& a : argv) cargv.push_back(const_cast<char*>(a.c_str()));
  cargv.push_back(nullptr);

  pid_t pid = 0;
  const int rc = ::posix_spawn(&pid, argv.front().c_str(), &actions, nullptr, cargv.data(), environ);
  posix_spawn_file_actions_destroy(&actions);
  ::close(out_fd);
  ::close(err_fd);

  ProcessResult result;
  if (rc == 0) {
    int status = 0;
    while (::waitpid(pid, &status, 0) < 0 && errno == EINTR) {
    }
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : 128 + WTERMSIG(status);
  }
  result.stdout_text = io::read_file(out_tmpl);
  result.stderr_text = io::read_file(err_tmpl);
  ::unlink(out_tmpl);
  ::unlink(err_tmpl);
  if (rc != 0) throw Error(ErrorKind::Config, "cannot spawn " + argv.front() + ": " + std::strerror(rc));
  return result;
}

std::vector<std::string> dissector_command(const DissectorConfig& config, const fs::path& capture) {
  std::vector<std::string> argv{config.executable, "-r", capture.string(), "-T", config.export_format};
  for (const auto& d : config.decode_as) {
    argv.emplace_back("-d");
    argv.push_back(d);
  }
  for (const auto& o : config.preferences) {
    argv.emplace_back("-o");
    argv.push_back(o);
  }
  argv.insert(argv.end(), config.extra_args.begin(), config.extra_args.end());
  return argv;
}

std::string normalize_dissector_json(std::string_view content) {
  json root = json::parse(content, nullptr, false);
  if (root.is_discarded() || !root.is_array() || root.empty()) return std::string(content);
  const auto& first = root.front();
  if (!first.is_object() || !first.contains("_source")) return std::string(content);

  json out = json::array();
  for (std::size_t pos = 0; pos < root.size(); ++pos) {
    const json& layers = root[pos].at("_source").at("layers");
    json packet;
    packet["frame"] = static_cast<std::int64_t>(pos + 1);
    json canon_layers = json::object();
    for (const auto& [protocol, tree] : layers.items()) {
      if (protocol == "frame") {
        if (auto n = frame_field(tree, "frame.number"); !n.empty()) packet["frame"] = std::stoll(n);
        if (auto t = frame_field(tree, "frame.time_epoch"); !t.empty()) {
          packet["timestamp"] = static_cast<std::int64_t>(std::llround(std::stod(t) * 1e6));
        }
        continue;
      }
      std::vector<std::string> fields;
      if (tree.is_object()) {
        for (const auto& [k, v] : tree.items()) flatten(k, v, fields);
      } else {
        flatten(protocol, tree, fields);
      }
      canon_layers[protocol] = fields;
    }
    packet["layers"] = std::move(canon_layers);
    out.push_back(std::move(packet));
  }
  return out.dump();
}

LogSequence dissect_capture(const fs::path& capture, const DissectorConfig& config,
                            const ProtocolFilter& filter) {
  const fs::path exe = find_executable(config.executable);
  if (exe.empty()) throw Error(ErrorKind::Config, "dissector executable not available: " + config.executable);
  std::error_code ec;
  if (!fs::is_regular_file(capture, ec)) throw Error(ErrorKind::NotFound, "capture not readable: " + capture.string());

  auto argv = dissector_command(config, capture);
  argv.front() = exe.string();

  ProcessResult result;
  {
    std::lock_guard lock(capture_lock(capture));
    result = run_process(argv);
  }
  if (result.exit_code != 0) {
    throw SubprocessError("dissector exited with code " + std::to_string(result.exit_code) + ": " +
                              result.stderr_text,
                          result.exit_code, result.stderr_text);
  }
  return parse_log_file(normalize_dissector_json(result.stdout_text), filter, capture.string());
}

}  // namespace oranval
