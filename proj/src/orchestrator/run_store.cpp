#include "oranval/orchestrator/run_store.hpp"

#include <algorithm>
#include <regex>

#include "oranval/common/error.hpp"
#include "oranval/common/file_io.hpp"
#include "oranval/common/text.hpp"

namespace oranval {

void check_run_id(std::string_view run_id) {
  static const std::regex pattern(R"([A-Za-z0-9][A-Za-z0-9._-]{0,127})");
  if (!std::regex_match(run_id.begin(), run_id.end(), pattern)) {
    throw SchemaError("invalid run id '" + std::string(run_id) + "'", "run_id");
  }
}

RunStore::RunStore(std::filesystem::path root) : root_(std::move(root)) {}

std::filesystem::path RunStore::dir(const std::string& run_id) const {
  check_run_id(run_id);
  return root_ / run_id;
}

bool RunStore::exists(const std::string& run_id) const {
  return std::filesystem::exists(dir(run_id) / "record.json");
}

void RunStore::write_artifact(RunRecord& run, const std::string& name, std::string_view content) const {
  if (name == "record.json" || name.find('/') != std::string::npos) {
    throw Error(ErrorKind::Precondition, "invalid artifact name " + name);
  }
  io::write_file_atomic(dir(run.run_id) / name, content);
  run.artifacts[name] = text::fnv1a64_hex(content);
}

std::string RunStore::read_artifact(const RunRecord& run, const std::string& name) const {
  const auto it = run.artifacts.find(name);
  if (it == run.artifacts.end()) throw Error(ErrorKind::NotFound, "run " + run.run_id + " has no artifact " + name);
  const auto path = dir(run.run_id) / name;
  std::string content;
  try {
    content = io::read_file(path);
  } catch (const Error&) {
    throw Error(ErrorKind::Integrity, "run " + run.run_id + ": artifact " + name + " is missing");
  }
  if (text::fnv1a64_hex(content) != it->second) {
    throw Error(ErrorKind::Integrity, "run " + run.run_id + ": artifact " + name + " fails its checksum");
  }
  return content;
}

void RunStore::save(const RunRecord& run) const {
  const auto body = to_json(run);
  const nlohmann::json doc{{"checksum", text::fnv1a64_hex(body.dump())}, {"record", body}};
  io::write_file_atomic(dir(run.run_id) / "record.json", doc.dump(2) + "\n");
}

RunRecord RunStore::load(const std::string& run_id) const {
  const auto path = dir(run_id) / "record.json";
  if (!std::filesystem::exists(path)) throw Error(ErrorKind::NotFound, "unknown run " + run_id);
  RunRecord run;
  try {
    const auto doc = nlohmann::json::parse(io::read_file(path));
    const auto& body = doc.at("record");
    if (text::fnv1a64_hex(body.dump()) != doc.at("checksum").get<std::string>()) {
      throw Error(ErrorKind::Integrity, "run " + run_id + ": record.json fails its checksum");
    }
    run = run_from_json(body);
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Integrity) throw;
    throw Error(ErrorKind::Integrity, "run " + run_id + ": record.json is unreadable: " + e.what());
  } catch (const std::exception& e) {
    throw Error(ErrorKind::Integrity, "run " + run_id + ": record.json is unreadable: " + e.what());
  }
  if (run.run_id != run_id) throw Error(ErrorKind::Integrity, "run " + run_id + ": record names run " + run.run_id);
  for (const auto& [name, _] : run.artifacts) read_artifact(run, name);
  return run;
}

std::vector<std::string> RunStore::list() const {
  std::vector<std::string> ids;
  if (!std::filesystem::is_directory(root_)) return ids;
  for (const auto& entry : std::filesystem::directory_iterator(root_)) {
    if (entry.is_directory() && std::filesystem::exists(entry.path() / "record.json")) {
      ids.push_back(entry.path().filename().string());
    }
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

}  // namespace oranval
