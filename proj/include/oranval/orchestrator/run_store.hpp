#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "oranval/orchestrator/run_record.hpp"

namespace oranval {

// Throws SchemaError(field "run_id") unless id matches [A-Za-z0-9][A-Za-z0-9._-]{0,127}.
void check_run_id(std::string_view run_id);

// runs/<run_id>/record.json plus one file per artifact (flow.json,
// ticket.json, logs.json, matrix.json, report.json, ...). Every file is
// written to a temporary sibling and renamed. record.json carries a checksum
// of itself and of each artifact, verified on load.
class RunStore {
 public:
  explicit RunStore(std::filesystem::path root);

  const std::filesystem::path& root() const { return root_; }
  std::filesystem::path dir(const std::string& run_id) const;
  bool exists(const std::string& run_id) const;

  // Writes the artifact and records its checksum in run.artifacts. The record
  // itself is not saved.
  void write_artifact(RunRecord& run, const std::string& name, std::string_view content) const;
  // Error(Integrity) when the artifact is missing or its checksum differs.
  std::string read_artifact(const RunRecord& run, const std::string& name) const;

  void save(const RunRecord& run) const;
  // Error(NotFound) for unknown runs; Error(Integrity) for an unreadable
  // record, a missing artifact or a checksum mismatch.
  RunRecord load(const std::string& run_id) const;

  std::vector<std::string> list() const;

 private:
  std::filesystem::path root_;
};

}  // namespace oranval
