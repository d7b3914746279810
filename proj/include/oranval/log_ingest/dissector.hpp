#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "oranval/log_ingest/log_parser.hpp"

namespace oranval {

// External dissector invocation (tshark-compatible command line).
struct DissectorConfig {
  std::string executable = "tshark";
  // Passed as "-d <entry>", e.g. "sctp.ppi==62,f1ap".
  std::vector<std::string> decode_as;
  // Passed as "-o <entry>", e.g. DLT user table assignments.
  std::vector<std::string> preferences;
  std::string export_format = "json";
  std::vector<std::string> extra_args;
};

struct ProcessResult {
  int exit_code = 0;
  std::string stdout_text;
  std::string stderr_text;
};

// Resolves an executable name against PATH; empty path when not found.
std::filesystem::path find_executable(std::string_view name);

// Runs argv[0] with the given arguments, capturing both output streams.
ProcessResult run_process(const std::vector<std::string>& argv);

std::vector<std::string> dissector_command(const DissectorConfig& config,
                                           const std::filesystem::path& capture);

// Rewrites tshark "-T json" output (array of {"_source": {"layers": ...}})
// into the canonical log schema. Nested field trees are flattened into
// "name: value" strings in document order; the "frame" layer supplies frame
// number and timestamp. Input already in another shape is returned unchanged.
std::string normalize_dissector_json(std::string_view content);

// Throws Error(Config) for an unavailable executable and SubprocessError
// (carrying stderr) for a non-zero exit.
LogSequence dissect_capture(const std::filesystem::path& capture, const DissectorConfig& config,
                            const ProtocolFilter& filter = std::nullopt);

}  // namespace oranval
