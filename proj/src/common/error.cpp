#include "oranval/common/error.hpp"

#include <utility>

namespace oranval {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Parse: return "parse_error";
    case ErrorKind::Schema: return "schema_error";
    case ErrorKind::EmptySequence: return "empty_sequence";
    case ErrorKind::Config: return "config_error";
    case ErrorKind::Subprocess: return "subprocess_error";
    case ErrorKind::Precondition: return "precondition_violation";
    case ErrorKind::IndexBuild: return "index_build_error";
    case ErrorKind::EmptyIndex: return "empty_index";
    case ErrorKind::GenerationParse: return "generation_parse_error";
    case ErrorKind::Backend: return "backend_error";
    case ErrorKind::State: return "state_error";
    case ErrorKind::Classification: return "classification_error";
    case ErrorKind::Rule: return "rule_error";
    case ErrorKind::InvalidFlow: return "invalid_flow";
    case ErrorKind::AbortedRun: return "aborted_run";
    case ErrorKind::IncompleteMatrix: return "incomplete_matrix";
    case ErrorKind::Metric: return "metric_error";
    case ErrorKind::Scoring: return "scoring_error";
    case ErrorKind::UndefinedAccuracy: return "undefined_accuracy";
    case ErrorKind::Load: return "load_error";
    case ErrorKind::NotFound: return "not_found";
    case ErrorKind::Integrity: return "integrity_error";
    case ErrorKind::Report: return "report_error";
    case ErrorKind::Usage: return "usage_error";
  }
  return "error";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(message), kind_(kind) {}

ParseError::ParseError(const std::string& message, std::size_t byte_offset)
    : Error(ErrorKind::Parse, message + " (at byte " + std::to_string(byte_offset) + ")"),
      byte_offset_(byte_offset) {}

SchemaError::SchemaError(const std::string& message, std::string field)
    : Error(ErrorKind::Schema, message), field_(std::move(field)) {}

SubprocessError::SubprocessError(const std::string& message, int exit_code,
                                 std::string stderr_text)
    : Error(ErrorKind::Subprocess, message), exit_code_(exit_code), stderr_(std::move(stderr_text)) {}

ReplyError::ReplyError(ErrorKind kind, const std::string& message, std::string raw_reply)
    : Error(kind, message), raw_(std::move(raw_reply)) {}

LoadError::LoadError(const std::string& message, std::string file, std::string field)
    : Error(ErrorKind::Load, message), file_(std::move(file)), field_(std::move(field)) {}

}  // namespace oranval
