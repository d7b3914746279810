#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace oranval {

// Stable category used by the gateway to map failures onto HTTP statuses and
// by the CLI to pick exit codes.
enum class ErrorKind {
  Parse,
  Schema,
  EmptySequence,
  Config,
  Subprocess,
  Precondition,
  IndexBuild,
  EmptyIndex,
  GenerationParse,
  Backend,
  State,
  Classification,
  Rule,
  InvalidFlow,
  AbortedRun,
  IncompleteMatrix,
  Metric,
  Scoring,
  UndefinedAccuracy,
  Load,
  NotFound,
  Integrity,
  Report,
  Usage,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t byte_offset);

  std::size_t byte_offset() const noexcept { return byte_offset_; }

 private:
  std::size_t byte_offset_;
};

class SchemaError : public Error {
 public:
  SchemaError(const std::string& message, std::string field);

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

class SubprocessError : public Error {
 public:
  SubprocessError(const std::string& message, int exit_code, std::string stderr_text);

  int exit_code() const noexcept { return exit_code_; }
  const std::string& stderr_text() const noexcept { return stderr_; }

 private:
  int exit_code_;
  std::string stderr_;
};

// Error raised when a backend reply cannot be interpreted; keeps the raw text.
class ReplyError : public Error {
 public:
  ReplyError(ErrorKind kind, const std::string& message, std::string raw_reply);

  const std::string& raw_reply() const noexcept { return raw_; }

 private:
  std::string raw_;
};

class LoadError : public Error {
 public:
  LoadError(const std::string& message, std::string file, std::string field);

  const std::string& file() const noexcept { return file_; }
  const std::string& field() const noexcept { return field_; }

 private:
  std::string file_;
  std::string field_;
};

}  // namespace oranval
