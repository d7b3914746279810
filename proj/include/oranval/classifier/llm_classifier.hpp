#pragma once

#include <memory>
#include <string>
#include <string_view>

#include "oranval/classifier/classification.hpp"
#include "oranval/common/retry.hpp"

namespace oranval {

// Single-turn chat completion.
class ChatBackend {
 public:
  virtual ~ChatBackend() = default;
  virtual std::string complete(std::string_view system_prompt, std::string_view user_prompt) const = 0;
  virtual std::string id() const = 0;
};

struct LlmClassifierOptions {
  std::string system_prompt =
      "You are a 5G O-RAN signaling validation assistant. You judge one log entry at a time.";
  // Placeholders: {ordinal} {step} {index} {record}.
  std::string prompt_template =
      "Determine whether the procedural step below is executed in the given log entry.\n"
      "Reply in exactly this format:\n"
      "Label:\nYes or No\nConfidence Score:\n<0-100>%\nExplanation:\n<reasoning>\n\n"
      "Step {ordinal}: {step}\n\nLog entry {index}:\n{record}\n";
  std::string format_reminder =
      "\nYour previous reply could not be parsed. Answer using exactly the Label, Confidence Score and "
      "Explanation headers shown above.\n";
  RetryPolicy transport_retry;
};

// Prompts the backend with the step and the serialized record. A reply that
// cannot be parsed is retried once with a format reminder; a second failure
// raises ReplyError(Classification) carrying the raw reply. Transport failures
// are retried per policy and then raised as Error(Classification).
class LlmClassifier final : public StepClassifier {
 public:
  LlmClassifier(std::shared_ptr<const ChatBackend> backend, LlmClassifierOptions options = {});

  ClassificationResult classify(const FlowStep& step, const LogRecord& record) const override;
  std::string id() const override { return "llm:" + backend_->id(); }

  std::string build_prompt(const FlowStep& step, const LogRecord& record) const;

 private:
  std::string ask(const std::string& prompt) const;

  std::shared_ptr<const ChatBackend> backend_;
  LlmClassifierOptions options_;
};

}  // namespace oranval
