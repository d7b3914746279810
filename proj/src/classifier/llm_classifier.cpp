#include "oranval/classifier/llm_classifier.hpp"

#include "oranval/classifier/reply_parser.hpp"
#include "oranval/common/error.hpp"
#include "oranval/common/text.hpp"

namespace oranval {

LlmClassifier::LlmClassifier(std::shared_ptr<const ChatBackend> backend, LlmClassifierOptions options)
    : backend_(std::move(backend)), options_(std::move(options)) {
  if (!backend_) throw Error(ErrorKind::Config, "LLM classifier needs a chat backend");
}

std::string LlmClassifier::build_prompt(const FlowStep& step, const LogRecord& record) const {
  nlohmann::json layers = nlohmann::json::object();
  for (const auto& [protocol, fields] : record.layers) layers[protocol] = fields;
  return text::substitute(options_.prompt_template, {{"ordinal", std::to_string(step.ordinal)},
                                                     {"step", step.description},
                                                     {"index", std::to_string(record.index)},
                                                     {"record", layers.dump(2)}});
}

std::string LlmClassifier::ask(const std::string& prompt) const {
  try {
    return with_retries(options_.transport_retry,
                        [&] { return backend_->complete(options_.system_prompt, prompt); });
  } catch (const std::exception& e) {
    throw Error(ErrorKind::Classification, std::string("classifier backend failed: ") + e.what());
  }
}

ClassificationResult LlmClassifier::classify(const FlowStep& step, const LogRecord& record) const {
  const std::string prompt = build_prompt(step, record);
  std::string reply = ask(prompt);
  ParsedReply parsed;
  try {
    parsed = parse_classifier_reply(reply);
  } catch (const ReplyError&) {
    reply = ask(prompt + options_.format_reminder);
    try {
      parsed = parse_classifier_reply(reply);
    } catch (const ReplyError& e) {
      throw ReplyError(ErrorKind::Classification,
                       "unparseable classifier reply for step " + std::to_string(step.ordinal) + ", log index " +
                           std::to_string(record.index) + ": " + e.what(),
                       reply);
    }
  }
  return {step.ordinal, record.index, parsed.label, parsed.confidence, std::move(parsed.explanation), id()};
}

}  // namespace oranval
