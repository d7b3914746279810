#pragma once

#include <map>
#include <string>
#include <vector>

#include "oranval/classifier/classification.hpp"

namespace oranval {

// Offline matching rules. A step is Executed when its message name occurs in
// one field of the record and, if it names a qualifier, the qualifier occurs
// anywhere in the record. Text on both sides is normalized (upper case,
// non-alphanumerics removed) before comparison.
struct MatchRules {
  // A step without message_name is a rule error rather than NotExecuted.
  bool strict = true;
  // When the step names a protocol, only that layer is searched and a record
  // without it is NotExecuted.
  bool restrict_to_protocol = true;
  // Require every endpoint label (or one of its aliases) to occur somewhere
  // in the record.
  bool require_endpoints = false;
  std::map<std::string, std::vector<std::string>> endpoint_aliases;
  // Extra spellings per message name, e.g. {"UE CAPABILITY INFO", {"UECapabilityInformation"}}.
  std::map<std::string, std::vector<std::string>> message_aliases;
};

// Normalized spellings tried for a message name: the name itself, the
// configured aliases, and a leading UL/DL expanded to UPLINK/DOWNLINK as
// NGAP spells them.
std::vector<std::string> message_variants(const std::string& message_name, const MatchRules& rules);

ClassificationResult deterministic_match(const FlowStep& step, const LogRecord& record, const MatchRules& rules = {});

class DeterministicClassifier final : public StepClassifier {
 public:
  explicit DeterministicClassifier(MatchRules rules = {}) : rules_(std::move(rules)) {}

  ClassificationResult classify(const FlowStep& step, const LogRecord& record) const override {
    return deterministic_match(step, record, rules_);
  }
  std::string id() const override { return "deterministic"; }
  const MatchRules& rules() const { return rules_; }

 private:
  MatchRules rules_;
};

}  // namespace oranval
