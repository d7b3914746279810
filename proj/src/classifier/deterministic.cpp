#include "oranval/classifier/deterministic.hpp"

#include <algorithm>

#include "oranval/common/error.hpp"
#include "oranval/common/text.hpp"

namespace oranval {

namespace {

ClassificationResult result_for(const FlowStep& step, const LogRecord& record, bool executed,
                                std::string explanation) {
  return {step.ordinal, record.index, executed ? Label::Executed : Label::NotExecuted, executed ? 100 : 0,
          std::move(explanation), "deterministic"};
}

bool record_mentions(const LogRecord& record, const std::string& normalized) {
  if (normalized.empty()) return false;
  for (const auto& [protocol, fields] : record.layers) {
    for (const auto& f : fields) {
      if (text::normalize_token(f).find(normalized) != std::string::npos) return true;
    }
  }
  return false;
}

bool endpoint_present(const std::string& label, const LogRecord& record, const MatchRules& rules) {
  if (record_mentions(record, text::normalize_token(label))) return true;
  if (auto it = rules.endpoint_aliases.find(label); it != rules.endpoint_aliases.end()) {
    for (const auto& alias : it->second) {
      if (record_mentions(record, text::normalize_token(alias))) return true;
    }
  }
  return false;
}

}  // namespace

std::vector<std::string> message_variants(const std::string& message_name, const MatchRules& rules) {
  std::vector<std::string> out;
  auto add = [&](std::string v) {
    if (!v.empty() && std::find(out.begin(), out.end(), v) == out.end()) out.push_back(std::move(v));
  };
  add(text::normalize_token(message_name));
  if (auto it = rules.message_aliases.find(message_name); it != rules.message_aliases.end()) {
    for (const auto& alias : it->second) add(text::normalize_token(alias));
  }
  const std::string upper = text::to_upper(text::trim(message_name));
  if (upper.rfind("UL ", 0) == 0) add(text::normalize_token("UPLINK " + upper.substr(3)));
  if (upper.rfind("DL ", 0) == 0) add(text::normalize_token("DOWNLINK " + upper.substr(3)));
  return out;
}

ClassificationResult deterministic_match(const FlowStep& step, const LogRecord& record, const MatchRules& rules) {
  if (!step.message_name || text::normalize_token(*step.message_name).empty()) {
    if (rules.strict) {
      throw Error(ErrorKind::Rule, "step " + std::to_string(step.ordinal) + " has no message name");
    }
    return result_for(step, record, false, "step has no message name to match");
  }
  const auto variants = message_variants(*step.message_name, rules);

  const LayerMap* searched = &record.layers;
  LayerMap single;
  if (step.protocol && rules.restrict_to_protocol) {
    auto it = record.layers.find(*step.protocol);
    if (it == record.layers.end()) {
      return result_for(step, record, false, "record carries no " + *step.protocol + " layer");
    }
    single.emplace(it->first, it->second);
    searched = &single;
  }

  for (const auto& [protocol, fields] : *searched) {
    for (const auto& field : fields) {
      const std::string normalized = text::normalize_token(field);
      if (std::none_of(variants.begin(), variants.end(),
                       [&](const std::string& v) { return normalized.find(v) != std::string::npos; })) {
        continue;
      }

      std::string explanation = "message " + *step.message_name + " matched " + protocol + " field '" + field + "'";
      if (step.qualifier) {
        if (!record_mentions(record, text::normalize_token(*step.qualifier))) {
          return result_for(step, record, false, explanation + " but payload " + *step.qualifier + " is absent");
        }
        explanation += " carrying " + *step.qualifier;
      }
      if (rules.require_endpoints && step.endpoints) {
        for (const auto* label : {&step.endpoints->sender, &step.endpoints->receiver}) {
          if (!endpoint_present(*label, record, rules)) {
            return result_for(step, record, false,
                              explanation + " but endpoint " + *label + " does not occur in the record");
          }
        }
        explanation += "; endpoints " + step.endpoints->sender + " and " + step.endpoints->receiver + " present";
      }
      return result_for(step, record, true, std::move(explanation));
    }
  }
  return result_for(step, record, false, "message " + *step.message_name + " not found in any field");
}

}  // namespace oranval
