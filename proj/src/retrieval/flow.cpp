#include "oranval/retrieval/flow.hpp"

#include <cctype>
#include <regex>

#include "oranval/common/error.hpp"
#include "oranval/common/text.hpp"

namespace oranval {

using nlohmann::json;

std::string_view to_string(ApprovalState s) {
  switch (s) {
    case ApprovalState::Draft: return "Draft";
    case ApprovalState::PendingApproval: return "PendingApproval";
    case ApprovalState::Approved: return "Approved";
    case ApprovalState::Rejected: return "Rejected";
  }
  return "Draft";
}

std::optional<ApprovalState> parse_approval_state(std::string_view s) {
  for (auto state : {ApprovalState::Draft, ApprovalState::PendingApproval, ApprovalState::Approved,
                     ApprovalState::Rejected}) {
    if (text::iequals(s, to_string(state))) return state;
  }
  return std::nullopt;
}

namespace {

struct CleanMessage {
  std::string name;
  std::optional<std::string> qualifier;
};

CleanMessage clean_message(std::string message) {
  CleanMessage out;
  // Split off a trailing parenthetical such as "(Registration Complete)".
  if (!message.empty() && message.back() == ')') {
    if (const auto open = message.rfind('('); open != std::string::npos) {
      std::string q(text::trim(std::string_view(message).substr(open + 1, message.size() - open - 2)));
      if (!q.empty()) out.qualifier = std::move(q);
      message.erase(open);
    }
  }
  std::string_view v = text::trim(message);
  if (text::iequals(v.substr(v.size() >= 8 ? v.size() - 8 : 0), " message")) v.remove_suffix(8);
  out.name = std::string(text::trim(v));
  return out;
}

bool is_caps_token(std::string_view w) {
  bool has_alpha = false;
  for (char c : w) {
    const auto u = static_cast<unsigned char>(c);
    if (std::islower(u)) return false;
    if (std::isalpha(u)) has_alpha = true;
    if (!std::isalnum(u) && c != '-' && c != '_') return false;
  }
  return has_alpha;
}

std::optional<std::string> longest_caps_run(std::string_view description) {
  const auto words = text::split_words(description);
  std::size_t best_start = 0, best_len = 0;
  for (std::size_t i = 0; i < words.size();) {
    std::size_t j = i;
    while (j < words.size() && is_caps_token(words[j])) ++j;
    if (j - i > best_len) {
      best_len = j - i;
      best_start = i;
    }
    i = j == i ? i + 1 : j;
  }
  if (best_len < 2) return std::nullopt;
  std::vector<std::string> parts;
  for (std::size_t k = best_start; k < best_start + best_len; ++k) parts.emplace_back(words[k]);
  return text::join(parts, " ");
}

}  // namespace

FlowStep describe_step(int ordinal, std::string description) {
  FlowStep step;
  step.ordinal = ordinal;
  step.description = std::string(text::trim(description));

  static const std::regex sends(
      R"(^\s*(?:the\s+)?([A-Za-z0-9_-]+)\s+sends\s+(?:an?\s+|the\s+)?(.+?)\s+to\s+(?:the\s+)?([A-Za-z0-9_-]+))",
      std::regex::icase);
  std::smatch m;
  if (std::regex_search(step.description, m, sends)) {
    step.endpoints = Endpoints{m[1].str(), m[3].str()};
    auto message = clean_message(m[2].str());
    if (!message.name.empty()) {
      step.message_name = std::move(message.name);
      step.qualifier = std::move(message.qualifier);
    }
  }
  if (!step.message_name) step.message_name = longest_caps_run(step.description);
  return step;
}

std::string canonical_flow_text(const std::vector<FlowStep>& steps) {
  std::string out;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    if (i > 0) out += '\n';
    out += std::to_string(steps[i].ordinal) + ". " + steps[i].description;
  }
  return out;
}

std::string canonical_flow_text(const ProceduralFlow& flow) { return canonical_flow_text(flow.steps); }

json to_json(const FlowStep& step) {
  json j{{"ordinal", step.ordinal}, {"description", step.description}};
  if (step.message_name) j["message_name"] = *step.message_name;
  if (step.endpoints) j["endpoints"] = {{"sender", step.endpoints->sender}, {"receiver", step.endpoints->receiver}};
  if (step.qualifier) j["qualifier"] = *step.qualifier;
  if (step.protocol) j["protocol"] = *step.protocol;
  return j;
}

json to_json(const ProceduralFlow& flow) {
  json steps = json::array();
  for (const auto& s : flow.steps) steps.push_back(to_json(s));
  json provenance = json::array();
  for (const auto& p : flow.provenance) {
    provenance.push_back({{"doc_id", p.doc_id}, {"rank", p.rank}, {"chunk_id", p.chunk_id}});
  }
  json edits = json::array();
  for (const auto& e : flow.edits) {
    edits.push_back({{"ordinal", e.ordinal}, {"before", e.before}, {"after", e.after}, {"operator", e.operator_id}});
  }
  json j{{"schema", "oranval.flow/v1"},
         {"steps", std::move(steps)},
         {"provenance", std::move(provenance)},
         {"approval", to_string(flow.approval)},
         {"edits", std::move(edits)},
         {"notes", flow.notes}};
  j["approved_by"] = flow.approved_by ? json(*flow.approved_by) : json(nullptr);
  return j;
}

namespace {

const json& require(const json& j, const char* key, const std::string& path) {
  auto it = j.find(key);
  if (it == j.end()) throw SchemaError("missing field " + path + "." + key, path + "." + key);
  return *it;
}

std::string require_string(const json& j, const char* key, const std::string& path) {
  const json& v = require(j, key, path);
  if (!v.is_string()) throw SchemaError(path + "." + key + " must be a string", path + "." + key);
  return v.get<std::string>();
}

int require_int(const json& j, const char* key, const std::string& path) {
  const json& v = require(j, key, path);
  if (!v.is_number_integer()) throw SchemaError(path + "." + key + " must be an integer", path + "." + key);
  return v.get<int>();
}

std::optional<std::string> optional_string(const json& j, const char* key, const std::string& path) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) throw SchemaError(path + "." + key + " must be a string", path + "." + key);
  return it->get<std::string>();
}

}  // namespace

ProceduralFlow flow_from_json(const json& j) {
  if (!j.is_object()) throw SchemaError("flow document must be an object", "$");
  ProceduralFlow flow;
  const json& steps = require(j, "steps", "$");
  if (!steps.is_array()) throw SchemaError("$.steps must be an array", "$.steps");
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const std::string path = "$.steps[" + std::to_string(i) + "]";
    const json& s = steps[i];
    if (!s.is_object()) throw SchemaError(path + " must be an object", path);
    FlowStep step;
    step.ordinal = s.contains("ordinal") ? require_int(s, "ordinal", path) : static_cast<int>(i) + 1;
    step.description = require_string(s, "description", path);
    if (step.description.empty()) throw SchemaError(path + ".description is empty", path + ".description");
    if (step.ordinal != static_cast<int>(i) + 1) {
      throw SchemaError(path + ".ordinal must be " + std::to_string(i + 1), path + ".ordinal");
    }
    step.message_name = optional_string(s, "message_name", path);
    step.protocol = optional_string(s, "protocol", path);
    step.qualifier = optional_string(s, "qualifier", path);
    if (auto it = s.find("endpoints"); it != s.end() && !it->is_null()) {
      step.endpoints = Endpoints{require_string(*it, "sender", path + ".endpoints"),
                                 require_string(*it, "receiver", path + ".endpoints")};
    }
    if (!s.contains("message_name") && !s.contains("endpoints")) {
      auto derived = describe_step(step.ordinal, step.description);
      step.message_name = derived.message_name;
      step.endpoints = derived.endpoints;
      if (!step.qualifier) step.qualifier = derived.qualifier;
    }
    flow.steps.push_back(std::move(step));
  }
  if (auto it = j.find("provenance"); it != j.end()) {
    for (std::size_t i = 0; i < it->size(); ++i) {
      const std::string path = "$.provenance[" + std::to_string(i) + "]";
      const json& p = (*it)[i];
      flow.provenance.push_back(
          {require_string(p, "doc_id", path), require_int(p, "rank", path), optional_string(p, "chunk_id", path).value_or("")});
    }
  }
  if (auto a = optional_string(j, "approval", "$")) {
    auto state = parse_approval_state(*a);
    if (!state) throw SchemaError("unknown approval state '" + *a + "'", "$.approval");
    flow.approval = *state;
  }
  flow.approved_by = optional_string(j, "approved_by", "$");
  if (auto it = j.find("edits"); it != j.end()) {
    for (std::size_t i = 0; i < it->size(); ++i) {
      const std::string path = "$.edits[" + std::to_string(i) + "]";
      const json& e = (*it)[i];
      flow.edits.push_back({require_int(e, "ordinal", path), require_string(e, "before", path),
                            require_string(e, "after", path), require_string(e, "operator", path)});
    }
  }
  if (auto it = j.find("notes"); it != j.end() && it->is_array()) flow.notes = it->get<std::vector<std::string>>();
  return flow;
}

ApprovedFlow ApprovedFlow::from(ProceduralFlow flow) {
  if (flow.approval != ApprovalState::Approved) {
    throw Error(ErrorKind::State, std::string("validation requires an Approved flow, got ") +
                                      std::string(to_string(flow.approval)));
  }
  return ApprovedFlow(std::move(flow));
}

}  // namespace oranval
