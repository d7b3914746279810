#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace oranval {

enum class ApprovalState { Draft, PendingApproval, Approved, Rejected };

std::string_view to_string(ApprovalState s);
std::optional<ApprovalState> parse_approval_state(std::string_view s);

struct Endpoints {
  std::string sender;
  std::string receiver;

  friend bool operator==(const Endpoints&, const Endpoints&) = default;
};

struct FlowStep {
  int ordinal = 0;
  std::string description;
  std::optional<std::string> message_name;
  std::optional<Endpoints> endpoints;
  // Payload named in parentheses after the message, e.g. "Registration
  // Complete" in "UL NAS TRANSPORT (Registration Complete)".
  std::optional<std::string> qualifier;
  // Optional protocol hint ("f1ap", "ngap", ...) used by rule-based matching.
  std::optional<std::string> protocol;

  friend bool operator==(const FlowStep&, const FlowStep&) = default;
};

struct Provenance {
  std::string doc_id;
  int rank = 0;
  std::string chunk_id;

  friend bool operator==(const Provenance&, const Provenance&) = default;
};

struct FlowEdit {
  int ordinal = 0;
  std::string before;
  std::string after;
  std::string operator_id;

  friend bool operator==(const FlowEdit&, const FlowEdit&) = default;
};

struct ProceduralFlow {
  std::vector<FlowStep> steps;
  std::vector<Provenance> provenance;
  ApprovalState approval = ApprovalState::Draft;
  std::optional<std::string> approved_by;
  std::vector<FlowEdit> edits;
  std::vector<std::string> notes;

  std::size_t size() const { return steps.size(); }

  friend bool operator==(const ProceduralFlow&, const ProceduralFlow&) = default;
};

// Builds a step from free text, deriving message name and endpoints from
// "<sender> sends [a|the] <MESSAGE> [(qualifier)] to [the] <receiver>" or,
// failing that, the longest run of two or more upper-case tokens.
FlowStep describe_step(int ordinal, std::string description);

// "1. <description>\n2. <description>" with no trailing newline.
std::string canonical_flow_text(const ProceduralFlow& flow);
std::string canonical_flow_text(const std::vector<FlowStep>& steps);

nlohmann::json to_json(const FlowStep& step);
nlohmann::json to_json(const ProceduralFlow& flow);
// Throws SchemaError naming the offending field path.
ProceduralFlow flow_from_json(const nlohmann::json& j);

// A flow whose approval state was Approved at construction. Validation entry
// points accept only this type.
class ApprovedFlow {
 public:
  // Throws Error(State) unless flow.approval == Approved.
  static ApprovedFlow from(ProceduralFlow flow);

  const ProceduralFlow& flow() const { return flow_; }
  const std::vector<FlowStep>& steps() const { return flow_.steps; }
  int step_count() const { return static_cast<int>(flow_.steps.size()); }

 private:
  explicit ApprovedFlow(ProceduralFlow flow) : flow_(std::move(flow)) {}
  ProceduralFlow flow_;
};

}  // namespace oranval
