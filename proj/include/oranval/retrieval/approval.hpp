#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "oranval/retrieval/flow.hpp"
#include "oranval/retrieval/retriever.hpp"

namespace oranval {

struct DocReference {
  int rank = 0;
  std::string doc_id;
  std::optional<std::string> section;
  std::string chunk_id;
  std::string excerpt;

  friend bool operator==(const DocReference&, const DocReference&) = default;
};

// What the operator reviews: the generated steps beside the top documents.
struct ApprovalTicket {
  std::vector<FlowStep> steps;
  std::vector<DocReference> references;

  friend bool operator==(const ApprovalTicket&, const ApprovalTicket&) = default;
};

struct StepEdit {
  int ordinal = 0;
  std::string description;
};

// Moves a Draft flow to PendingApproval. References are the first top_k
// distinct documents of the context in rank order, each with its best chunk.
// Throws Error(State) if the flow is not a Draft.
ApprovalTicket submit_for_approval(ProceduralFlow& flow, const std::vector<RankedChunk>& context,
                                   std::size_t top_k = 5);

// PendingApproval -> Approved. Edits (if any) are applied first and logged.
// Throws Error(State) on other states or an empty operator id.
void approve(ProceduralFlow& flow, const std::string& operator_id, const std::vector<StepEdit>& edits = {});

// PendingApproval -> Rejected; returns a new Draft carrying the edits and the
// accumulated edit log.
ProceduralFlow reject(ProceduralFlow& flow, const std::string& operator_id, const std::vector<StepEdit>& edits = {});

nlohmann::json to_json(const ApprovalTicket& ticket);
ApprovalTicket ticket_from_json(const nlohmann::json& j);

}  // namespace oranval
