#include "oranval/retrieval/approval.hpp"

#include <set>

#include "oranval/common/error.hpp"

namespace oranval {

using nlohmann::json;

namespace {

constexpr std::size_t kExcerptLimit = 1200;

void require_operator(const std::string& operator_id) {
  if (operator_id.empty()) throw Error(ErrorKind::State, "approval decisions require an operator id");
}

void require_pending(const ProceduralFlow& flow) {
  if (flow.approval != ApprovalState::PendingApproval) {
    throw Error(ErrorKind::State, std::string("flow is ") + std::string(to_string(flow.approval)) +
                                      ", expected PendingApproval");
  }
}

void apply_edits(ProceduralFlow& flow, const std::string& operator_id, const std::vector<StepEdit>& edits) {
  for (const auto& e : edits) {
    if (e.ordinal < 1 || e.ordinal > static_cast<int>(flow.steps.size())) {
      throw SchemaError("edit targets unknown step " + std::to_string(e.ordinal), "edits.ordinal");
    }
    if (e.description.empty()) throw SchemaError("edited step text is empty", "edits.description");
    auto& step = flow.steps[static_cast<std::size_t>(e.ordinal - 1)];
    if (step.description == e.description) continue;
    flow.edits.push_back({e.ordinal, step.description, e.description, operator_id});
    const auto protocol = step.protocol;
    step = describe_step(e.ordinal, e.description);
    step.protocol = protocol;
  }
}

}  // namespace

ApprovalTicket submit_for_approval(ProceduralFlow& flow, const std::vector<RankedChunk>& context, std::size_t top_k) {
  if (flow.approval != ApprovalState::Draft) {
    throw Error(ErrorKind::State, std::string("only Draft flows can be submitted, flow is ") +
                                      std::string(to_string(flow.approval)));
  }
  ApprovalTicket ticket;
  ticket.steps = flow.steps;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < context.size() && ticket.references.size() < top_k; ++i) {
    const auto& c = context[i].chunk;
    if (!seen.insert(c.doc_id).second) continue;
    ticket.references.push_back({static_cast<int>(i) + 1, c.doc_id, c.section, c.chunk_id,
                                 c.text.size() > kExcerptLimit ? c.text.substr(0, kExcerptLimit) : c.text});
  }
  flow.approval = ApprovalState::PendingApproval;
  return ticket;
}

void approve(ProceduralFlow& flow, const std::string& operator_id, const std::vector<StepEdit>& edits) {
  require_operator(operator_id);
  require_pending(flow);
  apply_edits(flow, operator_id, edits);
  flow.approval = ApprovalState::Approved;
  flow.approved_by = operator_id;
}

ProceduralFlow reject(ProceduralFlow& flow, const std::string& operator_id, const std::vector<StepEdit>& edits) {
  require_operator(operator_id);
  require_pending(flow);
  ProceduralFlow draft = flow;
  draft.approval = ApprovalState::Draft;
  draft.approved_by.reset();
  apply_edits(draft, operator_id, edits);
  flow.approval = ApprovalState::Rejected;
  return draft;
}

json to_json(const ApprovalTicket& ticket) {
  json steps = json::array();
  for (const auto& s : ticket.steps) steps.push_back(to_json(s));
  json refs = json::array();
  for (const auto& r : ticket.references) {
    refs.push_back({{"rank", r.rank},
                    {"doc_id", r.doc_id},
                    {"section", r.section ? json(*r.section) : json(nullptr)},
                    {"chunk_id", r.chunk_id},
                    {"excerpt", r.excerpt}});
  }
  return {{"steps", std::move(steps)}, {"references", std::move(refs)}};
}

ApprovalTicket ticket_from_json(const json& j) {
  ApprovalTicket t;
  json flow_shape{{"steps", j.at("steps")}};
  t.steps = flow_from_json(flow_shape).steps;
  for (const auto& r : j.at("references")) {
    DocReference ref;
    ref.rank = r.at("rank").get<int>();
    ref.doc_id = r.at("doc_id").get<std::string>();
    if (!r.at("section").is_null()) ref.section = r.at("section").get<std::string>();
    ref.chunk_id = r.at("chunk_id").get<std::string>();
    ref.excerpt = r.at("excerpt").get<std::string>();
    t.references.push_back(std::move(ref));
  }
  return t;
}

}  // namespace oranval
