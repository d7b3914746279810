#include "oranval/validation/verdict.hpp"

#include "oranval/common/error.hpp"

namespace oranval {

using nlohmann::json;

namespace {
json match_json(const StepMatch& m) { return {{"step", m.step}, {"log_index", m.log_index}}; }
StepMatch match_from(const json& j) { return {j.at("step").get<int>(), j.at("log_index").get<int>()}; }
}  // namespace

json to_json(const Verdict& v) {
  json assignment = json::array();
  for (const auto& m : v.matched_assignment) assignment.push_back(match_json(m));
  json pairs = json::array();
  for (const auto& p : v.out_of_order_pairs) pairs.push_back({{"earlier", match_json(p.earlier)}, {"later", match_json(p.later)}});
  return {{"kind", to_string(v.kind)},
          {"matched_assignment", std::move(assignment)},
          {"missing_steps", v.missing_steps},
          {"out_of_order_pairs", std::move(pairs)},
          {"inference", v.inference}};
}

Verdict verdict_from_json(const json& j) {
  Verdict v;
  const auto kind = parse_verdict_kind(j.at("kind").get<std::string>());
  if (!kind) throw SchemaError("unknown verdict kind", "kind");
  v.kind = *kind;
  for (const auto& m : j.at("matched_assignment")) v.matched_assignment.push_back(match_from(m));
  v.missing_steps = j.at("missing_steps").get<std::vector<int>>();
  for (const auto& p : j.at("out_of_order_pairs")) v.out_of_order_pairs.push_back({match_from(p.at("earlier")), match_from(p.at("later"))});
  v.inference = j.at("inference").get<std::string>();
  return v;
}

}  // namespace oranval
