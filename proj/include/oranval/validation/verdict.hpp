#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "oranval/orchestrator/test_case.hpp"

namespace oranval {

struct StepMatch {
  int step = 0;
  int log_index = 0;

  friend bool operator==(const StepMatch&, const StepMatch&) = default;
};

// Consecutive entries of the earliest-occurrence chronology whose log indices
// decrease: `later` is the step executed prematurely.
struct OrderViolation {
  StepMatch earlier;
  StepMatch later;

  friend bool operator==(const OrderViolation&, const OrderViolation&) = default;
};

struct Verdict {
  VerdictKind kind = VerdictKind::Fail;
  std::vector<StepMatch> matched_assignment;
  std::vector<int> missing_steps;
  std::vector<OrderViolation> out_of_order_pairs;
  std::string inference;

  friend bool operator==(const Verdict&, const Verdict&) = default;
};

nlohmann::json to_json(const Verdict& v);
Verdict verdict_from_json(const nlohmann::json& j);

}  // namespace oranval
