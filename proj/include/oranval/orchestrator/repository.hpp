#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "oranval/orchestrator/test_case.hpp"
#include "oranval/retrieval/flow.hpp"

namespace oranval {

// One YAML descriptor per test case:
//   id, title, category, components, interfaces, spec_refs, description,
//   ground_truth_flow (numbered text or list of step strings),
//   ground_truth_label (Pass | PartialPass | Fail)
// Throws LoadError naming the file and field.
TestCase parse_test_case(const std::string& yaml_text, const std::string& file = "<memory>");

// Every *.yaml / *.yml file directly under dir, sorted by id. Duplicate ids
// raise LoadError.
std::vector<TestCase> load_repository(const std::filesystem::path& dir);

// Ground-truth steps parsed from the descriptor, or empty.
std::vector<FlowStep> ground_truth_steps(const TestCase& tc);

nlohmann::json to_json(const TestCase& tc);

}  // namespace oranval
