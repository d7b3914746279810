#include "oranval/orchestrator/repository.hpp"

#include <algorithm>
#include <map>
#include <set>

#include <yaml-cpp/yaml.h>

#include "oranval/common/error.hpp"
#include "oranval/common/file_io.hpp"
#include "oranval/common/text.hpp"
#include "oranval/retrieval/flow_generator.hpp"

namespace oranval {

namespace {

std::string scalar(const YAML::Node& root, const char* key, const std::string& file, bool required) {
  const auto node = root[key];
  if (!node) {
    if (required) throw LoadError(file + ": missing field " + key, file, key);
    return {};
  }
  if (!node.IsScalar()) throw LoadError(file + ": field " + std::string(key) + " must be a string", file, key);
  return node.as<std::string>();
}

std::vector<std::string> string_list(const YAML::Node& root, const char* key, const std::string& file) {
  const auto node = root[key];
  if (!node) return {};
  if (node.IsScalar()) return {node.as<std::string>()};
  if (!node.IsSequence()) throw LoadError(file + ": field " + std::string(key) + " must be a list", file, key);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < node.size(); ++i) {
    if (!node[i].IsScalar()) {
      throw LoadError(file + ": field " + std::string(key) + "[" + std::to_string(i) + "] must be a string", file,
                      std::string(key) + "[" + std::to_string(i) + "]");
    }
    out.push_back(node[i].as<std::string>());
  }
  return out;
}

}  // namespace

TestCase parse_test_case(const std::string& yaml_text, const std::string& file) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    throw LoadError(file + ": not valid YAML: " + e.what(), file, "");
  }
  if (!root.IsMap()) throw LoadError(file + ": descriptor must be a mapping", file, "");

  static const std::set<std::string> known{"id", "title", "category", "components", "interfaces", "spec_refs",
                                           "description", "ground_truth_flow", "ground_truth_label"};
  for (const auto& kv : root) {
    const auto key = kv.first.as<std::string>();
    if (!known.count(key)) throw LoadError(file + ": unknown field " + key, file, key);
  }

  TestCase tc;
  tc.id = std::string(text::trim(scalar(root, "id", file, true)));
  if (tc.id.empty()) throw LoadError(file + ": field id is empty", file, "id");
  tc.title = std::string(text::trim(scalar(root, "title", file, true)));
  if (tc.title.empty()) throw LoadError(file + ": field title is empty", file, "title");
  const auto category = scalar(root, "category", file, true);
  const auto parsed_category = parse_category(category);
  if (!parsed_category) throw LoadError(file + ": unknown category " + category, file, "category");
  tc.category = *parsed_category;
  tc.components = string_list(root, "components", file);
  tc.interfaces = string_list(root, "interfaces", file);
  tc.spec_refs = string_list(root, "spec_refs", file);
  tc.description = scalar(root, "description", file, false);

  if (const auto flow = root["ground_truth_flow"]) {
    if (flow.IsSequence()) {
      std::vector<std::string> steps = string_list(root, "ground_truth_flow", file);
      std::string text;
      for (std::size_t i = 0; i < steps.size(); ++i) {
        if (i) text += "\n";
        text += std::to_string(i + 1) + ". " + steps[i];
      }
      tc.ground_truth_flow = text;
    } else if (flow.IsScalar()) {
      tc.ground_truth_flow = flow.as<std::string>();
    } else {
      throw LoadError(file + ": field ground_truth_flow must be text or a list", file, "ground_truth_flow");
    }
    if (parse_numbered_steps(*tc.ground_truth_flow).steps.empty()) {
      throw LoadError(file + ": field ground_truth_flow has no numbered steps", file, "ground_truth_flow");
    }
  }
  if (root["ground_truth_label"]) {
    const auto label = scalar(root, "ground_truth_label", file, false);
    tc.ground_truth_label = parse_verdict_kind(label);
    if (!tc.ground_truth_label) throw LoadError(file + ": unknown verdict " + label, file, "ground_truth_label");
  }
  return tc;
}

std::vector<TestCase> load_repository(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw LoadError("test-case repository is not a directory: " + dir.string(), dir.string(), "");
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    const auto ext = entry.path().extension();
    if (entry.is_regular_file() && (ext == ".yaml" || ext == ".yml")) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());

  std::vector<TestCase> cases;
  std::map<std::string, std::string> seen;
  for (const auto& f : files) {
    auto tc = parse_test_case(io::read_file(f), f.filename().string());
    if (auto it = seen.find(tc.id); it != seen.end()) {
      throw LoadError("duplicate test case id " + tc.id + " in " + it->second + " and " + f.filename().string(),
                      f.filename().string(), "id");
    }
    seen.emplace(tc.id, f.filename().string());
    cases.push_back(std::move(tc));
  }
  std::sort(cases.begin(), cases.end(), [](const TestCase& a, const TestCase& b) { return a.id < b.id; });
  return cases;
}

std::vector<FlowStep> ground_truth_steps(const TestCase& tc) {
  if (!tc.ground_truth_flow) return {};
  return parse_numbered_steps(*tc.ground_truth_flow).steps;
}

nlohmann::json to_json(const TestCase& tc) {
  nlohmann::json j{{"id", tc.id},
                   {"title", tc.title},
                   {"category", to_string(tc.category)},
                   {"components", tc.components},
                   {"interfaces", tc.interfaces},
                   {"spec_refs", tc.spec_refs},
                   {"description", tc.description},
                   {"has_ground_truth", tc.ground_truth_flow.has_value()}};
  if (tc.ground_truth_label) j["ground_truth_label"] = to_string(*tc.ground_truth_label);
  else j["ground_truth_label"] = nullptr;
  return j;
}

}  // namespace oranval
