#include "oranval/validation/matrix_export.hpp"

#include "oranval/common/error.hpp"

namespace oranval {

using nlohmann::json;

json matrix_to_json(const DebugMatrix& matrix) {
  json grid = json::array();
  json explanations = json::array();
  for (int s = 1; s <= matrix.steps(); ++s) {
    json row = json::array();
    for (int i = 1; i <= matrix.log_entries(); ++i) {
      const auto& cell = matrix.at(s, i);
      if (!cell) {
        row.push_back(nullptr);
        continue;
      }
      row.push_back({{"label", to_string(cell->label)},
                     {"confidence", cell->confidence},
                     {"explanation_ref", explanations.size()},
                     {"backend", cell->backend}});
      explanations.push_back(cell->explanation);
    }
    grid.push_back(std::move(row));
  }
  return {{"schema", "oranval.matrix/v1"},
          {"steps", matrix.steps()},
          {"log_entries", matrix.log_entries()},
          {"grid", std::move(grid)},
          {"explanations", std::move(explanations)}};
}

DebugMatrix matrix_from_json(const json& j) {
  if (j.value("schema", "") != "oranval.matrix/v1") throw SchemaError("not an oranval.matrix/v1 document", "schema");
  DebugMatrix matrix(j.at("steps").get<int>(), j.at("log_entries").get<int>());
  const auto& grid = j.at("grid");
  const auto& explanations = j.at("explanations");
  for (int s = 1; s <= matrix.steps(); ++s) {
    const auto& row = grid.at(static_cast<std::size_t>(s - 1));
    for (int i = 1; i <= matrix.log_entries(); ++i) {
      const auto& cell = row.at(static_cast<std::size_t>(i - 1));
      if (cell.is_null()) continue;
      ClassificationResult r;
      r.step_ordinal = s;
      r.log_index = i;
      r.label = cell.at("label").get<std::string>() == "Executed" ? Label::Executed : Label::NotExecuted;
      r.confidence = cell.at("confidence").get<int>();
      r.explanation = explanations.at(cell.at("explanation_ref").get<std::size_t>()).get<std::string>();
      r.backend = cell.value("backend", "");
      matrix.set(std::move(r));
    }
  }
  return matrix;
}

std::string matrix_to_csv(const DebugMatrix& matrix) {
  std::string out = "step,log_index,label,confidence,explanation_ref\n";
  std::size_t ref = 0;
  for (int s = 1; s <= matrix.steps(); ++s) {
    for (int i = 1; i <= matrix.log_entries(); ++i) {
      const auto& cell = matrix.at(s, i);
      out += std::to_string(s) + "," + std::to_string(i) + ",";
      if (cell) {
        out += std::string(to_string(cell->label)) + "," + std::to_string(cell->confidence) + "," + std::to_string(ref++);
      } else {
        out += "Unclassified,,";
      }
      out += "\n";
    }
  }
  return out;
}

}  // namespace oranval
