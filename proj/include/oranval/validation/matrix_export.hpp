#pragma once

#include <string>

#include <json.hpp>

#include "oranval/validation/debug_matrix.hpp"

namespace oranval {

// JSON schema "oranval.matrix/v1":
//   {"schema", "steps": M, "log_entries": N,
//    "grid": [[cell, ...N] ...M],          // row = step, column = log index
//    "explanations": [string, ...]}
// where cell is null for an unclassified cell or
//   {"label": "Executed"|"NotExecuted", "confidence": int, "explanation_ref": k, "backend": id}
// and explanation_ref indexes "explanations".
nlohmann::json matrix_to_json(const DebugMatrix& matrix);
DebugMatrix matrix_from_json(const nlohmann::json& j);

// Row-major long form, one line per cell:
//   step,log_index,label,confidence,explanation_ref
// Unclassified cells carry label "Unclassified" and empty confidence/ref.
std::string matrix_to_csv(const DebugMatrix& matrix);

}  // namespace oranval
