#include "oranval/validation/debug_matrix.hpp"

#include "oranval/common/error.hpp"

namespace oranval {

DebugMatrix::DebugMatrix(int steps, int log_entries)
    : steps_(steps), entries_(log_entries),
      cells_(static_cast<std::size_t>(std::max(steps, 0)) * static_cast<std::size_t>(std::max(log_entries, 0))) {}

std::size_t DebugMatrix::slot(int step, int log_index) const {
  if (step < 1 || step > steps_ || log_index < 1 || log_index > entries_) {
    throw Error(ErrorKind::Precondition, "cell (" + std::to_string(step) + ", " + std::to_string(log_index) +
                                             ") outside " + std::to_string(steps_) + "x" + std::to_string(entries_));
  }
  return static_cast<std::size_t>(step - 1) * static_cast<std::size_t>(entries_) + static_cast<std::size_t>(log_index - 1);
}

void DebugMatrix::set(ClassificationResult result) {
  auto& cell = cells_[slot(result.step_ordinal, result.log_index)];
  if (cell) {
    throw Error(ErrorKind::Precondition, "cell (" + std::to_string(result.step_ordinal) + ", " +
                                             std::to_string(result.log_index) + ") already classified");
  }
  cell = std::move(result);
  ++classified_;
}

const std::optional<ClassificationResult>& DebugMatrix::at(int step, int log_index) const {
  return cells_[slot(step, log_index)];
}

std::vector<ClassificationResult> DebugMatrix::results() const {
  std::vector<ClassificationResult> out;
  out.reserve(classified_);
  for (const auto& c : cells_) {
    if (c) out.push_back(*c);
  }
  return out;
}

}  // namespace oranval
