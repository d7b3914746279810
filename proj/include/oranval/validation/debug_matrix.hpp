#pragma once

#include <optional>
#include <vector>

#include "oranval/classifier/classification.hpp"

namespace oranval {

// Step x log-index grid of classification results. Cells start unclassified.
class DebugMatrix {
 public:
  DebugMatrix() = default;
  DebugMatrix(int steps, int log_entries);

  int steps() const { return steps_; }
  int log_entries() const { return entries_; }

  // Throws Error(Precondition) for out-of-range or already-filled cells.
  void set(ClassificationResult result);
  const std::optional<ClassificationResult>& at(int step, int log_index) const;

  bool complete() const { return classified_ == cells_.size(); }
  std::size_t classified() const { return classified_; }

  // Row-major list of filled cells.
  std::vector<ClassificationResult> results() const;

  friend bool operator==(const DebugMatrix&, const DebugMatrix&) = default;

 private:
  std::size_t slot(int step, int log_index) const;

  int steps_ = 0;
  int entries_ = 0;
  std::vector<std::optional<ClassificationResult>> cells_;
  std::size_t classified_ = 0;
};

}  // namespace oranval
