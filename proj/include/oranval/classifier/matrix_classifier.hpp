#pragma once

#include <atomic>
#include <vector>

#include "oranval/classifier/classification.hpp"

namespace oranval {

// Replays a fixed label grid: labels[s-1][i-1] answers (step s, log index i).
// Counts invocations so callers can audit how many cells were consulted.
class MatrixClassifier final : public StepClassifier {
 public:
  explicit MatrixClassifier(std::vector<std::vector<bool>> labels, std::vector<std::vector<int>> confidences = {});

  ClassificationResult classify(const FlowStep& step, const LogRecord& record) const override;
  std::string id() const override { return "matrix"; }

  std::size_t calls() const { return calls_.load(); }
  void reset_calls() { calls_.store(0); }

 private:
  std::vector<std::vector<bool>> labels_;
  std::vector<std::vector<int>> confidences_;
  mutable std::atomic<std::size_t> calls_{0};
};

}  // namespace oranval
