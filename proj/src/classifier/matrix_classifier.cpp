#include "oranval/classifier/matrix_classifier.hpp"

#include "oranval/common/error.hpp"

namespace oranval {

MatrixClassifier::MatrixClassifier(std::vector<std::vector<bool>> labels, std::vector<std::vector<int>> confidences)
    : labels_(std::move(labels)), confidences_(std::move(confidences)) {}

ClassificationResult MatrixClassifier::classify(const FlowStep& step, const LogRecord& record) const {
  calls_.fetch_add(1);
  const auto s = static_cast<std::size_t>(step.ordinal - 1);
  const auto i = static_cast<std::size_t>(record.index - 1);
  if (step.ordinal < 1 || s >= labels_.size() || record.index < 1 || i >= labels_[s].size()) {
    throw Error(ErrorKind::Classification, "no label for cell (" + std::to_string(step.ordinal) + ", " +
                                               std::to_string(record.index) + ")");
  }
  const bool executed = labels_[s][i];
  int confidence = executed ? 100 : 0;
  if (s < confidences_.size() && i < confidences_[s].size()) confidence = confidences_[s][i];
  return {step.ordinal, record.index, executed ? Label::Executed : Label::NotExecuted, confidence,
          executed ? "replayed executed label" : "replayed not-executed label", "matrix"};
}

}  // namespace oranval
