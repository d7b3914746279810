#pragma once

#include <string>
#include <string_view>

#include "oranval/classifier/classification.hpp"

namespace oranval {

struct ParsedReply {
  Label label = Label::NotExecuted;
  int confidence = 0;
  std::string explanation;
};

// Reads the "Label: / Confidence Score: / Explanation:" reply shape. Values
// may sit on the header line or the next non-empty line; "Answer:" is
// accepted for "Label:", and a bare "Yes"/"No" line counts as the label.
// Missing confidence reads as 0 and missing explanation as "". Throws
// ReplyError(Parse) when no yes/no label is found.
ParsedReply parse_classifier_reply(std::string_view raw);

}  // namespace oranval
