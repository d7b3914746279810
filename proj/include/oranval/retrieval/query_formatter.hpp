#pragma once

#include <string>

#include "oranval/orchestrator/test_case.hpp"

namespace oranval {

// Placeholders: {title} {components} {interfaces_clause} {category}
// {spec_refs_clause}. The two clause placeholders expand to an empty string
// when the test case lists no interfaces / specification references.
struct QueryTemplate {
  std::string text =
      "Give the {title} procedure between {components}.{interfaces_clause} "
      "Test category: {category}.{spec_refs_clause}";
};

std::string format_query(const TestCase& test_case, const QueryTemplate& tmpl = {});

}  // namespace oranval
