#include "oranval/retrieval/query_formatter.hpp"

#include "oranval/common/error.hpp"
#include "oranval/common/text.hpp"

namespace oranval {

std::string format_query(const TestCase& tc, const QueryTemplate& tmpl) {
  if (tc.title.empty()) throw Error(ErrorKind::Precondition, "test case " + tc.id + " has no title");
  if (tc.components.empty()) throw Error(ErrorKind::Precondition, "test case " + tc.id + " lists no components");

  std::string interfaces_clause;
  if (!tc.interfaces.empty()) {
    interfaces_clause = " The procedure runs over the " + text::join_natural(tc.interfaces) +
                        (tc.interfaces.size() == 1 ? " interface." : " interfaces.");
  }
  std::string spec_refs_clause;
  if (!tc.spec_refs.empty()) {
    spec_refs_clause = " Referenced specifications: " + text::join(tc.spec_refs, ", ") + ".";
  }
  return text::substitute(tmpl.text, {{"title", tc.title},
                                      {"components", text::join_natural(tc.components)},
                                      {"interfaces_clause", interfaces_clause},
                                      {"category", std::string(to_string(tc.category))},
                                      {"spec_refs_clause", spec_refs_clause}});
}

}  // namespace oranval
