#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "oranval/common/retry.hpp"
#include "oranval/retrieval/clients.hpp"
#include "oranval/retrieval/flow.hpp"
#include "oranval/retrieval/retriever.hpp"

namespace oranval {

struct GenerationOptions {
  // Placeholders: {context} {query}.
  std::string prompt_template =
      "You are an expert in 3GPP and O-RAN specifications. Using only the specification context below, "
      "answer the question with a numbered list of signaling steps. Each step must name the sending "
      "entity, the exact message name, and the receiving entity.\n\n"
      "Context:\n{context}\n\nQuestion: {query}\n\nAnswer:";
  RetryPolicy retry;
};

struct ParsedSteps {
  std::vector<FlowStep> steps;
  std::vector<std::string> notes;
};

// Extracts numbered steps ("1." / "1)" / "Step 1:"). Line-leading markers are
// preferred; when none exist, inline markers are used. Markers must increase;
// the kept steps are renumbered 1..M and a note is added if the source
// numbering was not already contiguous from 1.
ParsedSteps parse_numbered_steps(std::string_view reply);

std::string build_generation_prompt(const std::string& query, const std::vector<RankedChunk>& context,
                                    const GenerationOptions& options = {});

// Returns a Draft flow with provenance for every context chunk. Throws
// Error(Precondition) on empty context, Error(Backend) once retries are
// spent, and ReplyError(GenerationParse) when no steps can be parsed.
ProceduralFlow generate_flow(const std::string& query, const std::vector<RankedChunk>& context,
                             const GenerationClient& client, const GenerationOptions& options = {});

}  // namespace oranval
