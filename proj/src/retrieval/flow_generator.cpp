#include "oranval/retrieval/flow_generator.hpp"

#include <algorithm>
#include <regex>

#include "oranval/common/error.hpp"
#include "oranval/common/text.hpp"

namespace oranval {

namespace {

struct Marker {
  std::size_t begin;  // start of the marker text
  std::size_t body;   // first byte after the marker
  int number;
  bool line_start;
};

std::vector<Marker> find_markers(const std::string& reply) {
  static const std::regex marker(R"((^|\s)(?:\*\*)?(?:[Ss]tep\s+)?(\d{1,3})(?:[.):]|\s*:)(?:\*\*)?[ \t]+)");
  std::vector<Marker> out;
  for (auto it = std::sregex_iterator(reply.begin(), reply.end(), marker); it != std::sregex_iterator(); ++it) {
    const auto& m = *it;
    const auto lead = static_cast<std::size_t>(m.position(0));
    const std::size_t begin = lead + static_cast<std::size_t>(m.length(1));
    // Line start: only blanks between the previous newline (or start) and the marker.
    std::size_t k = begin;
    while (k > 0 && (reply[k - 1] == ' ' || reply[k - 1] == '\t')) --k;
    const bool line_start = k == 0 || reply[k - 1] == '\n';
    out.push_back({begin, lead + static_cast<std::size_t>(m.length(0)), std::stoi(m[2].str()), line_start});
  }
  return out;
}

}  // namespace

ParsedSteps parse_numbered_steps(std::string_view reply_view) {
  const std::string reply(reply_view);
  auto markers = find_markers(reply);
  // A reply laid out one step per line is parsed by line; a single-paragraph
  // reply falls back to inline markers.
  const bool any_line_start =
      std::count_if(markers.begin(), markers.end(), [](const Marker& m) { return m.line_start; }) >= 2;
  if (any_line_start) std::erase_if(markers, [](const Marker& m) { return !m.line_start; });

  std::vector<Marker> kept;
  for (const auto& m : markers) {
    if (m.number < 1) continue;
    if (kept.empty() || m.number > kept.back().number) kept.push_back(m);
  }

  ParsedSteps parsed;
  std::vector<int> source_numbers;
  for (std::size_t k = 0; k < kept.size(); ++k) {
    const std::size_t end = k + 1 < kept.size() ? kept[k + 1].begin : reply.size();
    std::string body = reply.substr(kept[k].body, end - kept[k].body);
    if (any_line_start) {
      // A blank line ends the step.
      if (const auto gap = body.find("\n\n"); gap != std::string::npos) body.erase(gap);
    }
    std::string cleaned;
    for (auto w : text::split_words(body)) {
      if (!cleaned.empty()) cleaned += ' ';
      cleaned += w;
    }
    if (cleaned.empty()) continue;
    source_numbers.push_back(kept[k].number);
    parsed.steps.push_back(describe_step(static_cast<int>(parsed.steps.size()) + 1, std::move(cleaned)));
  }

  bool contiguous = true;
  for (std::size_t i = 0; i < source_numbers.size(); ++i) {
    if (source_numbers[i] != static_cast<int>(i) + 1) contiguous = false;
  }
  if (!contiguous) {
    std::vector<std::string> nums;
    for (int n : source_numbers) nums.push_back(std::to_string(n));
    parsed.notes.push_back("step numbering " + text::join(nums, ",") + " normalized to 1.." +
                           std::to_string(source_numbers.size()));
  }
  return parsed;
}

std::string build_generation_prompt(const std::string& query, const std::vector<RankedChunk>& context,
                                    const GenerationOptions& options) {
  std::string ctx;
  for (std::size_t i = 0; i < context.size(); ++i) {
    const auto& c = context[i].chunk;
    ctx += "[" + std::to_string(i + 1) + "] " + c.doc_id;
    if (c.section) ctx += " (" + *c.section + ")";
    ctx += "\n" + c.text + "\n\n";
  }
  return text::substitute(options.prompt_template, {{"context", ctx}, {"query", query}});
}

ProceduralFlow generate_flow(const std::string& query, const std::vector<RankedChunk>& context,
                             const GenerationClient& client, const GenerationOptions& options) {
  if (context.empty()) throw Error(ErrorKind::Precondition, "flow generation requires non-empty context");

  const std::string prompt = build_generation_prompt(query, context, options);
  std::string reply;
  try {
    reply = with_retries(options.retry, [&] { return client.generate(prompt); });
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw Error(ErrorKind::Backend, std::string("generation backend failed: ") + e.what());
  }

  ParsedSteps parsed = parse_numbered_steps(reply);
  if (parsed.steps.empty()) {
    throw ReplyError(ErrorKind::GenerationParse, "generation reply contains no numbered steps", reply);
  }
  ProceduralFlow flow;
  flow.steps = std::move(parsed.steps);
  flow.notes = std::move(parsed.notes);
  for (std::size_t i = 0; i < context.size(); ++i) {
    flow.provenance.push_back({context[i].chunk.doc_id, static_cast<int>(i) + 1, context[i].chunk.chunk_id});
  }
  return flow;
}

}  // namespace oranval
