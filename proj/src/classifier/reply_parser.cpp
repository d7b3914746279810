#include "oranval/classifier/reply_parser.hpp"

#include <algorithm>
#include <cctype>
#include <optional>
#include <regex>

#include "oranval/common/error.hpp"
#include "oranval/common/text.hpp"

namespace oranval {

namespace {

// Strips markdown emphasis and surrounding punctuation.
std::string bare(std::string_view s) {
  std::string out(text::trim(s));
  std::erase(out, '*');
  std::string_view v = text::trim(out);
  while (!v.empty() && std::ispunct(static_cast<unsigned char>(v.back()))) v.remove_suffix(1);
  while (!v.empty() && std::ispunct(static_cast<unsigned char>(v.front()))) v.remove_prefix(1);
  return std::string(text::trim(v));
}

std::optional<Label> as_label(std::string_view value) {
  const auto words = text::split_words(value);
  if (words.empty()) return std::nullopt;
  const std::string first = text::to_lower(bare(words.front()));
  if (first == "yes") return Label::Executed;
  if (first == "no") return Label::NotExecuted;
  return std::nullopt;
}

// Value of a "Header: value" line, or the next non-empty line when the header
// line carries none. Advances i past a consumed continuation line.
std::string header_value(const std::vector<std::string>& lines, std::size_t& i, const std::string& inline_value) {
  if (!text::trim(inline_value).empty()) return std::string(text::trim(inline_value));
  for (std::size_t k = i + 1; k < lines.size(); ++k) {
    if (!text::trim(lines[k]).empty()) {
      i = k;
      return std::string(text::trim(lines[k]));
    }
  }
  return {};
}

}  // namespace

ParsedReply parse_classifier_reply(std::string_view raw) {
  if (text::trim(raw).empty()) throw ReplyError(ErrorKind::Parse, "empty classifier reply", std::string(raw));

  static const std::regex label_re(R"(^(?:label|answer)\s*:?\s*(.*)$)", std::regex::icase);
  static const std::regex conf_re(R"(^confidence(?:\s+score)?\s*:?\s*(.*)$)", std::regex::icase);
  static const std::regex expl_re(R"(^explanation\s*:?\s*(.*)$)", std::regex::icase);
  static const std::regex number_re(R"((\d+))");

  const auto lines = text::split_lines(raw);
  std::optional<Label> label;
  std::optional<int> confidence;
  std::optional<std::string> explanation;

  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string line = std::string(text::trim(lines[i]));
    std::erase(line, '*');
    line = std::string(text::trim(line));
    if (line.empty()) continue;
    std::smatch m;
    if (!explanation && std::regex_match(line, m, expl_re)) {
      std::string body = m[1].str();
      for (std::size_t k = i + 1; k < lines.size(); ++k) body += "\n" + lines[k];
      explanation = std::string(text::trim(body));
      break;
    }
    if (!confidence && std::regex_match(line, m, conf_re)) {
      const std::string value = header_value(lines, i, m[1].str());
      std::smatch n;
      if (std::regex_search(value, n, number_re)) confidence = std::clamp(std::stoi(n[1].str()), 0, 100);
      continue;
    }
    if (!label && std::regex_match(line, m, label_re)) {
      std::size_t j = i;
      const std::string value = header_value(lines, j, m[1].str());
      if (auto l = as_label(value)) {
        label = l;
        i = j;
      }
      continue;
    }
    if (!label) {
      const std::string b = text::to_lower(bare(line));
      if (b == "yes") label = Label::Executed;
      if (b == "no") label = Label::NotExecuted;
    }
  }

  if (!label) throw ReplyError(ErrorKind::Parse, "classifier reply has no Yes/No label", std::string(raw));
  return {*label, confidence.value_or(0), explanation.value_or("")};
}

}  // namespace oranval
