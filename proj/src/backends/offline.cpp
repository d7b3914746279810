#include "oranval/backends/offline.hpp"

#include <cctype>
#include <cmath>
#include <regex>
#include <set>
#include <stdexcept>

#include "oranval/common/text.hpp"

namespace oranval {

std::vector<std::string> lexical_tokens(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    if (cur.size() >= 2) out.push_back(cur);
    cur.clear();
  };
  for (char c : text) {
    if (std::isalnum(static_cast<unsigned char>(c))) cur += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    else flush();
  }
  flush();
  return out;
}

HashingEmbedding::HashingEmbedding(std::size_t dimension) : dimension_(dimension) {
  if (dimension == 0) throw std::invalid_argument("embedding dimension must be positive");
}

Embedding HashingEmbedding::embed(std::string_view text) const {
  Embedding v(dimension_, 0.0f);
  for (const auto& tok : lexical_tokens(text)) {
    const std::uint64_t h = text::fnv1a64(tok);
    v[h % dimension_] += (h >> 63) ? -1.0f : 1.0f;
  }
  double norm = 0.0;
  for (float x : v) norm += static_cast<double>(x) * x;
  if (norm > 0.0) {
    const double inv = 1.0 / std::sqrt(norm);
    for (float& x : v) x = static_cast<float>(x * inv);
  }
  return v;
}

double LexicalReranker::score(std::string_view query, std::string_view passage) const {
  const auto q = lexical_tokens(query);
  const auto p = lexical_tokens(passage);
  const std::set<std::string> qs(q.begin(), q.end());
  const std::set<std::string> ps(p.begin(), p.end());
  if (qs.empty()) return 0.0;
  std::size_t hit = 0;
  for (const auto& t : qs) hit += ps.count(t);
  const double coverage = static_cast<double>(hit) / static_cast<double>(qs.size());
  return coverage - 0.1 * std::log1p(static_cast<double>(p.size()) / 100.0);
}

std::string ExtractiveGenerator::generate(std::string_view prompt_view) const {
  const std::string prompt(prompt_view);
  std::string question;
  std::string body = prompt;
  if (const auto q = prompt.rfind("\nQuestion:"); q != std::string::npos) {
    body = prompt.substr(0, q);
    question = prompt.substr(q + 10);
    if (const auto a = question.find("\nAnswer:"); a != std::string::npos) question.erase(a);
  }
  const auto qt = lexical_tokens(question);
  const std::set<std::string> qs(qt.begin(), qt.end());

  static const std::regex block_start(R"((^|\n)\[\d+\] )");
  static const std::regex numbered(R"(^\s*\d{1,3}[.)]\s+\S)");
  std::vector<std::size_t> starts;
  for (auto it = std::sregex_iterator(body.begin(), body.end(), block_start); it != std::sregex_iterator(); ++it) {
    starts.push_back(static_cast<std::size_t>(it->position(0) + it->length(1)));
  }

  std::string best;
  double best_overlap = -1.0;
  for (std::size_t b = 0; b < starts.size(); ++b) {
    const std::size_t end = b + 1 < starts.size() ? starts[b + 1] : body.size();
    const std::string block = body.substr(starts[b], end - starts[b]);
    std::vector<std::string> items;
    for (const auto& line : text::split_lines(block)) {
      if (std::regex_search(line, numbered)) items.emplace_back(text::trim(line));
    }
    if (items.size() < 2) continue;
    const auto bt = lexical_tokens(block);
    const std::set<std::string> bs(bt.begin(), bt.end());
    std::size_t hit = 0;
    for (const auto& t : qs) hit += bs.count(t);
    const double overlap = qs.empty() ? 0.0 : static_cast<double>(hit) / static_cast<double>(qs.size());
    if (overlap > best_overlap) {
      best_overlap = overlap;
      best = text::join(items, "\n");
    }
  }
  return best.empty() ? "No procedure found in the supplied context." : best;
}

}  // namespace oranval
