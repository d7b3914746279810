#include "oranval/retrieval/chunker.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <stdexcept>

#include "oranval/common/file_io.hpp"
#include "oranval/common/text.hpp"

namespace oranval {

namespace {

struct WordSpan {
  std::size_t begin;
  std::size_t end;
  bool paragraph_before;
};

struct Heading {
  std::size_t offset;
  std::string title;
};

std::vector<WordSpan> scan_words(std::string_view text) {
  std::vector<WordSpan> words;
  std::size_t i = 0;
  int newlines = 0;
  while (i < text.size()) {
    const auto c = static_cast<unsigned char>(text[i]);
    if (std::isspace(c)) {
      if (c == '\n') ++newlines;
      ++i;
      continue;
    }
    const std::size_t begin = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    words.push_back({begin, i, !words.empty() && newlines >= 2});
    newlines = 0;
  }
  return words;
}

std::vector<Heading> scan_headings(std::string_view text) {
  std::vector<Heading> headings;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t nl = text.find('\n', start);
    if (nl == std::string_view::npos) nl = text.size();
    const std::string_view line = text::trim(text.substr(start, nl - start));
    if (!line.empty() && line.front() == '#') {
      std::string_view title = line;
      while (!title.empty() && title.front() == '#') title.remove_prefix(1);
      title = text::trim(title);
      if (!title.empty()) headings.push_back({start, std::string(title)});
    }
    start = nl + 1;
  }
  return headings;
}

std::string make_chunk_id(const std::string& doc_id, std::size_t seq) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04zu", seq);
  return doc_id + "#" + buf;
}

}  // namespace

std::vector<SpecChunk> chunk_document(const std::string& doc_id, std::string_view text,
                                      const ChunkingOptions& options) {
  if (options.overlap_words < 0 || options.chunk_words <= options.overlap_words) {
    throw std::invalid_argument("chunking requires chunk_words > overlap_words >= 0");
  }
  const auto words = scan_words(text);
  const auto headings = scan_headings(text);
  const std::size_t n = words.size();
  const auto target = static_cast<std::size_t>(options.chunk_words);
  const auto overlap = static_cast<std::size_t>(options.overlap_words);
  const std::size_t slack = target / 10;

  std::vector<SpecChunk> chunks;
  std::size_t start = 0;
  while (start < n) {
    std::size_t end = start + target;
    if (end >= n) {
      end = n;
    } else {
      // Nearest paragraph break within the slack window; earlier wins ties.
      std::size_t best = end;
      std::size_t best_gap = slack + 1;
      const std::size_t lo = std::max(start + overlap + 1, end - std::min(end, slack));
      const std::size_t hi = std::min(n - 1, end + slack);
      for (std::size_t b = lo; b <= hi; ++b) {
        if (!words[b].paragraph_before) continue;
        const std::size_t gap = b > end ? b - end : end - b;
        if (gap < best_gap) {
          best = b;
          best_gap = gap;
        }
      }
      end = best;
    }

    SpecChunk chunk;
    chunk.chunk_id = make_chunk_id(doc_id, chunks.size());
    chunk.doc_id = doc_id;
    chunk.text = std::string(text.substr(words[start].begin, words[end - 1].end - words[start].begin));
    chunk.word_count = static_cast<int>(end - start);
    const std::size_t offset = words[start].begin;
    for (const auto& h : headings) {
      if (h.offset > offset) break;
      chunk.section = h.title;
    }
    chunks.push_back(std::move(chunk));

    if (end == n) break;
    start = end - overlap;
  }
  return chunks;
}

std::vector<SpecChunk> chunk_corpus(const std::filesystem::path& corpus_dir, const ChunkingOptions& options) {
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::recursive_directory_iterator(corpus_dir)) {
    if (!entry.is_regular_file()) continue;
    const auto ext = entry.path().extension();
    if (ext == ".txt" || ext == ".md") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<SpecChunk> all;
  for (const auto& f : files) {
    auto chunks = chunk_document(f.filename().string(), io::read_file(f), options);
    all.insert(all.end(), std::make_move_iterator(chunks.begin()), std::make_move_iterator(chunks.end()));
  }
  return all;
}

}  // namespace oranval
