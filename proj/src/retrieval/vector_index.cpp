#include "oranval/retrieval/vector_index.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <optional>

#include "oranval/common/error.hpp"
#include "oranval/common/parallel.hpp"

namespace oranval {

namespace {

constexpr char kMagic[4] = {'O', 'V', 'I', 'X'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::ostream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

void put_string(std::ostream& out, const std::string& s) {
  put<std::uint64_t>(out, s.size());
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

template <typename T>
T get(std::istream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw Error(ErrorKind::Integrity, "truncated index file");
  return value;
}

std::string get_string(std::istream& in) {
  const auto size = get<std::uint64_t>(in);
  if (size > (1ULL << 32)) throw Error(ErrorKind::Integrity, "corrupt string length in index file");
  std::string s(size, '\0');
  in.read(s.data(), static_cast<std::streamsize>(size));
  if (!in) throw Error(ErrorKind::Integrity, "truncated index file");
  return s;
}

}  // namespace

double euclidean_distance(const Embedding& a, const Embedding& b) {
  if (a.size() != b.size()) {
    throw Error(ErrorKind::Metric, "embedding dimension mismatch: " + std::to_string(a.size()) + " vs " +
                                       std::to_string(b.size()));
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
    sum += d * d;
  }
  return std::sqrt(sum);
}

void VectorIndex::add(SpecChunk chunk, Embedding embedding) {
  if (embedding.empty()) throw Error(ErrorKind::IndexBuild, "empty embedding for chunk " + chunk.chunk_id);
  if (dimension_ == 0) dimension_ = embedding.size();
  if (embedding.size() != dimension_) {
    throw Error(ErrorKind::IndexBuild, "chunk " + chunk.chunk_id + " has embedding dimension " +
                                           std::to_string(embedding.size()) + ", index dimension is " +
                                           std::to_string(dimension_));
  }
  if (by_id_.count(chunk.chunk_id) != 0) {
    throw Error(ErrorKind::IndexBuild, "duplicate chunk id " + chunk.chunk_id);
  }
  by_id_.emplace(chunk.chunk_id, entries_.size());
  entries_.push_back({std::move(chunk), std::move(embedding)});
}

void VectorIndex::save(const std::filesystem::path& path) const {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Config, "cannot write index " + tmp.string());
    out.write(kMagic, sizeof(kMagic));
    put<std::uint32_t>(out, kVersion);
    put<std::uint64_t>(out, dimension_);
    put<std::uint64_t>(out, entries_.size());
    for (const auto& e : entries_) {
      put_string(out, e.chunk.chunk_id);
      put_string(out, e.chunk.doc_id);
      put<std::uint8_t>(out, e.chunk.section ? 1 : 0);
      if (e.chunk.section) put_string(out, *e.chunk.section);
      put_string(out, e.chunk.text);
      put<std::int64_t>(out, e.chunk.word_count);
      out.write(reinterpret_cast<const char*>(e.embedding.data()),
                static_cast<std::streamsize>(e.embedding.size() * sizeof(float)));
    }
    if (!out) throw Error(ErrorKind::Config, "short write to index " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

VectorIndex VectorIndex::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::NotFound, "cannot open index " + path.string());
  char magic[4];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw Error(ErrorKind::Integrity, path.string() + " is not an index file");
  }
  if (get<std::uint32_t>(in) != kVersion) throw Error(ErrorKind::Integrity, "unsupported index version");
  const auto dimension = get<std::uint64_t>(in);
  const auto count = get<std::uint64_t>(in);
  VectorIndex index(dimension);
  for (std::uint64_t i = 0; i < count; ++i) {
    SpecChunk chunk;
    chunk.chunk_id = get_string(in);
    chunk.doc_id = get_string(in);
    if (get<std::uint8_t>(in) != 0) chunk.section = get_string(in);
    chunk.text = get_string(in);
    chunk.word_count = static_cast<int>(get<std::int64_t>(in));
    Embedding embedding(dimension);
    in.read(reinterpret_cast<char*>(embedding.data()), static_cast<std::streamsize>(dimension * sizeof(float)));
    if (!in) throw Error(ErrorKind::Integrity, "truncated index file");
    index.add(std::move(chunk), std::move(embedding));
  }
  return index;
}

VectorIndex build_index(const std::vector<SpecChunk>& chunks, const EmbeddingClient& client,
                        const IndexBuildOptions& options) {
  std::vector<Embedding> embeddings(chunks.size());
  bounded_parallel_for(chunks.size(), options.parallelism, [&](std::size_t i) {
    try {
      embeddings[i] = with_retries(options.retry, [&] { return client.embed(chunks[i].text); });
    } catch (const std::exception& e) {
      throw Error(ErrorKind::IndexBuild, "embedding failed for chunk " + chunks[i].chunk_id + ": " + e.what());
    }
  });
  VectorIndex index;
  for (std::size_t i = 0; i < chunks.size(); ++i) index.add(chunks[i], std::move(embeddings[i]));
  return index;
}

}  // namespace oranval
