#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

namespace oranval {

// Protocol identifier (lowercase, hyphenated) -> dissected field strings in
// dissector order.
using LayerMap = std::map<std::string, std::vector<std::string>>;

// One dissected packet. Indices are 1-based and contiguous within a sequence.
struct LogRecord {
  int index = 0;
  std::optional<std::int64_t> timestamp_us;
  LayerMap layers;
  std::int64_t source_frame = 0;

  bool has_protocol(const std::string& protocol) const { return layers.count(protocol) != 0; }

  friend bool operator==(const LogRecord&, const LogRecord&) = default;
};

struct LogSequence {
  std::vector<LogRecord> records;
  std::string origin;
  std::optional<std::set<std::string>> protocol_filter;

  std::size_t size() const { return records.size(); }
  bool empty() const { return records.empty(); }
  // 1-based access matching LogRecord::index.
  const LogRecord& at(int index) const { return records.at(static_cast<std::size_t>(index - 1)); }

  friend bool operator==(const LogSequence&, const LogSequence&) = default;
};

nlohmann::json record_to_json(const LogRecord& record);

// Canonical on-disk form: an array of {"index","frame","timestamp"?,"layers"}.
nlohmann::json to_canonical_json(const LogSequence& logs);
std::string serialize_canonical(const LogSequence& logs);

}  // namespace oranval
