#include "oranval/log_ingest/log_parser.hpp"

#include <cctype>
#include <utility>

#include "oranval/common/error.hpp"
#include "oranval/common/text.hpp"

namespace oranval {

namespace {

using nlohmann::json;

bool is_reserved_key(const std::string& key) {
  return key == "layers" || key == "timestamp" || key == "frame" || key == "index";
}

std::size_t offset_of(const json::parse_error& e) { return e.byte > 0 ? e.byte - 1 : 0; }

void add_layer(LayerMap& layers, const std::string& raw_key, const json& value) {
  if (!value.is_array()) {
    throw SchemaError("protocol '" + raw_key + "' must map to an array of strings", raw_key);
  }
  std::vector<std::string> fields;
  fields.reserve(value.size());
  for (const auto& item : value) {
    if (!item.is_string()) {
      throw SchemaError("protocol '" + raw_key + "' contains a non-string field", raw_key);
    }
    fields.emplace_back(text::trim_right(item.get_ref<const std::string&>()));
  }
  auto& dest = layers[normalize_protocol_key(raw_key)];
  dest.insert(dest.end(), std::make_move_iterator(fields.begin()), std::make_move_iterator(fields.end()));
}

LogRecord packet_to_record(const json& packet, std::size_t position) {
  if (!packet.is_object()) {
    throw SchemaError("packet " + std::to_string(position) + " is not an object",
                      "[" + std::to_string(position - 1) + "]");
  }
  LogRecord record;
  record.source_frame = static_cast<std::int64_t>(position);

  if (auto it = packet.find("timestamp"); it != packet.end() && !it->is_null()) {
    if (!it->is_number_integer()) throw SchemaError("timestamp must be integer microseconds", "timestamp");
    record.timestamp_us = it->get<std::int64_t>();
  }
  if (auto it = packet.find("frame"); it != packet.end() && !it->is_null()) {
    if (!it->is_number_integer()) throw SchemaError("frame must be an integer", "frame");
    record.source_frame = it->get<std::int64_t>();
  }

  const auto layers_it = packet.find("layers");
  if (layers_it != packet.end() && layers_it->is_object()) {
    for (const auto& [key, value] : layers_it->items()) add_layer(record.layers, key, value);
  } else {
    for (const auto& [key, value] : packet.items()) {
      if (!is_reserved_key(key)) add_layer(record.layers, key, value);
    }
  }
  return record;
}

std::vector<json> split_documents(std::string_view content) {
  std::size_t first = 0;
  while (first < content.size() && std::isspace(static_cast<unsigned char>(content[first]))) ++first;

  if (first < content.size() && content[first] == '{') {
    // A pretty-printed single packet object is also accepted.
    json whole = json::parse(content, nullptr, false);
    if (!whole.is_discarded() && whole.is_object()) return {std::move(whole)};

    std::vector<json> out;
    std::size_t start = 0;
    while (start < content.size()) {
      std::size_t nl = content.find('\n', start);
      if (nl == std::string_view::npos) nl = content.size();
      const std::string_view line = content.substr(start, nl - start);
      if (!text::trim(line).empty()) {
        try {
          out.push_back(json::parse(line));
        } catch (const json::parse_error& e) {
          throw ParseError(std::string("malformed JSON line: ") + e.what(), start + offset_of(e));
        }
      }
      start = nl + 1;
    }
    return out;
  }

  json root;
  try {
    root = json::parse(content);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what(), offset_of(e));
  }
  if (!root.is_array()) throw SchemaError("log document must be an array of packet objects", "$");
  return root.get<std::vector<json>>();
}

}  // namespace

std::string normalize_protocol_key(std::string_view key) {
  std::string out = text::to_lower(text::trim(key));
  for (char& c : out) {
    if (c == '_' || c == ' ') c = '-';
  }
  if (out == "flap") return "f1ap";
  return out;
}

LogSequence parse_log_file(std::string_view content, const ProtocolFilter& filter, std::string origin) {
  std::optional<std::set<std::string>> normalized_filter;
  if (filter) {
    normalized_filter.emplace();
    for (const auto& p : *filter) normalized_filter->insert(normalize_protocol_key(p));
  }

  const std::vector<json> packets = split_documents(content);

  LogSequence logs;
  logs.origin = std::move(origin);
  logs.protocol_filter = normalized_filter;
  for (std::size_t pos = 0; pos < packets.size(); ++pos) {
    LogRecord record = packet_to_record(packets[pos], pos + 1);
    if (normalized_filter) {
      std::erase_if(record.layers, [&](const auto& kv) { return normalized_filter->count(kv.first) == 0; });
    }
    if (record.layers.empty()) continue;
    record.index = static_cast<int>(logs.records.size()) + 1;
    logs.records.push_back(std::move(record));
  }
  if (logs.records.empty()) {
    throw Error(ErrorKind::EmptySequence,
                packets.empty() ? "log contains no packets" : "no packets remain after protocol filtering");
  }
  return logs;
}

}  // namespace oranval
