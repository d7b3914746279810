#include "oranval/log_ingest/log_model.hpp"

namespace oranval {

nlohmann::json record_to_json(const LogRecord& record) {
  nlohmann::json j;
  j["index"] = record.index;
  j["frame"] = record.source_frame;
  if (record.timestamp_us) j["timestamp"] = *record.timestamp_us;
  nlohmann::json layers = nlohmann::json::object();
  for (const auto& [protocol, fields] : record.layers) layers[protocol] = fields;
  j["layers"] = std::move(layers);
  return j;
}

nlohmann::json to_canonical_json(const LogSequence& logs) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : logs.records) arr.push_back(record_to_json(r));
  return arr;
}

std::string serialize_canonical(const LogSequence& logs) { return to_canonical_json(logs).dump(2) + "\n"; }

}  // namespace oranval
