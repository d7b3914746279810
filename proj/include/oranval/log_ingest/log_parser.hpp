#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>

#include "oranval/log_ingest/log_model.hpp"

namespace oranval {

using ProtocolFilter = std::optional<std::set<std::string>>;

// Lowercases, maps '_' and ' ' to '-', and repairs known dissector aliases
// ("flap" -> "f1ap").
std::string normalize_protocol_key(std::string_view key);

// Accepts either a JSON array of packet objects or one packet object per line.
// A packet object is either canonical ({"layers": {...}, "timestamp", "frame"})
// or a bare protocol map ({"f1ap": [...], "ngap": [...]}).
//
// Throws ParseError (with byte offset) on malformed JSON, SchemaError naming
// the protocol key on non-string field values, and Error(EmptySequence) when
// no packets survive filtering.
LogSequence parse_log_file(std::string_view content, const ProtocolFilter& filter = std::nullopt,
                           std::string origin = {});

}  // namespace oranval
