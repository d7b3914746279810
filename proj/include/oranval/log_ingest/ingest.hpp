#pragma once

#include <filesystem>
#include <string_view>

#include "oranval/log_ingest/dissector.hpp"

namespace oranval {

// True for pcap / pcapng magic numbers.
bool looks_like_capture(std::string_view head);

// Dispatches on content: captures go through the dissector, anything else is
// parsed as a log file. origin defaults to the file name.
LogSequence ingest_file(const std::filesystem::path& path, const DissectorConfig& dissector,
                        const ProtocolFilter& filter = std::nullopt, std::string origin = {});

}  // namespace oranval
