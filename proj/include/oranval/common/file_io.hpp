#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace oranval::io {

std::string read_file(const std::filesystem::path& path);

// Writes to a sibling temporary file and renames it over the target so readers
// never observe a partially written file.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace oranval::io
