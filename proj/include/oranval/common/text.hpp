#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace oranval::text {

std::string_view trim(std::string_view s);
std::string_view trim_right(std::string_view s);
std::string to_lower(std::string_view s);
std::string to_upper(std::string_view s);

// Uppercases and drops every non-alphanumeric byte: "id-UEContextRelease (10)"
// becomes "IDUECONTEXTRELEASE10".
std::string normalize_token(std::string_view s);

// A trailing newline does not yield an empty final line.
std::vector<std::string> split_lines(std::string_view s);
std::vector<std::string_view> split_words(std::string_view s);

bool iequals(std::string_view a, std::string_view b);
bool starts_with_icase(std::string_view s, std::string_view prefix);

// "a", "a and b", "a, b, and c"
std::string join_natural(const std::vector<std::string>& items);
std::string join(const std::vector<std::string>& items, std::string_view sep);

// Replaces every "{name}" occurrence with the mapped value; unknown
// placeholders are left untouched.
std::string substitute(std::string_view tmpl,
                       const std::vector<std::pair<std::string, std::string>>& values);

std::uint64_t fnv1a64(std::string_view data);
std::string fnv1a64_hex(std::string_view data);

}  // namespace oranval::text
