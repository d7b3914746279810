#include "oranval/log_ingest/ingest.hpp"

#include <array>
#include <cstring>

#include "oranval/common/file_io.hpp"

namespace oranval {

bool looks_like_capture(std::string_view head) {
  static constexpr std::array<std::array<unsigned char, 4>, 5> magics{{
      {0xd4, 0xc3, 0xb2, 0xa1},
      {0xa1, 0xb2, 0xc3, 0xd4},
      {0x4d, 0x3c, 0xb2, 0xa1},
      {0xa1, 0xb2, 0x3c, 0x4d},
      {0x0a, 0x0d, 0x0d, 0x0a},
  }};
  if (head.size() < 4) return false;
  for (const auto& m : magics) {
    if (std::memcmp(head.data(), m.data(), 4) == 0) return true;
  }
  return false;
}

LogSequence ingest_file(const std::filesystem::path& path, const DissectorConfig& dissector,
                        const ProtocolFilter& filter, std::string origin) {
  const std::string content = io::read_file(path);
  if (origin.empty()) origin = path.filename().string();
  if (looks_like_capture(content)) {
    auto seq = dissect_capture(path, dissector, filter);
    seq.origin = origin;
    return seq;
  }
  return parse_log_file(content, filter, origin);
}

}  // namespace oranval
