#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "oranval/common/file_io.hpp"
#include "oranval/log_ingest/log_model.hpp"
#include "oranval/retrieval/flow.hpp"

namespace oranval::testing {

inline std::filesystem::path fixture_dir() { return ORANVAL_FIXTURE_DIR; }
inline std::filesystem::path campaign_dir() { return fixture_dir() / "campaign"; }

// splitmix64; tests never touch std::random_device so failures replay.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  // Uniform in [lo, hi].
  int uniform(int lo, int hi) { return lo + static_cast<int>(next() % static_cast<std::uint64_t>(hi - lo + 1)); }
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  bool chance(double p) { return unit() < p; }

 private:
  std::uint64_t state_;
};

using BoolGrid = std::vector<std::vector<bool>>;

inline BoolGrid random_grid(Rng& rng, int steps, int entries, double density) {
  BoolGrid g(static_cast<std::size_t>(steps), std::vector<bool>(static_cast<std::size_t>(entries)));
  for (auto& row : g)
    for (std::size_t i = 0; i < row.size(); ++i) row[i] = rng.chance(density);
  return g;
}

inline LogSequence blank_logs(int n) {
  LogSequence logs;
  logs.origin = "synthetic";
  for (int i = 1; i <= n; ++i) {
    LogRecord r;
    r.index = i;
    r.source_frame = i;
    r.layers["f1ap"] = {"entry " + std::to_string(i)};
    logs.records.push_back(std::move(r));
  }
  return logs;
}

inline ProceduralFlow plain_flow(int m) {
  ProceduralFlow flow;
  for (int s = 1; s <= m; ++s) flow.steps.push_back(describe_step(s, "The A sends a STEP " + std::to_string(s) + " to the B."));
  flow.approval = ApprovalState::Approved;
  flow.approved_by = "tester";
  return flow;
}

inline ApprovedFlow approved(ProceduralFlow flow) {
  flow.approval = ApprovalState::Approved;
  if (!flow.approved_by) flow.approved_by = "tester";
  return ApprovedFlow::from(std::move(flow));
}

inline std::string slurp(const std::filesystem::path& p) { return io::read_file(p); }

class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("oranval-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace oranval::testing
