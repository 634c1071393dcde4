#pragma once

#include <filesystem>
#include <string>

#include "commons/coverage.hpp"
#include "commons/sim.hpp"
#include "commons/support/result.hpp"

namespace commons {

inline constexpr std::string_view kEngineVersion = "0.1.0";

namespace reports {

/// Everything a finished run leaves behind: the event log, the canonical
/// genesis state, delimited report tables, and manifest.json tying them
/// together. Returns the manifest path. Byte-deterministic.
Result<std::filesystem::path> write_run(const std::filesystem::path& dir, const Scenario& s,
                                        const SimRun& run);

struct ManifestInfo {
  std::string name;
  Digest32 scenario_digest{};
  std::uint64_t seed = 0;
  Digest32 genesis{};
  Digest32 final_hash{};
  std::uint64_t events = 0;
  std::filesystem::path log;          // resolved against the manifest location
  std::filesystem::path genesis_bin;
};

Result<ManifestInfo> read_manifest(const std::filesystem::path& file);

/// Paired A/B metrics as a delimited table.
std::string ab_table(const sim::AbResult& ab);

}  // namespace reports
}  // namespace commons
