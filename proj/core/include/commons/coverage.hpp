#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "commons/ledger.hpp"
#include "commons/support/result.hpp"
#include "commons/world.hpp"

namespace commons {

struct CoverageReport {
  std::map<std::string, std::uint64_t> mechanisms;    // "M1".."M14" -> events
  std::map<std::string, std::uint64_t> applications;  // "M1-1".."M14-1" -> events
  std::vector<std::string> mechanism_gaps;            // never exercised
  std::vector<std::string> application_gaps;
  std::uint64_t events = 0;

  std::size_t mechanisms_hit() const;
  std::size_t applications_hit() const;
};

namespace coverage {

/// Application ids an accepted event exercises, judged against the state
/// the event applied to. Disabled mechanisms attribute nothing; the
/// transparency applications (M7) attach to every accepted event.
std::vector<std::string> attribute(const WorldState& before, const SignedEvent& ev);

/// Fold the log from genesis, attributing every event.
Result<CoverageReport> report(WorldState genesis, const EventLog& log);

std::string to_tsv(const CoverageReport& r);

}  // namespace coverage
}  // namespace commons
