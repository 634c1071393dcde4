#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "commons/engine.hpp"
#include "commons/ledger.hpp"
#include "commons/scenario.hpp"
#include "commons/support/result.hpp"
#include "commons/world.hpp"

namespace commons {

struct PpcPoint {
  Tick period = 0;
  Amount promised = 0;
  Amount completed = 0;
};

struct TickSample {
  Tick tick = 0;
  Amount reserve = 0;            // project pool reserve after the tick's events
  Amount done = 0;               // packages completed so far
  std::uint64_t violations = 0;  // cumulative
  std::uint64_t sanctions = 0;   // cumulative
};

struct SimMetrics {
  Tick ticks = 0;
  Amount packages_total = 0;
  Amount packages_done = 0;
  double completion = 0.0;
  std::optional<Tick> depletion_tick;
  Amount done_at_depletion = 0;
  bool tragedy = false;
  std::optional<Tick> first_greed_reduction;
  std::uint64_t accepted = 0;
  std::uint64_t rejected = 0;
  std::map<std::string, std::uint64_t> events_by_kind;
  std::vector<PpcPoint> ppc;
  std::vector<TickSample> series;
};

struct SimRun {
  WorldState genesis;
  WorldState final_state;
  EventLog log;
  SimMetrics metrics;
};

namespace sim {

/// Deterministic tick loop: per tick, scripted events fire, agents act
/// through the engine, the scheduler advances the clock. Identical
/// (scenario, seed) pairs produce identical logs and final state hashes.
Result<SimRun> run(const Scenario& s);

struct TragedyCall {
  bool tragedy = false;
  std::optional<Tick> margin;  // horizon minus depletion tick
};

/// The tragedy flag from a finished run's metrics: the pool depleted while
/// work remained. Depletion exactly at completion does not count.
TragedyCall tragedy_metric(const SimMetrics& m);

struct AbResult {
  SimRun a;  // as configured
  SimRun b;  // listed mechanisms flipped
  std::vector<int> switched;
};

/// Paired runs under one seed with the listed mechanisms toggled in B.
Result<AbResult> ab_compare(const Scenario& s, const std::vector<int>& switches);

}  // namespace sim
}  // namespace commons
