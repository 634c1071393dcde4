#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "commons/commands.hpp"
#include "commons/support/result.hpp"
#include "commons/types.hpp"

namespace commons {

struct WorldState;

// --- graduated sanctions ---------------------------------------------------

struct WarningStep {};
struct ReputationSlashStep {
  Ppm share = 0;
};
struct RewardShareReductionStep {
  Ppm share = 0;
};
struct RemovalStep {};

using SanctionStep =
    std::variant<WarningStep, ReputationSlashStep, RewardShareReductionStep, RemovalStep>;

std::string sanction_step_name(const SanctionStep& s);

struct SanctionLadder {
  std::vector<SanctionStep> steps;
  Tick window = 0;  // violations older than this stop counting
};

struct ViolationRecord {
  ViolationKind kind = ViolationKind::RuleBreach;
  Tick at = 0;
  std::optional<NodeId> scope;
  Seq seq = 0;
};

struct AppliedSanction {
  std::uint32_t step = 0;
  Tick at = 0;
  Seq seq = 0;
};

/// Active reward-share reduction, consulted by reward distribution.
struct RewardReduction {
  Ppm share = 0;
  Tick until = 0;
};

// --- juror court -------------------------------------------------------------

struct JurorStake {
  AddressId juror{};
  Amount stake = 0;
  Seq seq = 0;  // staking order; the latest juror's vote drops on even panels
};

enum class DisputeStatus : std::uint8_t { Open = 0, Resolved = 1 };

struct Dispute {
  DisputeId id;
  AddressId claimant{};
  AddressId defendant{};
  Digest32 claim{};
  std::optional<NodeId> scope;
  bool remedy_violation = false;
  AddressId escrow{};
  DisputeStatus status = DisputeStatus::Open;
  std::vector<JurorStake> jurors;
  std::map<AddressId, bool> verdicts;
  bool upheld = false;
};

namespace enforcement {

/// Violations inside the ladder window ending at `tick`, oldest first.
std::vector<ViolationRecord> window_violations(const WorldState& w, const AddressId& actor,
                                               Tick tick);

/// Ladder step for the actor's next sanction at `tick`: count of window
/// violations minus one, clamped to the last rung.
std::uint32_t next_step(const WorldState& w, const AddressId& actor, Tick tick);

/// Record a violation; when auto sanctions are on, immediately applies the
/// ladder step. Returns the applied step, if any.
Result<std::optional<std::uint32_t>> record_violation(WorldState& w, const AddressId& monitor,
                                                      const AddressId& actor, ViolationKind kind,
                                                      const std::optional<NodeId>& scope);

/// Manual path used when auto sanctions are off; `step` must match
/// next_step for the actor.
Status apply_sanction(WorldState& w, const AddressId& actor, std::uint32_t step,
                      const std::optional<NodeId>& scope);

Status open_dispute(WorldState& w, const AddressId& claimant, const OpenDispute& cmd);
Status stake_juror(WorldState& w, const AddressId& juror, const DisputeId& id, Amount stake);
Status vote_verdict(WorldState& w, const AddressId& juror, const DisputeId& id, bool uphold);

struct VerdictOutcome {
  bool upheld = false;
  Amount slashed = 0;  // total taken from the minority
};
Result<VerdictOutcome> resolve_dispute(WorldState& w, const DisputeId& id);

}  // namespace enforcement
}  // namespace commons
