#pragma once

#include <map>
#include <optional>
#include <string>

#include "commons/commands.hpp"
#include "commons/support/result.hpp"
#include "commons/types.hpp"

namespace commons {

struct WorldState;

enum class ProposalStatus : std::uint8_t {
  Open = 0,
  Passed = 1,
  Rejected = 2,
  Executed = 3,
};

struct BallotRecord {
  bool support = true;
  Amount tokens = 0;
  double weight = 0.0;
  Tick cast_at = 0;
};

struct Proposal {
  ProposalId id;
  AddressId proposer{};
  ProposalAction action;
  DecisionKind decision_kind;
  VoteScheme scheme;
  Tick opened_at = 0;
  Tick window_len = 0;
  ThresholdKind threshold_kind = ThresholdKind::Majority;
  double min_support = 0.0;
  Amount threshold_amount = 0;
  std::optional<NodeId> scope;
  AddressId escrow{};  // locked and staked voting tokens
  ProposalStatus status = ProposalStatus::Open;
  std::map<AddressId, BallotRecord> ballots;        // token-weighted, quadratic
  std::map<AddressId, Amount> conviction_stakes;    // conviction backers
  double conviction = 0.0;                          // iterated once per tick
  std::uint32_t failed_tallies = 0;
  std::uint32_t escalations = 0;
};

enum class EntryStatus : std::uint8_t {
  Applied = 0,
  Challenged = 1,
  Admitted = 2,
  Rejected = 3,
};

struct RegistryEntry {
  std::string item;
  AddressId applicant{};
  Amount stake = 0;
  Tick applied_at = 0;
  EntryStatus status = EntryStatus::Applied;
  std::optional<AddressId> challenger;
  Amount challenge_stake = 0;
  Tick challenged_at = 0;
  std::map<AddressId, std::pair<bool, Amount>> votes;  // voter -> (keep?, escrowed tokens)
};

/// Token-curated registry. Genesis-defined; entries move Applied ->
/// Admitted at the window end, or through a challenge vote.
struct Registry {
  RegistryId id;
  ClassId stake_class;
  Amount min_stake = 0;
  Tick apply_window = 0;  // challenge period length
  Tick vote_window = 0;   // ballot length after a challenge
  AddressId escrow{};
  std::map<std::string, RegistryEntry> entries;
};

namespace voting {

/// Quadratic ballot weight for a coin lock of `tokens`.
double quadratic_weight(Amount tokens);

/// One conviction step: c' = alpha * c + staked.
double conviction_step(double alpha, double conviction, Amount staked);

/// Pass threshold for a conviction proposal requesting `amount`.
double conviction_threshold(double alpha, double beta, Amount amount);

Status create_proposal(WorldState& w, const AddressId& proposer, const CreateProposal& cmd);
Status cast_vote(WorldState& w, const AddressId& voter, const ProposalId& id, bool support,
                 Amount tokens);
Status unstake(WorldState& w, const AddressId& voter, const ProposalId& id);

struct TallyOutcome {
  bool decided = false;  // conviction tallies below threshold stay open
  bool passed = false;
  double yes = 0.0;
  double no = 0.0;
};
Result<TallyOutcome> tally(WorldState& w, const AddressId& actor, const ProposalId& id);
Status execute(WorldState& w, const ProposalId& id);
Status escalate(WorldState& w, const AddressId& actor, const ProposalId& id);

Status tcr_apply(WorldState& w, const AddressId& applicant, const RegistryId& reg,
                 const std::string& item, Amount stake);
Status tcr_challenge(WorldState& w, const AddressId& challenger, const RegistryId& reg,
                     const std::string& item, Amount stake);
Status tcr_vote(WorldState& w, const AddressId& voter, const RegistryId& reg,
                const std::string& item, bool support, Amount tokens);

struct TcrOutcome {
  EntryStatus status = EntryStatus::Admitted;
  bool challenged = false;
};
Result<TcrOutcome> tcr_resolve(WorldState& w, const RegistryId& reg, const std::string& item);

/// True when `item` is an admitted entry of `reg`.
bool tcr_listed(const WorldState& w, const RegistryId& reg, const std::string& item);

}  // namespace voting
}  // namespace commons
