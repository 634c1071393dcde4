#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "commons/accountability.hpp"
#include "commons/commands.hpp"
#include "commons/enforcement.hpp"
#include "commons/enterprise.hpp"
#include "commons/market.hpp"
#include "commons/rules.hpp"
#include "commons/support/codec.hpp"
#include "commons/support/result.hpp"
#include "commons/tokens.hpp"
#include "commons/treasury.hpp"
#include "commons/types.hpp"
#include "commons/voting.hpp"

namespace commons {

constexpr int kMechanismCount = 14;

/// Parse "M7" -> 7. Returns 0 on anything out of range.
int parse_mechanism(std::string_view tag);
std::string mechanism_tag(int m);

struct Config {
  ClassId currency_class;
  ClassId membership_class;
  ClassId reputation_class;
  Tick ppc_period_len = 10;
  SanctionLadder ladder;
  ClassId court_stake_class;
  Amount court_min_stake = 1;
  Ppm court_slash = 200'000;
  std::uint32_t deadlock_n = 2;
  bool auto_sanctions = true;
};

/// The whole replicated state. Everything in here is covered by the state
/// hash; anything not in here must be derivable from the log.
struct WorldState {
  std::uint64_t world_seed = 0;
  std::array<bool, kMechanismCount + 1> mech{};  // [1..14]; [0] unused
  Config cfg;
  Tick tick = 0;
  Seq applied = 0;  // accepted events folded in so far

  std::map<AddressId, AddressRecord> addresses;
  std::map<ClassId, TokenClass> classes;
  RoleTable roles;

  std::map<PoolId, Pool> pools;
  std::map<CurveId, BondingCurve> curves;

  std::map<RuleId, RuleProgramDef> rules;
  std::map<RuleId, std::map<AddressId, std::vector<std::pair<Tick, Amount>>>> appropriations;
  std::map<std::string, Approval> approvals;
  std::map<PolicyId, DistributionPolicy> policies;
  std::map<std::string, IncentiveRule> incentives;
  std::set<std::pair<std::string, Seq>> fired_incentives;

  std::map<TenderId, Tender> tenders;
  std::map<MarketId, PredictionMarket> markets;

  std::map<ProposalId, Proposal> proposals;
  std::map<RegistryId, Registry> registries;

  std::map<CommitmentId, Commitment> commitments;
  std::map<ReviewRoundId, ReviewRound> reviews;
  std::set<Tick> ppc_reported;  // periods already covered by a report

  std::map<AddressId, std::vector<ViolationRecord>> violations;
  std::map<AddressId, std::vector<AppliedSanction>> sanctions;
  std::map<AddressId, RewardReduction> reward_reductions;
  std::map<DisputeId, Dispute> disputes;

  std::map<NodeId, OrgNode> org;
  NodeId org_root;
  std::set<DelegationKey> delegations;

  bool mechanism_on(int m) const { return m >= 1 && m <= kMechanismCount && mech[m]; }
};

/// Deterministic id for a non-signing escrow account.
AddressId derive_escrow(std::string_view tag, std::string_view id);

/// Registers (once) the escrow address record and returns its id.
AddressId ensure_escrow(WorldState& w, std::string_view tag, std::string_view id);

void encode_state(CanonicalWriter& w, const WorldState& s);
WorldState decode_state(CanonicalReader& r);  // throws DecodeError
Digest32 state_hash(const WorldState& s);

}  // namespace commons
