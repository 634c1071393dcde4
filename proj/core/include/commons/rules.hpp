#pragma once

#include <map>
#include <string>
#include <vector>

#include "commons/commands.hpp"
#include "commons/support/result.hpp"
#include "commons/types.hpp"

namespace commons {

struct WorldState;

/// Single-use spending capability minted by an accepted appropriation
/// request and consumed by the matching withdrawal.
struct Approval {
  std::string id;
  AddressId actor{};
  PoolId pool;
  Amount amount = 0;
  Tick issued_at = 0;
  bool consumed = false;
};

/// Reward split policy: amount is taken from `pool` and distributed over
/// holders of `weight_class` by largest remainder.
struct DistributionPolicy {
  PolicyId id;
  PoolId pool;
  ClassId weight_class;
};

/// Automatic incentive: when an accepted event matches `trigger`, mint
/// `reward` of `reward_class` to the actor it credits. Fires at most once
/// per (rule, event).
struct IncentiveRule {
  std::string id;
  std::string trigger;  // "on_time_completion" | "ppc_perfect"
  Amount reward = 0;
  ClassId reward_class;
};

namespace rules {

struct ClauseFailure {
  std::size_t index = 0;
  ClauseType type = ClauseType::PerActorCap;
};

/// Pure evaluation of one rule against a request; no state change.
/// Returns the first failing clause if any.
std::optional<ClauseFailure> evaluate(const WorldState& w, const RuleProgramDef& rule,
                                      const AddressId& actor, const PoolId& pool, Amount amount,
                                      Tick tick);

/// Id an accepted request issued at (tick, seq) derives to. Deterministic,
/// so a client that saw its request accepted can name the approval without
/// reading it back.
std::string approval_id(const RuleId& rule, const AddressId& actor, Tick tick, Seq seq);

/// Accepted requests append to the per-rule appropriation history (cap
/// accounting operates over it) and issue an approval. Returns its id.
Result<std::string> request_appropriation(WorldState& w, const AddressId& actor,
                                          const RuleId& rule, const PoolId& pool, Amount amount);

struct Payout {
  AddressId to{};
  Amount amount = 0;
};

/// Largest-remainder split of `amount` by weight; ties broken toward the
/// earlier address. Exposed for the engine and for oracle comparison.
std::vector<Payout> largest_remainder(const std::vector<std::pair<AddressId, Amount>>& weights,
                                      Amount amount);

Result<std::vector<Payout>> distribute_rewards(WorldState& w, const AddressId& actor,
                                               const PolicyId& policy, Amount amount);

/// Amount appropriated by `actor` under `rule` in (period containing
/// `tick`), for a clause with period length `period`.
Amount appropriated_in_period(const WorldState& w, const RuleId& rule, const AddressId& actor,
                              Tick tick, Tick period);

}  // namespace rules
}  // namespace commons
