#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "commons/support/codec.hpp"
#include "commons/types.hpp"

namespace commons {

// ---------------------------------------------------------------------------
// Shared definition blocks
// ---------------------------------------------------------------------------

enum class ClauseType : std::uint8_t {
  PerActorCap = 0,     // actor's approved appropriation per period <= amount
  PerRoleAllowance = 1,  // actor must hold `role`; per-period allowance `amount`
  PoolFloor = 2,       // pool reserve after withdrawal >= amount
  TimeWindow = 3,      // tick in [from, to]
  RequireRole = 4,     // actor holds `role`
  RequireToken = 5,    // actor holds >= amount of `token_class`
};

/// One conjunctive clause of an appropriation rule. Evaluation is pure over
/// (state, request); the first failing clause is reported by index.
struct RuleClause {
  ClauseType type = ClauseType::PerActorCap;
  Amount amount = 0;
  Tick period = 0;
  RoleName role;
  ClassId token_class;
  Tick from = 0;
  Tick to = 0;

  bool operator==(const RuleClause&) const = default;
};

struct RuleProgramDef {
  RuleId id;
  std::vector<RuleClause> clauses;

  bool operator==(const RuleProgramDef&) const = default;
};

enum class SchemeKind : std::uint8_t { TokenWeighted = 0, QuadraticLock = 1, Conviction = 2 };

struct VoteScheme {
  SchemeKind kind = SchemeKind::TokenWeighted;
  ClassId voting_class;
  Tick lock_duration = 0;  // QuadraticLock: tokens stay locked until close + duration
  double alpha = 0.0;      // Conviction decay per tick, in [0,1)
  double beta = 1.0;       // Conviction threshold coefficient

  bool operator==(const VoteScheme&) const = default;
};

enum class ThresholdKind : std::uint8_t { Majority = 0, MinSupport = 1 };

// --- proposal actions (executed atomically through the ledger on pass) ----

struct NoopAction {
  bool operator==(const NoopAction&) const = default;
};
struct SpendAction {
  PoolId pool;
  AddressId to{};
  Amount amount = 0;
  bool operator==(const SpendAction&) const = default;
};
struct GrantRoleAction {
  AddressId holder{};
  RoleName role;
  RoleScope scope;
  bool operator==(const GrantRoleAction&) const = default;
};
struct RevokeRoleAction {
  AddressId holder{};
  RoleName role;
  RoleScope scope;
  bool operator==(const RevokeRoleAction&) const = default;
};
struct UpdateRuleAction {
  RuleProgramDef program;
  bool operator==(const UpdateRuleAction&) const = default;
};

using ProposalAction =
    std::variant<NoopAction, SpendAction, GrantRoleAction, RevokeRoleAction, UpdateRuleAction>;

enum class ViolationKind : std::uint8_t {
  MissedCommitment = 0,
  RuleBreach = 1,
  VerdictNonCompliance = 2,
};

std::string_view violation_kind_name(ViolationKind k);

// ---------------------------------------------------------------------------
// Commands: the tagged union of every module mutation. The ledger is the
// single writer; each accepted event carries exactly one command.
// ---------------------------------------------------------------------------

// ledger / clock
struct TickAdvance {
  Tick tick = 0;
};

// tokens
struct Mint {
  ClassId cls;
  AddressId to{};
  Amount amount = 0;
};
struct Burn {
  ClassId cls;
  AddressId from{};
  Amount amount = 0;
};
struct Transfer {
  ClassId cls;
  AddressId to{};
  Amount amount = 0;
};
struct GrantRole {
  AddressId holder{};
  RoleName role;
  RoleScope scope;
};
struct RevokeRole {
  AddressId holder{};
  RoleName role;
  RoleScope scope;
};

// treasury
struct Deposit {
  PoolId pool;
  Amount amount = 0;
};
struct Withdraw {
  PoolId pool;
  AddressId to{};
  Amount amount = 0;
  std::optional<std::string> approval;  // required while the rules mechanism is enabled
};
/// Budget draw with every governance mechanism disabled: recorded, nothing
/// else. Exists so governance-off baselines still leave a transparent log.
struct UnguardedDraw {
  PoolId pool;
  Amount amount = 0;
};
struct CurveBuy {
  CurveId curve;
  Amount spend = 0;
};
struct CurveSell {
  CurveId curve;
  Amount tokens = 0;
};

// rules
struct RequestAppropriation {
  RuleId rule;
  PoolId pool;
  Amount amount = 0;
};
struct DistributeRewards {
  PolicyId policy;
  Amount amount = 0;
};

// market
struct PostTender {
  TenderId id;
  Digest32 package{};
  Amount min_reputation = 0;
  std::optional<RoleName> required_role;
  Tick deadline = 0;
  bool cancel_on_no_bids = true;
};
struct SubmitBid {
  TenderId tender;
  Amount price = 0;
};
struct CloseAuction {
  TenderId tender;
};
struct OpenMarket {
  MarketId id;
  ClassId currency;
  Digest32 question{};
  std::vector<std::string> outcomes;
  Ppm fee_ppm = 0;
  std::optional<PoolId> fee_pool;
};
struct Bet {
  MarketId market;
  std::string outcome;
  Amount stake = 0;
};
struct ResolveMarket {
  MarketId market;
  std::string outcome;
};
struct SettleMarket {
  MarketId market;
};

// voting
struct CreateProposal {
  ProposalId id;
  ProposalAction action;
  DecisionKind decision_kind;
  VoteScheme scheme;
  Tick window_len = 0;
  ThresholdKind threshold_kind = ThresholdKind::Majority;
  double min_support = 0.0;
  Amount threshold_amount = 0;  // conviction: request size when action carries none
  std::optional<NodeId> scope;
  std::vector<AddressId> route_affected;  // non-empty: scope = routed competent node
};
struct CastVote {
  ProposalId proposal;
  bool support = true;
  Amount tokens = 0;
};
struct Unstake {
  ProposalId proposal;
};
struct TallyProposal {
  ProposalId proposal;
};
struct ExecuteProposal {
  ProposalId proposal;
};
struct EscalateProposal {
  ProposalId proposal;
  std::string reason;
};
struct TcrApply {
  RegistryId registry;
  std::string item;
  Amount stake = 0;
};
struct TcrChallenge {
  RegistryId registry;
  std::string item;
  Amount stake = 0;
};
struct TcrVote {
  RegistryId registry;
  std::string item;
  bool support = true;  // support == keep/admit the item
  Amount tokens = 0;
};
struct TcrResolve {
  RegistryId registry;
  std::string item;
};

// accountability
struct Commit {
  CommitmentId id;
  Digest32 package{};
  Tick promised_tick = 0;
  std::optional<RuleId> terms;
};
struct ReportComplete {
  CommitmentId commitment;
};
struct OpenReview {
  ReviewRoundId id;
  std::vector<std::pair<AddressId, Digest32>> subjects;  // (contributor, contribution)
  std::vector<AddressId> reviewers;
  PoolId pool;
  Amount reward = 0;
};
struct SubmitScore {
  ReviewRoundId round;
  AddressId subject{};
  std::uint8_t score = 0;  // fixed-point [0,100] for 0.00..1.00
};
struct SettleReview {
  ReviewRoundId round;
};
struct PpcReport {
  Tick period = 0;  // period index; covers ticks [period*len+1, (period+1)*len]
  std::vector<std::tuple<AddressId, Amount, Amount>> rows;  // (actor, promised, completed)
};

// enforcement
struct RecordViolation {
  AddressId actor{};
  ViolationKind kind = ViolationKind::RuleBreach;
  std::optional<NodeId> scope;
};
struct ApplySanction {
  AddressId actor{};
  std::uint32_t step = 0;  // ladder index; must match the actor's next step
  std::optional<NodeId> scope;
};
struct OpenDispute {
  DisputeId id;
  AddressId defendant{};
  Digest32 claim{};
  std::optional<NodeId> scope;
  bool remedy_violation = false;  // upheld verdict records a violation on the defendant
};
struct StakeJuror {
  DisputeId dispute;
  Amount stake = 0;
};
struct VoteVerdict {
  DisputeId dispute;
  bool uphold = true;
};
struct ResolveDispute {
  DisputeId dispute;
};

// enterprise
struct Delegate {
  NodeId from;
  NodeId to;
  DecisionKind kind;
};
struct RevokeDelegation {
  NodeId from;
  NodeId to;
  DecisionKind kind;
};

using Command = std::variant<
    TickAdvance, Mint, Burn, Transfer, GrantRole, RevokeRole, Deposit, Withdraw, UnguardedDraw,
    CurveBuy, CurveSell, RequestAppropriation, DistributeRewards, PostTender, SubmitBid,
    CloseAuction, OpenMarket, Bet, ResolveMarket, SettleMarket, CreateProposal, CastVote,
    Unstake, TallyProposal, ExecuteProposal, EscalateProposal, TcrApply, TcrChallenge,
    TcrVote, TcrResolve, Commit, ReportComplete, OpenReview, SubmitScore, SettleReview, PpcReport,
    RecordViolation, ApplySanction, OpenDispute, StakeJuror, VoteVerdict, ResolveDispute, Delegate,
    RevokeDelegation>;

/// Stable snake_case tag, used in history filters, scenario scripts, and
/// coverage attribution.
std::string_view command_kind_name(const Command& cmd);

void encode_command(CanonicalWriter& w, const Command& cmd);
Command decode_command(CanonicalReader& r);  // throws DecodeError

void encode_action(CanonicalWriter& w, const ProposalAction& a);
ProposalAction decode_action(CanonicalReader& r);

}  // namespace commons
