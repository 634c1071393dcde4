#include "commons/voting.hpp"

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "commons/enterprise.hpp"
#include "commons/rules.hpp"
#include "commons/tokens.hpp"
#include "commons/world.hpp"

namespace commons::voting {

namespace {

bool is_machine(const WorldState& w, const AddressId& who) {
  auto it = w.addresses.find(who);
  return it != w.addresses.end() && it->second.kind == ActorKind::Machine;
}

Status refund_ballots(WorldState& w, Proposal& p) {
  for (auto& [voter, ballot] : p.ballots) {
    if (ballot.tokens == 0) continue;
    if (auto s = tokens::transfer(w, p.escrow, p.scheme.voting_class, voter, ballot.tokens);
        !s.ok())
      return s;
    ballot.tokens = 0;
  }
  return ok_status();
}

Status refund_conviction(WorldState& w, Proposal& p) {
  for (auto& [backer, staked] : p.conviction_stakes) {
    if (auto s = tokens::transfer(w, p.escrow, p.scheme.voting_class, backer, staked); !s.ok())
      return s;
  }
  p.conviction_stakes.clear();
  return ok_status();
}

}  // namespace

double quadratic_weight(Amount tokens) { return std::sqrt(static_cast<double>(tokens)); }

double conviction_step(double alpha, double conviction, Amount staked) {
  return alpha * conviction + static_cast<double>(staked);
}

double conviction_threshold(double alpha, double beta, Amount amount) {
  return beta * static_cast<double>(amount) / (1.0 - alpha);
}

Status create_proposal(WorldState& w, const AddressId& proposer, const CreateProposal& cmd) {
  if (cmd.id.empty()) return Error{Errc::InvalidPayload, "empty proposal id"};
  if (w.proposals.contains(cmd.id)) return Error{Errc::DuplicateId, "proposal " + cmd.id};
  if (cmd.window_len == 0 && cmd.scheme.kind != SchemeKind::Conviction)
    return Error{Errc::InvalidPayload, "zero voting window"};
  if (!w.classes.contains(cmd.scheme.voting_class))
    return Error{Errc::UnknownClass, cmd.scheme.voting_class};

  Amount threshold_amount = cmd.threshold_amount;
  if (cmd.scheme.kind == SchemeKind::Conviction) {
    if (!(cmd.scheme.alpha >= 0.0 && cmd.scheme.alpha < 1.0))
      return Error{Errc::InvalidPayload, "conviction alpha outside [0,1)"};
    if (cmd.scheme.beta <= 0.0) return Error{Errc::InvalidPayload, "conviction beta <= 0"};
    if (threshold_amount == 0) {
      if (const auto* spend = std::get_if<SpendAction>(&cmd.action))
        threshold_amount = spend->amount;
    }
    if (threshold_amount <= 0)
      return Error{Errc::InvalidPayload, "conviction proposal needs a request size"};
  }

  if (const auto* spend = std::get_if<SpendAction>(&cmd.action)) {
    if (!w.pools.contains(spend->pool)) return Error{Errc::UnknownPool, spend->pool};
    if (spend->amount <= 0) return Error{Errc::InvalidPayload, "non-positive spend"};
  } else if (const auto* grant = std::get_if<GrantRoleAction>(&cmd.action)) {
    if (grant->scope.node && !w.org.contains(*grant->scope.node))
      return Error{Errc::UnknownNode, *grant->scope.node};
  } else if (const auto* revoke = std::get_if<RevokeRoleAction>(&cmd.action)) {
    if (revoke->scope.node && !w.org.contains(*revoke->scope.node))
      return Error{Errc::UnknownNode, *revoke->scope.node};
  } else if (const auto* upd = std::get_if<UpdateRuleAction>(&cmd.action)) {
    if (upd->program.id.empty()) return Error{Errc::InvalidPayload, "empty rule id"};
  }

  std::optional<NodeId> scope = cmd.scope;
  if (!cmd.route_affected.empty()) {
    auto routed = enterprise::route_decision(w, cmd.decision_kind, cmd.route_affected);
    if (!routed.ok()) return routed.error();
    scope = routed.value();
  } else if (scope && !w.org.contains(*scope)) {
    return Error{Errc::UnknownNode, *scope};
  }

  Proposal p;
  p.id = cmd.id;
  p.proposer = proposer;
  p.action = cmd.action;
  p.decision_kind = cmd.decision_kind;
  p.scheme = cmd.scheme;
  p.opened_at = w.tick;
  p.window_len = cmd.window_len;
  p.threshold_kind = cmd.threshold_kind;
  p.min_support = cmd.min_support;
  p.threshold_amount = threshold_amount;
  p.scope = std::move(scope);
  p.escrow = ensure_escrow(w, "proposal", cmd.id);
  w.proposals.emplace(cmd.id, std::move(p));
  return ok_status();
}

Status cast_vote(WorldState& w, const AddressId& voter, const ProposalId& id, bool support,
                 Amount tokens) {
  auto it = w.proposals.find(id);
  if (it == w.proposals.end()) return Error{Errc::UnknownProposal, id};
  Proposal& p = it->second;
  if (p.status != ProposalStatus::Open) return Error{Errc::AlreadyClosed, "proposal " + id};
  if (is_machine(w, voter)) return Error{Errc::MachineVoter, "machines hold no vote"};
  if (tokens <= 0) return Error{Errc::ZeroSpend, "empty ballot"};

  if (p.scheme.kind == SchemeKind::Conviction) {
    if (!support) return Error{Errc::InvalidPayload, "conviction accepts support only"};
    if (auto s = tokens::transfer(w, voter, p.scheme.voting_class, p.escrow, tokens); !s.ok())
      return s;
    p.conviction_stakes[voter] += tokens;
    return ok_status();
  }

  if (w.tick > p.opened_at + p.window_len) return Error{Errc::OutsideWindow, "proposal " + id};
  if (p.ballots.contains(voter)) return Error{Errc::DoubleVote, "proposal " + id};
  if (auto s = tokens::transfer(w, voter, p.scheme.voting_class, p.escrow, tokens); !s.ok())
    return s;

  BallotRecord b;
  b.support = support;
  b.tokens = tokens;
  b.weight = p.scheme.kind == SchemeKind::QuadraticLock ? quadratic_weight(tokens)
                                                        : static_cast<double>(tokens);
  b.cast_at = w.tick;
  p.ballots.emplace(voter, b);
  return ok_status();
}

Status unstake(WorldState& w, const AddressId& voter, const ProposalId& id) {
  auto it = w.proposals.find(id);
  if (it == w.proposals.end()) return Error{Errc::UnknownProposal, id};
  Proposal& p = it->second;

  if (p.scheme.kind == SchemeKind::Conviction) {
    if (p.status != ProposalStatus::Open) return Error{Errc::AlreadyClosed, "proposal " + id};
    auto stake = p.conviction_stakes.find(voter);
    if (stake == p.conviction_stakes.end())
      return Error{Errc::Insufficient, "no conviction stake"};
    if (auto s = tokens::transfer(w, p.escrow, p.scheme.voting_class, voter, stake->second);
        !s.ok())
      return s;
    p.conviction_stakes.erase(stake);
    return ok_status();
  }

  if (p.scheme.kind != SchemeKind::QuadraticLock)
    return Error{Errc::InvalidPayload, "nothing locked past tally"};
  if (p.status == ProposalStatus::Open)
    return Error{Errc::OutsideWindow, "lock runs until after the tally"};
  if (w.tick < p.opened_at + p.window_len + p.scheme.lock_duration)
    return Error{Errc::OutsideWindow, "lock still running"};
  auto ballot = p.ballots.find(voter);
  if (ballot == p.ballots.end() || ballot->second.tokens == 0)
    return Error{Errc::Insufficient, "no locked ballot"};
  if (auto s =
          tokens::transfer(w, p.escrow, p.scheme.voting_class, voter, ballot->second.tokens);
      !s.ok())
    return s;
  ballot->second.tokens = 0;
  return ok_status();
}

Result<TallyOutcome> tally(WorldState& w, const AddressId&, const ProposalId& id) {
  auto it = w.proposals.find(id);
  if (it == w.proposals.end()) return Error{Errc::UnknownProposal, id};
  Proposal& p = it->second;
  if (p.status != ProposalStatus::Open) return Error{Errc::AlreadyClosed, "proposal " + id};

  TallyOutcome out;
  if (p.scheme.kind == SchemeKind::Conviction) {
    out.yes = p.conviction;
    double bar = conviction_threshold(p.scheme.alpha, p.scheme.beta, p.threshold_amount);
    if (p.conviction >= bar) {
      if (auto s = refund_conviction(w, p); !s.ok()) return s.error();
      p.status = ProposalStatus::Passed;
      out.decided = true;
      out.passed = true;
    } else {
      p.failed_tallies += 1;
    }
    return out;
  }

  if (w.tick <= p.opened_at + p.window_len)
    return Error{Errc::NotYetDeadline, "voting window still open"};
  for (const auto& [voter, ballot] : p.ballots)
    (ballot.support ? out.yes : out.no) += ballot.weight;

  bool passed = out.yes > out.no;
  if (p.threshold_kind == ThresholdKind::MinSupport) passed = passed && out.yes >= p.min_support;
  out.decided = true;
  out.passed = passed;
  if (!passed) p.failed_tallies += 1;
  p.status = passed ? ProposalStatus::Passed : ProposalStatus::Rejected;

  // Plain token ballots unlock at the tally; quadratic locks survive it.
  if (p.scheme.kind == SchemeKind::TokenWeighted) {
    if (auto s = refund_ballots(w, p); !s.ok()) return s.error();
  }
  return out;
}

Status execute(WorldState& w, const ProposalId& id) {
  auto it = w.proposals.find(id);
  if (it == w.proposals.end()) return Error{Errc::UnknownProposal, id};
  Proposal& p = it->second;
  if (p.status == ProposalStatus::Executed) return Error{Errc::AlreadyExecuted, "proposal " + id};
  if (p.status != ProposalStatus::Passed) return Error{Errc::NotPassed, "proposal " + id};

  if (const auto* spend = std::get_if<SpendAction>(&p.action)) {
    auto pool = w.pools.find(spend->pool);
    if (pool == w.pools.end()) return Error{Errc::UnknownPool, spend->pool};
    if (auto s = tokens::transfer(w, pool->second.escrow, pool->second.currency, spend->to,
                                  spend->amount);
        !s.ok())
      return s;
  } else if (const auto* grant = std::get_if<GrantRoleAction>(&p.action)) {
    if (auto s = tokens::grant_role(w, grant->holder, grant->role, grant->scope); !s.ok())
      return s;
  } else if (const auto* revoke = std::get_if<RevokeRoleAction>(&p.action)) {
    if (auto s = tokens::revoke_role(w, revoke->holder, revoke->role, revoke->scope); !s.ok())
      return s;
  } else if (const auto* upd = std::get_if<UpdateRuleAction>(&p.action)) {
    w.rules[upd->program.id] = upd->program;
  }
  p.status = ProposalStatus::Executed;
  return ok_status();
}

Status escalate(WorldState& w, const AddressId&, const ProposalId& id) {
  auto it = w.proposals.find(id);
  if (it == w.proposals.end()) return Error{Errc::UnknownProposal, id};
  Proposal& p = it->second;
  if (p.status != ProposalStatus::Open) return Error{Errc::AlreadyClosed, "proposal " + id};
  if (p.failed_tallies < w.cfg.deadlock_n)
    return Error{Errc::NotYetDeadline, "proposal is not deadlocked"};
  if (!p.scope) return Error{Errc::AtRoot, "unscoped proposals cannot escalate"};

  auto target = enterprise::escalation_target(w, *p.scope, p.decision_kind);
  if (!target.ok()) return target.error();

  // The higher tier starts from a clean slate: stakes home, clock reset.
  if (auto s = refund_ballots(w, p); !s.ok()) return s;
  if (auto s = refund_conviction(w, p); !s.ok()) return s;
  p.ballots.clear();
  p.conviction = 0.0;
  p.failed_tallies = 0;
  p.opened_at = w.tick;
  p.scope = target.value();
  p.escalations += 1;
  return ok_status();
}

Status tcr_apply(WorldState& w, const AddressId& applicant, const RegistryId& reg,
                 const std::string& item, Amount stake) {
  auto rit = w.registries.find(reg);
  if (rit == w.registries.end()) return Error{Errc::UnknownRegistry, reg};
  Registry& r = rit->second;
  if (item.empty()) return Error{Errc::InvalidPayload, "empty item"};
  auto eit = r.entries.find(item);
  if (eit != r.entries.end() && eit->second.status != EntryStatus::Rejected)
    return Error{Errc::DuplicateEntry, item};
  if (stake < r.min_stake) return Error{Errc::InsufficientStake, item};
  if (auto s = tokens::transfer(w, applicant, r.stake_class, r.escrow, stake); !s.ok()) return s;

  RegistryEntry e;
  e.item = item;
  e.applicant = applicant;
  e.stake = stake;
  e.applied_at = w.tick;
  r.entries[item] = std::move(e);
  return ok_status();
}

Status tcr_challenge(WorldState& w, const AddressId& challenger, const RegistryId& reg,
                     const std::string& item, Amount stake) {
  auto rit = w.registries.find(reg);
  if (rit == w.registries.end()) return Error{Errc::UnknownRegistry, reg};
  Registry& r = rit->second;
  auto eit = r.entries.find(item);
  if (eit == r.entries.end()) return Error{Errc::UnknownRegistry, reg + "/" + item};
  RegistryEntry& e = eit->second;
  if (e.status != EntryStatus::Applied) return Error{Errc::AlreadyClosed, item};
  if (w.tick >= e.applied_at + r.apply_window)
    return Error{Errc::OutsideWindow, "challenge period over"};
  if (challenger == e.applicant) return Error{Errc::Unauthorized, "cannot challenge own entry"};
  if (stake != e.stake) return Error{Errc::InsufficientStake, "challenge must match the stake"};
  if (auto s = tokens::transfer(w, challenger, r.stake_class, r.escrow, stake); !s.ok()) return s;

  e.status = EntryStatus::Challenged;
  e.challenger = challenger;
  e.challenge_stake = stake;
  e.challenged_at = w.tick;
  return ok_status();
}

Status tcr_vote(WorldState& w, const AddressId& voter, const RegistryId& reg,
                const std::string& item, bool support, Amount tokens) {
  auto rit = w.registries.find(reg);
  if (rit == w.registries.end()) return Error{Errc::UnknownRegistry, reg};
  Registry& r = rit->second;
  auto eit = r.entries.find(item);
  if (eit == r.entries.end()) return Error{Errc::UnknownRegistry, reg + "/" + item};
  RegistryEntry& e = eit->second;
  if (e.status != EntryStatus::Challenged) return Error{Errc::AlreadyClosed, item};
  if (w.tick >= e.challenged_at + r.vote_window) return Error{Errc::OutsideWindow, item};
  if (is_machine(w, voter)) return Error{Errc::MachineVoter, "machines hold no vote"};
  if (tokens <= 0) return Error{Errc::ZeroSpend, "empty ballot"};
  if (e.votes.contains(voter)) return Error{Errc::DoubleVote, item};
  if (auto s = tokens::transfer(w, voter, r.stake_class, r.escrow, tokens); !s.ok()) return s;
  e.votes.emplace(voter, std::make_pair(support, tokens));
  return ok_status();
}

Result<TcrOutcome> tcr_resolve(WorldState& w, const RegistryId& reg, const std::string& item) {
  auto rit = w.registries.find(reg);
  if (rit == w.registries.end()) return Error{Errc::UnknownRegistry, reg};
  Registry& r = rit->second;
  auto eit = r.entries.find(item);
  if (eit == r.entries.end()) return Error{Errc::UnknownRegistry, reg + "/" + item};
  RegistryEntry& e = eit->second;

  if (e.status == EntryStatus::Applied) {
    if (w.tick < e.applied_at + r.apply_window)
      return Error{Errc::NotYetDeadline, "challenge period still open"};
    if (auto s = tokens::transfer(w, r.escrow, r.stake_class, e.applicant, e.stake); !s.ok())
      return s.error();
    e.status = EntryStatus::Admitted;
    return TcrOutcome{EntryStatus::Admitted, false};
  }
  if (e.status != EntryStatus::Challenged) return Error{Errc::AlreadyClosed, item};
  if (w.tick < e.challenged_at + r.vote_window)
    return Error{Errc::NotYetDeadline, "ballot still open"};

  Amount keep_w = 0;
  Amount out_w = 0;
  for (const auto& [voter, vote] : e.votes) (vote.first ? keep_w : out_w) += vote.second;
  bool keep = keep_w >= out_w;  // ties go to the applicant

  for (const auto& [voter, vote] : e.votes) {
    if (auto s = tokens::transfer(w, r.escrow, r.stake_class, voter, vote.second); !s.ok())
      return s.error();
  }

  const AddressId& winner = keep ? e.applicant : *e.challenger;
  Amount winner_stake = keep ? e.stake : e.challenge_stake;
  Amount forfeit = keep ? e.challenge_stake : e.stake;
  if (auto s = tokens::transfer(w, r.escrow, r.stake_class, winner, winner_stake); !s.ok())
    return s.error();

  // The loser's stake rewards the prevailing side pro rata: the winning
  // party by their stake, winning voters by ballot size.
  std::map<AddressId, Amount> weight;
  weight[winner] += winner_stake;
  for (const auto& [voter, vote] : e.votes)
    if (vote.first == keep) weight[voter] += vote.second;
  std::vector<std::pair<AddressId, Amount>> weights(weight.begin(), weight.end());
  for (const auto& pay : rules::largest_remainder(weights, forfeit)) {
    if (pay.amount == 0) continue;
    if (auto s = tokens::transfer(w, r.escrow, r.stake_class, pay.to, pay.amount); !s.ok())
      return s.error();
  }

  e.status = keep ? EntryStatus::Admitted : EntryStatus::Rejected;
  return TcrOutcome{e.status, true};
}

bool tcr_listed(const WorldState& w, const RegistryId& reg, const std::string& item) {
  auto rit = w.registries.find(reg);
  if (rit == w.registries.end()) return false;
  auto eit = rit->second.entries.find(item);
  return eit != rit->second.entries.end() && eit->second.status == EntryStatus::Admitted;
}

}  // namespace commons::voting
