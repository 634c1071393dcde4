#include "commons/engine.hpp"

#include <stdexcept>
#include <utility>

#include "commons/accountability.hpp"
#include "commons/enforcement.hpp"
#include "commons/enterprise.hpp"
#include "commons/market.hpp"
#include "commons/rules.hpp"
#include "commons/tokens.hpp"
#include "commons/treasury.hpp"
#include "commons/voting.hpp"

namespace commons {

namespace {

Status require_mechanism(const WorldState& w, int m) {
  if (w.mechanism_on(m)) return ok_status();
  return Error{Errc::MechanismDisabled, "M" + std::to_string(m)};
}

/// Scoped actions demand subtree membership while the guard mechanism is
/// on. Roles grant no bypass: enforcement power stays with the scope.
Status scope_guard(const WorldState& w, const AddressId& author,
                   const std::optional<NodeId>& scope) {
  if (!scope) return ok_status();
  if (!w.org.contains(*scope)) return Error{Errc::UnknownNode, *scope};
  if (!w.mechanism_on(13)) return ok_status();
  if (!enterprise::is_subtree_member(w, *scope, author))
    return Error{Errc::ScopeDenied, *scope};
  return ok_status();
}

Status require_admin(const WorldState& w, const AddressId& author) {
  if (tokens::has_role_global(w, author, "admin")) return ok_status();
  return Error{Errc::Unauthorized, "needs the global admin role"};
}

Status require_monitor(const WorldState& w, const AddressId& author,
                       const std::optional<NodeId>& scope) {
  if (scope) {
    if (w.org.contains(*scope) && tokens::has_role_at(w, author, "monitor", *scope)) return ok_status();
  } else if (tokens::has_role_global(w, author, "monitor")) {
    return ok_status();
  }
  return Error{Errc::Unauthorized, "needs the monitor role"};
}

/// Monitor role under any grant, used where the round itself is unscoped.
bool is_monitor_anywhere(const WorldState& w, const AddressId& author) {
  auto it = w.roles.grants.find("monitor");
  if (it == w.roles.grants.end()) return false;
  auto holder = it->second.find(author);
  return holder != it->second.end() && !holder->second.empty();
}

void fire_incentives(WorldState& w, const std::string& trigger,
                     const std::vector<AddressId>& credited) {
  for (const auto& [id, rule] : w.incentives) {
    if (rule.trigger != trigger) continue;
    if (w.fired_incentives.contains({id, w.applied})) continue;
    if (rule.reward_class == w.cfg.reputation_class && !w.mechanism_on(9)) continue;
    bool minted = false;
    for (const auto& who : credited) {
      auto it = w.addresses.find(who);
      if (it == w.addresses.end() || it->second.removed) continue;
      if (tokens::mint(w, rule.reward_class, who, rule.reward).ok()) minted = true;
    }
    if (minted) w.fired_incentives.insert({id, w.applied});
  }
}

Status advance_tick(WorldState& w, const AddressId& author, const TickAdvance& c) {
  if (c.tick != w.tick + 1) return Error{Errc::BadTick, "ticks advance by one"};
  w.tick = c.tick;

  auto missed = accountability::expire_commitments(w);
  if (w.mechanism_on(11)) {
    for (const auto& actor : missed) {
      auto rec = enforcement::record_violation(w, author, actor,
                                               ViolationKind::MissedCommitment, std::nullopt);
      if (!rec.ok()) return rec.error();
    }
  }

  for (auto& [id, p] : w.proposals) {
    if (p.status != ProposalStatus::Open) continue;
    if (p.scheme.kind != SchemeKind::Conviction) continue;
    Amount staked = 0;
    for (const auto& [backer, s] : p.conviction_stakes) staked += s;
    p.conviction = voting::conviction_step(p.scheme.alpha, p.conviction, staked);
  }

  for (auto it = w.reward_reductions.begin(); it != w.reward_reductions.end();) {
    if (it->second.until < w.tick)
      it = w.reward_reductions.erase(it);
    else
      ++it;
  }
  return ok_status();
}

Result<std::optional<NodeId>> proposal_scope(const WorldState& w, const ProposalId& id) {
  auto it = w.proposals.find(id);
  if (it == w.proposals.end()) return Error{Errc::UnknownProposal, id};
  return it->second.scope;
}

Result<std::optional<NodeId>> dispute_scope(const WorldState& w, const DisputeId& id) {
  auto it = w.disputes.find(id);
  if (it == w.disputes.end()) return Error{Errc::UnknownDispute, id};
  return it->second.scope;
}

}  // namespace

Status apply_command(WorldState& w, const AddressId& author, const Command& cmd) {
  if (!std::holds_alternative<TickAdvance>(cmd) && !tokens::check_access(w, author))
    return Error{Errc::AccessDenied, "author lacks access"};

  return std::visit(
      [&](const auto& c) -> Status {
        using T = std::decay_t<decltype(c)>;

        if constexpr (std::is_same_v<T, TickAdvance>) {
          return advance_tick(w, author, c);

        } else if constexpr (std::is_same_v<T, Mint>) {
          if (auto s = require_admin(w, author); !s.ok()) return s;
          return tokens::mint(w, c.cls, c.to, c.amount);
        } else if constexpr (std::is_same_v<T, Burn>) {
          if (auto s = require_admin(w, author); !s.ok()) return s;
          return tokens::burn(w, c.cls, c.from, c.amount);
        } else if constexpr (std::is_same_v<T, Transfer>) {
          return tokens::transfer(w, author, c.cls, c.to, c.amount);
        } else if constexpr (std::is_same_v<T, GrantRole>) {
          if (auto s = require_admin(w, author); !s.ok()) return s;
          return tokens::grant_role(w, c.holder, c.role, c.scope);
        } else if constexpr (std::is_same_v<T, RevokeRole>) {
          if (auto s = require_admin(w, author); !s.ok()) return s;
          return tokens::revoke_role(w, c.holder, c.role, c.scope);

        } else if constexpr (std::is_same_v<T, Deposit>) {
          return treasury::deposit(w, author, c.pool, c.amount);
        } else if constexpr (std::is_same_v<T, Withdraw>) {
          if (auto s = require_mechanism(w, 4); !s.ok()) return s;
          return treasury::withdraw(w, author, c.pool, c.to, c.amount, c.approval);
        } else if constexpr (std::is_same_v<T, UnguardedDraw>) {
          if (w.mechanism_on(4))
            return Error{Errc::Unauthorized, "draws are governed while rules are on"};
          return treasury::unguarded_draw(w, author, c.pool, c.amount);
        } else if constexpr (std::is_same_v<T, CurveBuy>) {
          if (auto s = require_mechanism(w, 2); !s.ok()) return s;
          auto r = treasury::curve_buy(w, author, c.curve, c.spend);
          return r.ok() ? ok_status() : Status{r.error()};
        } else if constexpr (std::is_same_v<T, CurveSell>) {
          if (auto s = require_mechanism(w, 2); !s.ok()) return s;
          auto r = treasury::curve_sell(w, author, c.curve, c.tokens);
          return r.ok() ? ok_status() : Status{r.error()};

        } else if constexpr (std::is_same_v<T, RequestAppropriation>) {
          if (auto s = require_mechanism(w, 4); !s.ok()) return s;
          auto r = rules::request_appropriation(w, author, c.rule, c.pool, c.amount);
          return r.ok() ? ok_status() : Status{r.error()};
        } else if constexpr (std::is_same_v<T, DistributeRewards>) {
          if (auto s = require_mechanism(w, 4); !s.ok()) return s;
          auto r = rules::distribute_rewards(w, author, c.policy, c.amount);
          return r.ok() ? ok_status() : Status{r.error()};

        } else if constexpr (std::is_same_v<T, PostTender>) {
          if (auto s = require_mechanism(w, 3); !s.ok()) return s;
          return market::post_tender(w, author, c.id, c.package, c.min_reputation,
                                     c.required_role, c.deadline, c.cancel_on_no_bids);
        } else if constexpr (std::is_same_v<T, SubmitBid>) {
          if (auto s = require_mechanism(w, 3); !s.ok()) return s;
          return market::submit_bid(w, author, c.tender, c.price);
        } else if constexpr (std::is_same_v<T, CloseAuction>) {
          if (auto s = require_mechanism(w, 3); !s.ok()) return s;
          auto r = market::close_auction(w, author, c.tender);
          return r.ok() ? ok_status() : Status{r.error()};

        } else if constexpr (std::is_same_v<T, OpenMarket>) {
          if (auto s = require_mechanism(w, 6); !s.ok()) return s;
          return market::open_market(w, author, c.id, c.question, c.outcomes, c.currency,
                                     c.fee_ppm, c.fee_pool);
        } else if constexpr (std::is_same_v<T, Bet>) {
          if (auto s = require_mechanism(w, 6); !s.ok()) return s;
          return market::bet(w, author, c.market, c.outcome, c.stake);
        } else if constexpr (std::is_same_v<T, ResolveMarket>) {
          if (auto s = require_mechanism(w, 6); !s.ok()) return s;
          return market::resolve(w, author, c.market, c.outcome);
        } else if constexpr (std::is_same_v<T, SettleMarket>) {
          if (auto s = require_mechanism(w, 6); !s.ok()) return s;
          auto r = market::settle(w, c.market);
          return r.ok() ? ok_status() : Status{r.error()};

        } else if constexpr (std::is_same_v<T, CreateProposal>) {
          if (auto s = require_mechanism(w, 5); !s.ok()) return s;
          std::optional<NodeId> eff = c.scope;
          if (!c.route_affected.empty()) {
            if (auto s = require_mechanism(w, 14); !s.ok()) return s;
            auto routed = enterprise::route_decision(w, c.decision_kind, c.route_affected);
            if (!routed.ok()) return routed.error();
            eff = routed.value();
          }
          if (auto s = scope_guard(w, author, eff); !s.ok()) return s;
          return voting::create_proposal(w, author, c);
        } else if constexpr (std::is_same_v<T, CastVote>) {
          if (auto s = require_mechanism(w, 5); !s.ok()) return s;
          auto scope = proposal_scope(w, c.proposal);
          if (!scope.ok()) return scope.error();
          if (auto s = scope_guard(w, author, scope.value()); !s.ok()) return s;
          return voting::cast_vote(w, author, c.proposal, c.support, c.tokens);
        } else if constexpr (std::is_same_v<T, Unstake>) {
          if (auto s = require_mechanism(w, 5); !s.ok()) return s;
          auto scope = proposal_scope(w, c.proposal);
          if (!scope.ok()) return scope.error();
          if (auto s = scope_guard(w, author, scope.value()); !s.ok()) return s;
          return voting::unstake(w, author, c.proposal);
        } else if constexpr (std::is_same_v<T, TallyProposal>) {
          if (auto s = require_mechanism(w, 5); !s.ok()) return s;
          auto scope = proposal_scope(w, c.proposal);
          if (!scope.ok()) return scope.error();
          if (auto s = scope_guard(w, author, scope.value()); !s.ok()) return s;
          auto r = voting::tally(w, author, c.proposal);
          return r.ok() ? ok_status() : Status{r.error()};
        } else if constexpr (std::is_same_v<T, ExecuteProposal>) {
          if (auto s = require_mechanism(w, 5); !s.ok()) return s;
          auto scope = proposal_scope(w, c.proposal);
          if (!scope.ok()) return scope.error();
          if (auto s = scope_guard(w, author, scope.value()); !s.ok()) return s;
          return voting::execute(w, c.proposal);
        } else if constexpr (std::is_same_v<T, EscalateProposal>) {
          if (auto s = require_mechanism(w, 5); !s.ok()) return s;
          if (auto s = require_mechanism(w, 14); !s.ok()) return s;
          auto scope = proposal_scope(w, c.proposal);
          if (!scope.ok()) return scope.error();
          if (auto s = scope_guard(w, author, scope.value()); !s.ok()) return s;
          return voting::escalate(w, author, c.proposal);

        } else if constexpr (std::is_same_v<T, TcrApply>) {
          if (auto s = require_mechanism(w, 5); !s.ok()) return s;
          return voting::tcr_apply(w, author, c.registry, c.item, c.stake);
        } else if constexpr (std::is_same_v<T, TcrChallenge>) {
          if (auto s = require_mechanism(w, 5); !s.ok()) return s;
          return voting::tcr_challenge(w, author, c.registry, c.item, c.stake);
        } else if constexpr (std::is_same_v<T, TcrVote>) {
          if (auto s = require_mechanism(w, 5); !s.ok()) return s;
          return voting::tcr_vote(w, author, c.registry, c.item, c.support, c.tokens);
        } else if constexpr (std::is_same_v<T, TcrResolve>) {
          if (auto s = require_mechanism(w, 5); !s.ok()) return s;
          auto r = voting::tcr_resolve(w, c.registry, c.item);
          return r.ok() ? ok_status() : Status{r.error()};

        } else if constexpr (std::is_same_v<T, Commit>) {
          if (auto s = require_mechanism(w, 8); !s.ok()) return s;
          return accountability::commit(w, author, c.id, c.package, c.promised_tick, c.terms);
        } else if constexpr (std::is_same_v<T, ReportComplete>) {
          if (auto s = require_mechanism(w, 8); !s.ok()) return s;
          if (auto s = accountability::report_complete(w, author, c.commitment); !s.ok())
            return s;
          fire_incentives(w, "on_time_completion", {author});
          return ok_status();
        } else if constexpr (std::is_same_v<T, OpenReview>) {
          if (auto s = require_mechanism(w, 10); !s.ok()) return s;
          if (!tokens::has_role_global(w, author, "monitor") && !is_monitor_anywhere(w, author))
            return Error{Errc::Unauthorized, "needs the monitor role"};
          return accountability::open_review(w, author, c.id, c.subjects, c.reviewers, c.pool,
                                             c.reward);
        } else if constexpr (std::is_same_v<T, SubmitScore>) {
          if (auto s = require_mechanism(w, 10); !s.ok()) return s;
          return accountability::submit_score(w, author, c.round, c.subject, c.score);
        } else if constexpr (std::is_same_v<T, SettleReview>) {
          if (auto s = require_mechanism(w, 10); !s.ok()) return s;
          return accountability::settle_review(w, c.round);
        } else if constexpr (std::is_same_v<T, PpcReport>) {
          // Transparency reporting stays available in every configuration.
          if (auto s = accountability::ppc_report(w, author, c); !s.ok()) return s;
          std::vector<AddressId> perfect;
          for (const auto& [actor, promised, completed] : c.rows)
            if (promised > 0 && completed == promised) perfect.push_back(actor);
          if (!perfect.empty()) fire_incentives(w, "ppc_perfect", perfect);
          return ok_status();

        } else if constexpr (std::is_same_v<T, RecordViolation>) {
          if (auto s = require_mechanism(w, 11); !s.ok()) return s;
          if (auto s = require_monitor(w, author, c.scope); !s.ok()) return s;
          if (auto s = scope_guard(w, author, c.scope); !s.ok()) return s;
          auto r = enforcement::record_violation(w, author, c.actor, c.kind, c.scope);
          return r.ok() ? ok_status() : Status{r.error()};
        } else if constexpr (std::is_same_v<T, ApplySanction>) {
          if (auto s = require_mechanism(w, 11); !s.ok()) return s;
          if (auto s = require_monitor(w, author, c.scope); !s.ok()) return s;
          if (auto s = scope_guard(w, author, c.scope); !s.ok()) return s;
          return enforcement::apply_sanction(w, c.actor, c.step, c.scope);

        } else if constexpr (std::is_same_v<T, OpenDispute>) {
          if (auto s = require_mechanism(w, 12); !s.ok()) return s;
          if (auto s = scope_guard(w, author, c.scope); !s.ok()) return s;
          return enforcement::open_dispute(w, author, c);
        } else if constexpr (std::is_same_v<T, StakeJuror>) {
          if (auto s = require_mechanism(w, 12); !s.ok()) return s;
          auto scope = dispute_scope(w, c.dispute);
          if (!scope.ok()) return scope.error();
          if (auto s = scope_guard(w, author, scope.value()); !s.ok()) return s;
          return enforcement::stake_juror(w, author, c.dispute, c.stake);
        } else if constexpr (std::is_same_v<T, VoteVerdict>) {
          if (auto s = require_mechanism(w, 12); !s.ok()) return s;
          auto scope = dispute_scope(w, c.dispute);
          if (!scope.ok()) return scope.error();
          if (auto s = scope_guard(w, author, scope.value()); !s.ok()) return s;
          return enforcement::vote_verdict(w, author, c.dispute, c.uphold);
        } else if constexpr (std::is_same_v<T, ResolveDispute>) {
          if (auto s = require_mechanism(w, 12); !s.ok()) return s;
          auto scope = dispute_scope(w, c.dispute);
          if (!scope.ok()) return scope.error();
          if (auto s = scope_guard(w, author, scope.value()); !s.ok()) return s;
          auto r = enforcement::resolve_dispute(w, c.dispute);
          return r.ok() ? ok_status() : Status{r.error()};

        } else if constexpr (std::is_same_v<T, Delegate>) {
          if (auto s = require_mechanism(w, 14); !s.ok()) return s;
          if (auto s = scope_guard(w, author, std::optional<NodeId>{c.from}); !s.ok()) return s;
          return enterprise::delegate(w, author, c.from, c.to, c.kind);
        } else {
          static_assert(std::is_same_v<T, RevokeDelegation>);
          if (auto s = require_mechanism(w, 14); !s.ok()) return s;
          if (auto s = scope_guard(w, author, std::optional<NodeId>{c.from}); !s.ok()) return s;
          return enterprise::revoke_delegation(w, author, c.from, c.to, c.kind);
        }
      },
      cmd);
}

Status fold_event(WorldState& w, const Digest32& genesis, const SignedEvent& ev) {
  auto author = w.addresses.find(ev.author);
  if (author == w.addresses.end() || !author->second.pubkey)
    return Error{Errc::UnknownAuthor, "author not in the address book"};
  Bytes pre = event_preimage(genesis, ev.seq, ev.author, ev.tick, ev.payload);
  if (!crypto::verify(pre, ev.sig, *author->second.pubkey))
    return Error{Errc::BadSignature, "event " + std::to_string(ev.seq)};
  if (ev.seq != w.applied)
    return Error{Errc::OutOfOrder, "expected seq " + std::to_string(w.applied)};
  if (ev.tick != w.tick) return Error{Errc::BadTick, "event tick off the clock"};

  if (auto s = apply_command(w, ev.author, ev.payload); !s.ok()) return s;
  w.applied += 1;
  return ok_status();
}

Engine::Engine(WorldState genesis)
    : genesis_state_(std::move(genesis)), state_(genesis_state_) {
  log_.genesis = state_hash(genesis_state_);
}

Status Engine::submit(const SignedEvent& ev) {
  WorldState next = state_;
  if (auto s = fold_event(next, log_.genesis, ev); !s.ok()) return s;
  state_ = std::move(next);
  log_.events.push_back(ev);
  return ok_status();
}

Result<SignedEvent> Engine::act(const Keystore& ks, const AddressId& author, Command cmd) {
  SignedEvent ev;
  ev.seq = state_.applied;
  ev.author = author;
  ev.tick = state_.tick;
  ev.payload = std::move(cmd);
  try {
    ev.sig = ks.sign(author, event_preimage(log_.genesis, ev.seq, ev.author, ev.tick, ev.payload));
  } catch (const std::out_of_range&) {
    return Error{Errc::UnknownAuthor, "no key in the store"};
  }
  if (auto s = submit(ev); !s.ok()) return s.error();
  return ev;
}

Result<WorldState> replay(const EventLog& log, WorldState genesis) {
  if (!(state_hash(genesis) == log.genesis))
    return Error{Errc::CorruptLog, "genesis digest does not match the log"};
  WorldState w = std::move(genesis);
  for (const auto& ev : log.events) {
    if (auto s = fold_event(w, log.genesis, ev); !s.ok())
      return Error{s.error().code,
                   "event " + std::to_string(ev.seq) + ": " + s.error().detail};
  }
  return w;
}

}  // namespace commons
