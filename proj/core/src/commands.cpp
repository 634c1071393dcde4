#include "commons/commands.hpp"

#include <utility>

namespace commons {
namespace {

void put_opt_str(CanonicalWriter& w, const std::optional<std::string>& v) {
  w.boolean(v.has_value());
  if (v) w.str(*v);
}

std::optional<std::string> get_opt_str(CanonicalReader& r) {
  if (!r.boolean()) return std::nullopt;
  return r.str();
}

void put_scope(CanonicalWriter& w, const RoleScope& s) { put_opt_str(w, s.node); }
RoleScope get_scope(CanonicalReader& r) { return RoleScope{get_opt_str(r)}; }

void put_addr(CanonicalWriter& w, const AddressId& a) { w.digest(a); }
AddressId get_addr(CanonicalReader& r) { return r.digest(); }

void put_clause(CanonicalWriter& w, const RuleClause& c) {
  w.u8(static_cast<std::uint8_t>(c.type));
  w.i64(c.amount);
  w.u64(c.period);
  w.str(c.role);
  w.str(c.token_class);
  w.u64(c.from);
  w.u64(c.to);
}

RuleClause get_clause(CanonicalReader& r) {
  RuleClause c;
  c.type = static_cast<ClauseType>(r.u8());
  c.amount = r.i64();
  c.period = r.u64();
  c.role = r.str();
  c.token_class = r.str();
  c.from = r.u64();
  c.to = r.u64();
  return c;
}

void put_program(CanonicalWriter& w, const RuleProgramDef& p) {
  w.str(p.id);
  w.u32(static_cast<std::uint32_t>(p.clauses.size()));
  for (const auto& c : p.clauses) put_clause(w, c);
}

RuleProgramDef get_program(CanonicalReader& r) {
  RuleProgramDef p;
  p.id = r.str();
  auto n = r.u32();
  p.clauses.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i) p.clauses.push_back(get_clause(r));
  return p;
}

void put_scheme(CanonicalWriter& w, const VoteScheme& s) {
  w.u8(static_cast<std::uint8_t>(s.kind));
  w.str(s.voting_class);
  w.u64(s.lock_duration);
  w.f64(s.alpha);
  w.f64(s.beta);
}

VoteScheme get_scheme(CanonicalReader& r) {
  VoteScheme s;
  s.kind = static_cast<SchemeKind>(r.u8());
  s.voting_class = r.str();
  s.lock_duration = r.u64();
  s.alpha = r.f64();
  s.beta = r.f64();
  return s;
}

}  // namespace

std::string_view violation_kind_name(ViolationKind k) {
  switch (k) {
    case ViolationKind::MissedCommitment: return "missed_commitment";
    case ViolationKind::RuleBreach: return "rule_breach";
    case ViolationKind::VerdictNonCompliance: return "verdict_noncompliance";
  }
  return "unknown";
}

void encode_action(CanonicalWriter& w, const ProposalAction& a) {
  w.u8(static_cast<std::uint8_t>(a.index()));
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, NoopAction>) {
        } else if constexpr (std::is_same_v<T, SpendAction>) {
          w.str(v.pool);
          put_addr(w, v.to);
          w.i64(v.amount);
        } else if constexpr (std::is_same_v<T, GrantRoleAction> ||
                             std::is_same_v<T, RevokeRoleAction>) {
          put_addr(w, v.holder);
          w.str(v.role);
          put_scope(w, v.scope);
        } else if constexpr (std::is_same_v<T, UpdateRuleAction>) {
          put_program(w, v.program);
        }
      },
      a);
}

ProposalAction decode_action(CanonicalReader& r) {
  switch (r.u8()) {
    case 0: return NoopAction{};
    case 1: {
      SpendAction v;
      v.pool = r.str();
      v.to = get_addr(r);
      v.amount = r.i64();
      return v;
    }
    case 2: {
      GrantRoleAction v;
      v.holder = get_addr(r);
      v.role = r.str();
      v.scope = get_scope(r);
      return v;
    }
    case 3: {
      RevokeRoleAction v;
      v.holder = get_addr(r);
      v.role = r.str();
      v.scope = get_scope(r);
      return v;
    }
    case 4: {
      UpdateRuleAction v;
      v.program = get_program(r);
      return v;
    }
    default: throw DecodeError("bad action tag");
  }
}

std::string_view command_kind_name(const Command& cmd) {
  return std::visit(
      [](const auto& v) -> std::string_view {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, TickAdvance>) return "tick";
        else if constexpr (std::is_same_v<T, Mint>) return "mint";
        else if constexpr (std::is_same_v<T, Burn>) return "burn";
        else if constexpr (std::is_same_v<T, Transfer>) return "transfer";
        else if constexpr (std::is_same_v<T, GrantRole>) return "grant_role";
        else if constexpr (std::is_same_v<T, RevokeRole>) return "revoke_role";
        else if constexpr (std::is_same_v<T, Deposit>) return "deposit";
        else if constexpr (std::is_same_v<T, Withdraw>) return "withdraw";
        else if constexpr (std::is_same_v<T, UnguardedDraw>) return "unguarded_draw";
        else if constexpr (std::is_same_v<T, CurveBuy>) return "curve_buy";
        else if constexpr (std::is_same_v<T, CurveSell>) return "curve_sell";
        else if constexpr (std::is_same_v<T, RequestAppropriation>) return "request_appropriation";
        else if constexpr (std::is_same_v<T, DistributeRewards>) return "distribute_rewards";
        else if constexpr (std::is_same_v<T, PostTender>) return "post_tender";
        else if constexpr (std::is_same_v<T, SubmitBid>) return "submit_bid";
        else if constexpr (std::is_same_v<T, CloseAuction>) return "close_auction";
        else if constexpr (std::is_same_v<T, OpenMarket>) return "open_market";
        else if constexpr (std::is_same_v<T, Bet>) return "bet";
        else if constexpr (std::is_same_v<T, ResolveMarket>) return "resolve_market";
        else if constexpr (std::is_same_v<T, SettleMarket>) return "settle_market";
        else if constexpr (std::is_same_v<T, CreateProposal>) return "create_proposal";
        else if constexpr (std::is_same_v<T, CastVote>) return "cast_vote";
        else if constexpr (std::is_same_v<T, Unstake>) return "unstake";
        else if constexpr (std::is_same_v<T, TallyProposal>) return "tally_proposal";
        else if constexpr (std::is_same_v<T, ExecuteProposal>) return "execute_proposal";
        else if constexpr (std::is_same_v<T, EscalateProposal>) return "escalate_proposal";
        else if constexpr (std::is_same_v<T, TcrApply>) return "tcr_apply";
        else if constexpr (std::is_same_v<T, TcrChallenge>) return "tcr_challenge";
        else if constexpr (std::is_same_v<T, TcrVote>) return "tcr_vote";
        else if constexpr (std::is_same_v<T, TcrResolve>) return "tcr_resolve";
        else if constexpr (std::is_same_v<T, Commit>) return "commit";
        else if constexpr (std::is_same_v<T, ReportComplete>) return "report_complete";
        else if constexpr (std::is_same_v<T, OpenReview>) return "open_review";
        else if constexpr (std::is_same_v<T, SubmitScore>) return "submit_score";
        else if constexpr (std::is_same_v<T, SettleReview>) return "settle_review";
        else if constexpr (std::is_same_v<T, PpcReport>) return "ppc_report";
        else if constexpr (std::is_same_v<T, RecordViolation>) return "record_violation";
        else if constexpr (std::is_same_v<T, ApplySanction>) return "apply_sanction";
        else if constexpr (std::is_same_v<T, OpenDispute>) return "open_dispute";
        else if constexpr (std::is_same_v<T, StakeJuror>) return "stake_juror";
        else if constexpr (std::is_same_v<T, VoteVerdict>) return "vote_verdict";
        else if constexpr (std::is_same_v<T, ResolveDispute>) return "resolve_dispute";
        else if constexpr (std::is_same_v<T, Delegate>) return "delegate";
        else if constexpr (std::is_same_v<T, RevokeDelegation>) return "revoke_delegation";
        else return "unknown";
      },
      cmd);
}

void encode_command(CanonicalWriter& w, const Command& cmd) {
  w.u16(static_cast<std::uint16_t>(cmd.index()));
  std::visit(
      [&](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, TickAdvance>) {
          w.u64(v.tick);
        } else if constexpr (std::is_same_v<T, Mint>) {
          w.str(v.cls);
          put_addr(w, v.to);
          w.i64(v.amount);
        } else if constexpr (std::is_same_v<T, Burn>) {
          w.str(v.cls);
          put_addr(w, v.from);
          w.i64(v.amount);
        } else if constexpr (std::is_same_v<T, Transfer>) {
          w.str(v.cls);
          put_addr(w, v.to);
          w.i64(v.amount);
        } else if constexpr (std::is_same_v<T, GrantRole> || std::is_same_v<T, RevokeRole>) {
          put_addr(w, v.holder);
          w.str(v.role);
          put_scope(w, v.scope);
        } else if constexpr (std::is_same_v<T, Deposit>) {
          w.str(v.pool);
          w.i64(v.amount);
        } else if constexpr (std::is_same_v<T, Withdraw>) {
          w.str(v.pool);
          put_addr(w, v.to);
          w.i64(v.amount);
          put_opt_str(w, v.approval);
        } else if constexpr (std::is_same_v<T, UnguardedDraw>) {
          w.str(v.pool);
          w.i64(v.amount);
        } else if constexpr (std::is_same_v<T, CurveBuy>) {
          w.str(v.curve);
          w.i64(v.spend);
        } else if constexpr (std::is_same_v<T, CurveSell>) {
          w.str(v.curve);
          w.i64(v.tokens);
        } else if constexpr (std::is_same_v<T, RequestAppropriation>) {
          w.str(v.rule);
          w.str(v.pool);
          w.i64(v.amount);
        } else if constexpr (std::is_same_v<T, DistributeRewards>) {
          w.str(v.policy);
          w.i64(v.amount);
        } else if constexpr (std::is_same_v<T, PostTender>) {
          w.str(v.id);
          w.digest(v.package);
          w.i64(v.min_reputation);
          put_opt_str(w, v.required_role);
          w.u64(v.deadline);
          w.boolean(v.cancel_on_no_bids);
        } else if constexpr (std::is_same_v<T, SubmitBid>) {
          w.str(v.tender);
          w.i64(v.price);
        } else if constexpr (std::is_same_v<T, CloseAuction>) {
          w.str(v.tender);
        } else if constexpr (std::is_same_v<T, OpenMarket>) {
          w.str(v.id);
          w.str(v.currency);
          w.digest(v.question);
          w.u32(static_cast<std::uint32_t>(v.outcomes.size()));
          for (const auto& o : v.outcomes) w.str(o);
          w.i64(v.fee_ppm);
          put_opt_str(w, v.fee_pool);
        } else if constexpr (std::is_same_v<T, Bet>) {
          w.str(v.market);
          w.str(v.outcome);
          w.i64(v.stake);
        } else if constexpr (std::is_same_v<T, ResolveMarket>) {
          w.str(v.market);
          w.str(v.outcome);
        } else if constexpr (std::is_same_v<T, SettleMarket>) {
          w.str(v.market);
        } else if constexpr (std::is_same_v<T, CreateProposal>) {
          w.str(v.id);
          encode_action(w, v.action);
          w.str(v.decision_kind);
          put_scheme(w, v.scheme);
          w.u64(v.window_len);
          w.u8(static_cast<std::uint8_t>(v.threshold_kind));
          w.f64(v.min_support);
          w.i64(v.threshold_amount);
          put_opt_str(w, v.scope);
          w.u32(static_cast<std::uint32_t>(v.route_affected.size()));
          for (const auto& a : v.route_affected) put_addr(w, a);
        } else if constexpr (std::is_same_v<T, CastVote>) {
          w.str(v.proposal);
          w.boolean(v.support);
          w.i64(v.tokens);
        } else if constexpr (std::is_same_v<T, Unstake>) {
          w.str(v.proposal);
        } else if constexpr (std::is_same_v<T, TallyProposal>) {
          w.str(v.proposal);
        } else if constexpr (std::is_same_v<T, ExecuteProposal>) {
          w.str(v.proposal);
        } else if constexpr (std::is_same_v<T, EscalateProposal>) {
          w.str(v.proposal);
          w.str(v.reason);
        } else if constexpr (std::is_same_v<T, TcrApply> || std::is_same_v<T, TcrChallenge>) {
          w.str(v.registry);
          w.str(v.item);
          w.i64(v.stake);
        } else if constexpr (std::is_same_v<T, TcrVote>) {
          w.str(v.registry);
          w.str(v.item);
          w.boolean(v.support);
          w.i64(v.tokens);
        } else if constexpr (std::is_same_v<T, TcrResolve>) {
          w.str(v.registry);
          w.str(v.item);
        } else if constexpr (std::is_same_v<T, Commit>) {
          w.str(v.id);
          w.digest(v.package);
          w.u64(v.promised_tick);
          put_opt_str(w, v.terms);
        } else if constexpr (std::is_same_v<T, ReportComplete>) {
          w.str(v.commitment);
        } else if constexpr (std::is_same_v<T, OpenReview>) {
          w.str(v.id);
          w.u32(static_cast<std::uint32_t>(v.subjects.size()));
          for (const auto& [who, what] : v.subjects) {
            put_addr(w, who);
            w.digest(what);
          }
          w.u32(static_cast<std::uint32_t>(v.reviewers.size()));
          for (const auto& a : v.reviewers) put_addr(w, a);
          w.str(v.pool);
          w.i64(v.reward);
        } else if constexpr (std::is_same_v<T, SubmitScore>) {
          w.str(v.round);
          put_addr(w, v.subject);
          w.u8(v.score);
        } else if constexpr (std::is_same_v<T, SettleReview>) {
          w.str(v.round);
        } else if constexpr (std::is_same_v<T, PpcReport>) {
          w.u64(v.period);
          w.u32(static_cast<std::uint32_t>(v.rows.size()));
          for (const auto& [who, promised, completed] : v.rows) {
            put_addr(w, who);
            w.i64(promised);
            w.i64(completed);
          }
        } else if constexpr (std::is_same_v<T, RecordViolation>) {
          put_addr(w, v.actor);
          w.u8(static_cast<std::uint8_t>(v.kind));
          put_opt_str(w, v.scope);
        } else if constexpr (std::is_same_v<T, ApplySanction>) {
          put_addr(w, v.actor);
          w.u32(v.step);
          put_opt_str(w, v.scope);
        } else if constexpr (std::is_same_v<T, OpenDispute>) {
          w.str(v.id);
          put_addr(w, v.defendant);
          w.digest(v.claim);
          put_opt_str(w, v.scope);
          w.boolean(v.remedy_violation);
        } else if constexpr (std::is_same_v<T, StakeJuror>) {
          w.str(v.dispute);
          w.i64(v.stake);
        } else if constexpr (std::is_same_v<T, VoteVerdict>) {
          w.str(v.dispute);
          w.boolean(v.uphold);
        } else if constexpr (std::is_same_v<T, ResolveDispute>) {
          w.str(v.dispute);
        } else if constexpr (std::is_same_v<T, Delegate> || std::is_same_v<T, RevokeDelegation>) {
          w.str(v.from);
          w.str(v.to);
          w.str(v.kind);
        }
      },
      cmd);
}

Command decode_command(CanonicalReader& r) {
  switch (r.u16()) {
    case 0: {
      TickAdvance v;
      v.tick = r.u64();
      return v;
    }
    case 1: {
      Mint v;
      v.cls = r.str();
      v.to = get_addr(r);
      v.amount = r.i64();
      return v;
    }
    case 2: {
      Burn v;
      v.cls = r.str();
      v.from = get_addr(r);
      v.amount = r.i64();
      return v;
    }
    case 3: {
      Transfer v;
      v.cls = r.str();
      v.to = get_addr(r);
      v.amount = r.i64();
      return v;
    }
    case 4: {
      GrantRole v;
      v.holder = get_addr(r);
      v.role = r.str();
      v.scope = get_scope(r);
      return v;
    }
    case 5: {
      RevokeRole v;
      v.holder = get_addr(r);
      v.role = r.str();
      v.scope = get_scope(r);
      return v;
    }
    case 6: {
      Deposit v;
      v.pool = r.str();
      v.amount = r.i64();
      return v;
    }
    case 7: {
      Withdraw v;
      v.pool = r.str();
      v.to = get_addr(r);
      v.amount = r.i64();
      v.approval = get_opt_str(r);
      return v;
    }
    case 8: {
      UnguardedDraw v;
      v.pool = r.str();
      v.amount = r.i64();
      return v;
    }
    case 9: {
      CurveBuy v;
      v.curve = r.str();
      v.spend = r.i64();
      return v;
    }
    case 10: {
      CurveSell v;
      v.curve = r.str();
      v.tokens = r.i64();
      return v;
    }
    case 11: {
      RequestAppropriation v;
      v.rule = r.str();
      v.pool = r.str();
      v.amount = r.i64();
      return v;
    }
    case 12: {
      DistributeRewards v;
      v.policy = r.str();
      v.amount = r.i64();
      return v;
    }
    case 13: {
      PostTender v;
      v.id = r.str();
      v.package = r.digest();
      v.min_reputation = r.i64();
      v.required_role = get_opt_str(r);
      v.deadline = r.u64();
      v.cancel_on_no_bids = r.boolean();
      return v;
    }
    case 14: {
      SubmitBid v;
      v.tender = r.str();
      v.price = r.i64();
      return v;
    }
    case 15: {
      CloseAuction v;
      v.tender = r.str();
      return v;
    }
    case 16: {
      OpenMarket v;
      v.id = r.str();
      v.currency = r.str();
      v.question = r.digest();
      auto n = r.u32();
      v.outcomes.reserve(n);
      for (std::uint32_t i = 0; i < n; ++i) v.outcomes.push_back(r.str());
      v.fee_ppm = r.i64();
      v.fee_pool = get_opt_str(r);
      return v;
    }
    case 17: {
      Bet v;
      v.market = r.str();
      v.outcome = r.str();
      v.stake = r.i64();
      return v;
    }
    case 18: {
      ResolveMarket v;
      v.market = r.str();
      v.outcome = r.str();
      return v;
    }
    case 19: {
      SettleMarket v;
      v.market = r.str();
      return v;
    }
    case 20: {
      CreateProposal v;
      v.id = r.str();
      v.action = decode_action(r);
      v.decision_kind = r.str();
      v.scheme = get_scheme(r);
      v.window_len = r.u64();
      v.threshold_kind = static_cast<ThresholdKind>(r.u8());
      v.min_support = r.f64();
      v.threshold_amount = r.i64();
      v.scope = get_opt_str(r);
      auto n = r.u32();
      v.route_affected.reserve(n);
      for (std::uint32_t i = 0; i < n; ++i) v.route_affected.push_back(get_addr(r));
      return v;
    }
    case 21: {
      CastVote v;
      v.proposal = r.str();
      v.support = r.boolean();
      v.tokens = r.i64();
      return v;
    }
    case 22: {
      Unstake v;
      v.proposal = r.str();
      return v;
    }
    case 23: {
      TallyProposal v;
      v.proposal = r.str();
      return v;
    }
    case 24: {
      ExecuteProposal v;
      v.proposal = r.str();
      return v;
    }
    case 25: {
      EscalateProposal v;
      v.proposal = r.str();
      v.reason = r.str();
      return v;
    }
    case 26: {
      TcrApply v;
      v.registry = r.str();
      v.item = r.str();
      v.stake = r.i64();
      return v;
    }
    case 27: {
      TcrChallenge v;
      v.registry = r.str();
      v.item = r.str();
      v.stake = r.i64();
      return v;
    }
    case 28: {
      TcrVote v;
      v.registry = r.str();
      v.item = r.str();
      v.support = r.boolean();
      v.tokens = r.i64();
      return v;
    }
    case 29: {
      TcrResolve v;
      v.registry = r.str();
      v.item = r.str();
      return v;
    }
    case 30: {
      Commit v;
      v.id = r.str();
      v.package = r.digest();
      v.promised_tick = r.u64();
      v.terms = get_opt_str(r);
      return v;
    }
    case 31: {
      ReportComplete v;
      v.commitment = r.str();
      return v;
    }
    case 32: {
      OpenReview v;
      v.id = r.str();
      auto ns = r.u32();
      v.subjects.reserve(ns);
      for (std::uint32_t i = 0; i < ns; ++i) {
        auto who = get_addr(r);
        auto what = r.digest();
        v.subjects.emplace_back(who, what);
      }
      auto nr = r.u32();
      v.reviewers.reserve(nr);
      for (std::uint32_t i = 0; i < nr; ++i) v.reviewers.push_back(get_addr(r));
      v.pool = r.str();
      v.reward = r.i64();
      return v;
    }
    case 33: {
      SubmitScore v;
      v.round = r.str();
      v.subject = get_addr(r);
      v.score = r.u8();
      return v;
    }
    case 34: {
      SettleReview v;
      v.round = r.str();
      return v;
    }
    case 35: {
      PpcReport v;
      v.period = r.u64();
      auto n = r.u32();
      v.rows.reserve(n);
      for (std::uint32_t i = 0; i < n; ++i) {
        auto who = get_addr(r);
        auto promised = r.i64();
        auto completed = r.i64();
        v.rows.emplace_back(who, promised, completed);
      }
      return v;
    }
    case 36: {
      RecordViolation v;
      v.actor = get_addr(r);
      v.kind = static_cast<ViolationKind>(r.u8());
      v.scope = get_opt_str(r);
      return v;
    }
    case 37: {
      ApplySanction v;
      v.actor = get_addr(r);
      v.step = r.u32();
      v.scope = get_opt_str(r);
      return v;
    }
    case 38: {
      OpenDispute v;
      v.id = r.str();
      v.defendant = get_addr(r);
      v.claim = r.digest();
      v.scope = get_opt_str(r);
      v.remedy_violation = r.boolean();
      return v;
    }
    case 39: {
      StakeJuror v;
      v.dispute = r.str();
      v.stake = r.i64();
      return v;
    }
    case 40: {
      VoteVerdict v;
      v.dispute = r.str();
      v.uphold = r.boolean();
      return v;
    }
    case 41: {
      ResolveDispute v;
      v.dispute = r.str();
      return v;
    }
    case 42: {
      Delegate v;
      v.from = r.str();
      v.to = r.str();
      v.kind = r.str();
      return v;
    }
    case 43: {
      RevokeDelegation v;
      v.from = r.str();
      v.to = r.str();
      v.kind = r.str();
      return v;
    }
    default: throw DecodeError("bad command tag");
  }
}

}  // namespace commons
