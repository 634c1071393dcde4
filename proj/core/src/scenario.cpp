#include "commons/scenario.hpp"

#include <algorithm>
#include <cassert>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "json.hpp"

#include "commons/support/crypto.hpp"
#include "commons/tokens.hpp"

namespace commons {

std::string_view policy_kind_name(PolicyKind k) {
  switch (k) {
    case PolicyKind::Honest: return "honest";
    case PolicyKind::Opportunistic: return "opportunistic";
    case PolicyKind::Deterrable: return "deterrable";
  }
  return "honest";
}

namespace scenario {
namespace {

using nlohmann::json;

struct ParseFail {
  std::string msg;
};

/// A JSON value plus the dotted path that reached it; every error message
/// starts with the path.
struct Cur {
  const json* j = nullptr;
  std::string path;
};

[[noreturn]] void fail(const Cur& c, const std::string& msg) { throw ParseFail{c.path + ": " + msg}; }

void want_object(const Cur& c) {
  if (!c.j->is_object()) fail(c, "expected an object");
}

Cur field(const Cur& c, const char* key) {
  want_object(c);
  auto it = c.j->find(key);
  if (it == c.j->end() || it->is_null()) fail(c, std::string("missing field \"") + key + '"');
  return Cur{&*it, c.path + "." + key};
}

std::optional<Cur> opt(const Cur& c, const char* key) {
  want_object(c);
  auto it = c.j->find(key);
  if (it == c.j->end() || it->is_null()) return std::nullopt;
  return Cur{&*it, c.path + "." + key};
}

void known_keys(const Cur& c, std::initializer_list<const char*> allowed) {
  want_object(c);
  for (const auto& [k, v] : c.j->items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || (k == a);
    if (!ok) fail(c, "unknown field \"" + k + '"');
  }
}

template <typename F>
void each(const Cur& c, F&& f) {
  if (!c.j->is_array()) fail(c, "expected an array");
  for (std::size_t i = 0; i < c.j->size(); ++i)
    f(Cur{&(*c.j)[i], c.path + "[" + std::to_string(i) + "]"});
}

std::string as_str(const Cur& c) {
  if (!c.j->is_string()) fail(c, "expected a string");
  return c.j->get<std::string>();
}

std::string as_id(const Cur& c) {
  auto s = as_str(c);
  if (s.empty()) fail(c, "must not be empty");
  return s;
}

bool as_bool(const Cur& c) {
  if (!c.j->is_boolean()) fail(c, "expected a boolean");
  return c.j->get<bool>();
}

std::uint64_t as_u64(const Cur& c) {
  if (!c.j->is_number_unsigned()) fail(c, "expected an unsigned integer");
  return c.j->get<std::uint64_t>();
}

std::int64_t as_i64(const Cur& c) {
  if (c.j->is_number_unsigned()) {
    auto u = c.j->get<std::uint64_t>();
    if (u > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max()))
      fail(c, "integer out of range");
    return static_cast<std::int64_t>(u);
  }
  if (!c.j->is_number_integer()) fail(c, "expected an integer");
  return c.j->get<std::int64_t>();
}

Amount as_nonneg(const Cur& c) {
  auto v = as_i64(c);
  if (v < 0) fail(c, "must be >= 0");
  return v;
}

Amount as_positive(const Cur& c) {
  auto v = as_i64(c);
  if (v <= 0) fail(c, "must be > 0");
  return v;
}

Ppm as_ppm(const Cur& c) {
  auto v = as_i64(c);
  if (v < 0 || v > kPpmOne) fail(c, "expected parts-per-million in [0, 1000000]");
  return v;
}

double as_double(const Cur& c) {
  if (!c.j->is_number()) fail(c, "expected a number");
  return c.j->get<double>();
}

/// Free-text identifiers (work packages, claims, questions) are committed
/// to the ledger as their hash.
Digest32 as_digest(const Cur& c) { return crypto::sha256(as_id(c)); }

/// Declared names, collected before the script is parsed so every
/// reference can be checked where runtime creation is impossible.
struct Names {
  std::uint64_t seed = 0;
  std::map<std::string, AddressId> actors;
  std::set<ClassId> classes;
  std::set<PoolId> pools;
  std::set<CurveId> curves;
  std::set<PolicyId> policies;
  std::set<RegistryId> registries;
  std::set<NodeId> nodes;
};

AddressId as_actor(const Cur& c, const Names& n) {
  auto name = as_id(c);
  auto it = n.actors.find(name);
  if (it == n.actors.end()) fail(c, "unknown actor \"" + name + '"');
  return it->second;
}

ClassId as_class(const Cur& c, const Names& n) {
  auto id = as_id(c);
  if (!n.classes.count(id)) fail(c, "unknown class \"" + id + '"');
  return id;
}

PoolId as_pool(const Cur& c, const Names& n) {
  auto id = as_id(c);
  if (!n.pools.count(id)) fail(c, "unknown pool \"" + id + '"');
  return id;
}

NodeId as_node(const Cur& c, const Names& n) {
  auto id = as_id(c);
  if (!n.nodes.count(id)) fail(c, "unknown node \"" + id + '"');
  return id;
}

std::optional<NodeId> opt_scope(const Cur& c, const Names& n) {
  auto sc = opt(c, "scope");
  if (!sc) return std::nullopt;
  return as_node(*sc, n);
}

RoleScope as_role_scope(const Cur& c, const Names& n) {
  if (auto sc = opt_scope(c, n)) return node_scope(*sc);
  return global_scope();
}

RuleClause parse_clause(const Cur& c, const Names& n) {
  RuleClause out;
  auto type = as_id(field(c, "type"));
  if (type == "per_actor_cap") {
    known_keys(c, {"type", "amount", "period"});
    out.type = ClauseType::PerActorCap;
    out.amount = as_nonneg(field(c, "amount"));
    out.period = as_u64(field(c, "period"));
    if (out.period == 0) fail(field(c, "period"), "must be > 0");
  } else if (type == "per_role_allowance") {
    known_keys(c, {"type", "role", "amount", "period"});
    out.type = ClauseType::PerRoleAllowance;
    out.role = as_id(field(c, "role"));
    out.amount = as_nonneg(field(c, "amount"));
    out.period = as_u64(field(c, "period"));
    if (out.period == 0) fail(field(c, "period"), "must be > 0");
  } else if (type == "pool_floor") {
    known_keys(c, {"type", "amount"});
    out.type = ClauseType::PoolFloor;
    out.amount = as_nonneg(field(c, "amount"));
  } else if (type == "time_window") {
    known_keys(c, {"type", "from", "to"});
    out.type = ClauseType::TimeWindow;
    out.from = as_u64(field(c, "from"));
    out.to = as_u64(field(c, "to"));
    if (out.to < out.from) fail(field(c, "to"), "must be >= from");
  } else if (type == "require_role") {
    known_keys(c, {"type", "role"});
    out.type = ClauseType::RequireRole;
    out.role = as_id(field(c, "role"));
  } else if (type == "require_token") {
    known_keys(c, {"type", "token_class", "amount"});
    out.type = ClauseType::RequireToken;
    out.token_class = as_class(field(c, "token_class"), n);
    out.amount = as_nonneg(field(c, "amount"));
  } else {
    fail(field(c, "type"), "unknown clause type \"" + type + '"');
  }
  return out;
}

RuleProgramDef parse_rule(const Cur& c, const Names& n) {
  known_keys(c, {"id", "clauses"});
  RuleProgramDef def;
  def.id = as_id(field(c, "id"));
  each(field(c, "clauses"), [&](const Cur& cl) { def.clauses.push_back(parse_clause(cl, n)); });
  return def;
}

VoteScheme parse_scheme(const Cur& c, const Names& n) {
  known_keys(c, {"kind", "voting_class", "lock_duration", "alpha", "beta"});
  VoteScheme s;
  auto kind = as_id(field(c, "kind"));
  if (kind == "token_weighted") {
    s.kind = SchemeKind::TokenWeighted;
  } else if (kind == "quadratic_lock") {
    s.kind = SchemeKind::QuadraticLock;
  } else if (kind == "conviction") {
    s.kind = SchemeKind::Conviction;
  } else {
    fail(field(c, "kind"), "unknown scheme \"" + kind + '"');
  }
  s.voting_class = as_class(field(c, "voting_class"), n);
  if (auto f = opt(c, "lock_duration")) s.lock_duration = as_u64(*f);
  if (auto f = opt(c, "alpha")) {
    s.alpha = as_double(*f);
    if (!(s.alpha >= 0.0 && s.alpha < 1.0)) fail(*f, "must be in [0, 1)");
  }
  if (auto f = opt(c, "beta")) {
    s.beta = as_double(*f);
    if (!(s.beta > 0.0)) fail(*f, "must be > 0");
  }
  return s;
}

ProposalAction parse_action(const Cur& c, const Names& n) {
  auto kind = as_id(field(c, "kind"));
  if (kind == "noop") {
    known_keys(c, {"kind"});
    return NoopAction{};
  }
  if (kind == "spend") {
    known_keys(c, {"kind", "pool", "to", "amount"});
    SpendAction a;
    a.pool = as_pool(field(c, "pool"), n);
    a.to = as_actor(field(c, "to"), n);
    a.amount = as_positive(field(c, "amount"));
    return a;
  }
  if (kind == "grant_role") {
    known_keys(c, {"kind", "holder", "role", "scope"});
    GrantRoleAction a;
    a.holder = as_actor(field(c, "holder"), n);
    a.role = as_id(field(c, "role"));
    a.scope = as_role_scope(c, n);
    return a;
  }
  if (kind == "revoke_role") {
    known_keys(c, {"kind", "holder", "role", "scope"});
    RevokeRoleAction a;
    a.holder = as_actor(field(c, "holder"), n);
    a.role = as_id(field(c, "role"));
    a.scope = as_role_scope(c, n);
    return a;
  }
  if (kind == "update_rule") {
    known_keys(c, {"kind", "rule"});
    return UpdateRuleAction{parse_rule(field(c, "rule"), n)};
  }
  fail(field(c, "kind"), "unknown action \"" + kind + '"');
}

ViolationKind parse_violation(const Cur& c) {
  auto v = as_id(c);
  if (v == "missed_commitment") return ViolationKind::MissedCommitment;
  if (v == "rule_breach") return ViolationKind::RuleBreach;
  if (v == "verdict_non_compliance") return ViolationKind::VerdictNonCompliance;
  fail(c, "unknown violation kind \"" + v + '"');
}

/// Script entries are flat: `at`, `author`, `kind`, then the command's own
/// fields. Objects the script itself creates (proposals, tenders, markets,
/// disputes) are referenced by plain id and checked at run time.
Command parse_command(const Cur& c, const Names& n) {
  auto kind = as_id(field(c, "kind"));
  auto keys = [&](std::initializer_list<const char*> extra) {
    std::vector<const char*> all{"at", "author", "kind"};
    all.insert(all.end(), extra.begin(), extra.end());
    want_object(c);
    for (const auto& [k, v] : c.j->items()) {
      bool ok = false;
      for (const char* a : all) ok = ok || (k == a);
      if (!ok) fail(c, "unknown field \"" + k + '"');
    }
  };

  if (kind == "mint") {
    keys({"cls", "to", "amount"});
    return Mint{as_class(field(c, "cls"), n), as_actor(field(c, "to"), n),
                as_positive(field(c, "amount"))};
  }
  if (kind == "burn") {
    keys({"cls", "from", "amount"});
    return Burn{as_class(field(c, "cls"), n), as_actor(field(c, "from"), n),
                as_positive(field(c, "amount"))};
  }
  if (kind == "transfer") {
    keys({"cls", "to", "amount"});
    return Transfer{as_class(field(c, "cls"), n), as_actor(field(c, "to"), n),
                    as_positive(field(c, "amount"))};
  }
  if (kind == "grant_role") {
    keys({"holder", "role", "scope"});
    return GrantRole{as_actor(field(c, "holder"), n), as_id(field(c, "role")),
                     as_role_scope(c, n)};
  }
  if (kind == "revoke_role") {
    keys({"holder", "role", "scope"});
    return RevokeRole{as_actor(field(c, "holder"), n), as_id(field(c, "role")),
                      as_role_scope(c, n)};
  }
  if (kind == "deposit") {
    keys({"pool", "amount"});
    return Deposit{as_pool(field(c, "pool"), n), as_positive(field(c, "amount"))};
  }
  if (kind == "withdraw") {
    keys({"pool", "to", "amount", "approval"});
    Withdraw w;
    w.pool = as_pool(field(c, "pool"), n);
    w.to = as_actor(field(c, "to"), n);
    w.amount = as_positive(field(c, "amount"));
    if (auto f = opt(c, "approval")) w.approval = as_id(*f);
    return w;
  }
  if (kind == "unguarded_draw") {
    keys({"pool", "amount"});
    return UnguardedDraw{as_pool(field(c, "pool"), n), as_positive(field(c, "amount"))};
  }
  if (kind == "curve_buy" || kind == "curve_sell") {
    keys({"curve", kind == "curve_buy" ? "spend" : "tokens"});
    auto curve = as_id(field(c, "curve"));
    if (!n.curves.count(curve)) fail(field(c, "curve"), "unknown curve \"" + curve + '"');
    if (kind == "curve_buy") return CurveBuy{curve, as_positive(field(c, "spend"))};
    return CurveSell{curve, as_positive(field(c, "tokens"))};
  }
  if (kind == "request_appropriation") {
    keys({"rule", "pool", "amount"});
    return RequestAppropriation{as_id(field(c, "rule")), as_pool(field(c, "pool"), n),
                                as_positive(field(c, "amount"))};
  }
  if (kind == "distribute_rewards") {
    keys({"policy", "amount"});
    auto policy = as_id(field(c, "policy"));
    if (!n.policies.count(policy)) fail(field(c, "policy"), "unknown policy \"" + policy + '"');
    return DistributeRewards{policy, as_positive(field(c, "amount"))};
  }
  if (kind == "post_tender") {
    keys({"id", "package", "min_reputation", "required_role", "deadline", "cancel_on_no_bids"});
    PostTender t;
    t.id = as_id(field(c, "id"));
    t.package = as_digest(field(c, "package"));
    if (auto f = opt(c, "min_reputation")) t.min_reputation = as_nonneg(*f);
    if (auto f = opt(c, "required_role")) t.required_role = as_id(*f);
    t.deadline = as_u64(field(c, "deadline"));
    if (auto f = opt(c, "cancel_on_no_bids")) t.cancel_on_no_bids = as_bool(*f);
    return t;
  }
  if (kind == "submit_bid") {
    keys({"tender", "price"});
    return SubmitBid{as_id(field(c, "tender")), as_positive(field(c, "price"))};
  }
  if (kind == "close_auction") {
    keys({"tender"});
    return CloseAuction{as_id(field(c, "tender"))};
  }
  if (kind == "open_market") {
    keys({"id", "currency", "question", "outcomes", "fee_ppm", "fee_pool"});
    OpenMarket m;
    m.id = as_id(field(c, "id"));
    m.currency = as_class(field(c, "currency"), n);
    m.question = as_digest(field(c, "question"));
    each(field(c, "outcomes"), [&](const Cur& o) { m.outcomes.push_back(as_id(o)); });
    if (auto f = opt(c, "fee_ppm")) m.fee_ppm = as_ppm(*f);
    if (auto f = opt(c, "fee_pool")) m.fee_pool = as_pool(*f, n);
    return m;
  }
  if (kind == "bet") {
    keys({"market", "outcome", "stake"});
    return Bet{as_id(field(c, "market")), as_id(field(c, "outcome")),
               as_positive(field(c, "stake"))};
  }
  if (kind == "resolve_market") {
    keys({"market", "outcome"});
    return ResolveMarket{as_id(field(c, "market")), as_id(field(c, "outcome"))};
  }
  if (kind == "settle_market") {
    keys({"market"});
    return SettleMarket{as_id(field(c, "market"))};
  }
  if (kind == "create_proposal") {
    keys({"id", "action", "decision_kind", "scheme", "window_len", "threshold_kind",
          "min_support", "threshold_amount", "scope", "route_affected"});
    CreateProposal p;
    p.id = as_id(field(c, "id"));
    p.action = parse_action(field(c, "action"), n);
    p.decision_kind = as_id(field(c, "decision_kind"));
    p.scheme = parse_scheme(field(c, "scheme"), n);
    if (auto f = opt(c, "window_len")) p.window_len = as_u64(*f);
    if (auto f = opt(c, "threshold_kind")) {
      auto t = as_id(*f);
      if (t == "majority")
        p.threshold_kind = ThresholdKind::Majority;
      else if (t == "min_support")
        p.threshold_kind = ThresholdKind::MinSupport;
      else
        fail(*f, "unknown threshold \"" + t + '"');
    }
    if (auto f = opt(c, "min_support")) {
      p.min_support = as_double(*f);
      if (p.min_support < 0.0) fail(*f, "must be >= 0");
    }
    if (auto f = opt(c, "threshold_amount")) p.threshold_amount = as_nonneg(*f);
    p.scope = opt_scope(c, n);
    if (auto f = opt(c, "route_affected"))
      each(*f, [&](const Cur& a) { p.route_affected.push_back(as_actor(a, n)); });
    if (p.scope && !p.route_affected.empty())
      fail(c, "scope and route_affected are mutually exclusive");
    return p;
  }
  if (kind == "cast_vote") {
    keys({"proposal", "support", "tokens"});
    CastVote v;
    v.proposal = as_id(field(c, "proposal"));
    if (auto f = opt(c, "support")) v.support = as_bool(*f);
    v.tokens = as_positive(field(c, "tokens"));
    return v;
  }
  if (kind == "unstake") {
    keys({"proposal"});
    return Unstake{as_id(field(c, "proposal"))};
  }
  if (kind == "tally_proposal") {
    keys({"proposal"});
    return TallyProposal{as_id(field(c, "proposal"))};
  }
  if (kind == "execute_proposal") {
    keys({"proposal"});
    return ExecuteProposal{as_id(field(c, "proposal"))};
  }
  if (kind == "escalate_proposal") {
    keys({"proposal", "reason"});
    EscalateProposal e;
    e.proposal = as_id(field(c, "proposal"));
    if (auto f = opt(c, "reason")) e.reason = as_str(*f);
    return e;
  }
  if (kind == "tcr_apply" || kind == "tcr_challenge") {
    keys({"registry", "item", "stake"});
    auto reg = as_id(field(c, "registry"));
    if (!n.registries.count(reg)) fail(field(c, "registry"), "unknown registry \"" + reg + '"');
    auto item = as_id(field(c, "item"));
    auto stake = as_positive(field(c, "stake"));
    if (kind == "tcr_apply") return TcrApply{reg, item, stake};
    return TcrChallenge{reg, item, stake};
  }
  if (kind == "tcr_vote") {
    keys({"registry", "item", "support", "tokens"});
    auto reg = as_id(field(c, "registry"));
    if (!n.registries.count(reg)) fail(field(c, "registry"), "unknown registry \"" + reg + '"');
    TcrVote v;
    v.registry = reg;
    v.item = as_id(field(c, "item"));
    if (auto f = opt(c, "support")) v.support = as_bool(*f);
    v.tokens = as_positive(field(c, "tokens"));
    return v;
  }
  if (kind == "tcr_resolve") {
    keys({"registry", "item"});
    auto reg = as_id(field(c, "registry"));
    if (!n.registries.count(reg)) fail(field(c, "registry"), "unknown registry \"" + reg + '"');
    return TcrResolve{reg, as_id(field(c, "item"))};
  }
  if (kind == "commit") {
    keys({"id", "package", "promised_tick", "terms"});
    Commit cm;
    cm.id = as_id(field(c, "id"));
    cm.package = as_digest(field(c, "package"));
    cm.promised_tick = as_u64(field(c, "promised_tick"));
    if (auto f = opt(c, "terms")) cm.terms = as_id(*f);
    return cm;
  }
  if (kind == "report_complete") {
    keys({"commitment"});
    return ReportComplete{as_id(field(c, "commitment"))};
  }
  if (kind == "open_review") {
    keys({"id", "subjects", "reviewers", "pool", "reward"});
    OpenReview r;
    r.id = as_id(field(c, "id"));
    each(field(c, "subjects"), [&](const Cur& s) {
      known_keys(s, {"actor", "contribution"});
      r.subjects.emplace_back(as_actor(field(s, "actor"), n), as_digest(field(s, "contribution")));
    });
    each(field(c, "reviewers"), [&](const Cur& a) { r.reviewers.push_back(as_actor(a, n)); });
    r.pool = as_pool(field(c, "pool"), n);
    r.reward = as_nonneg(field(c, "reward"));
    return r;
  }
  if (kind == "submit_score") {
    keys({"round", "subject", "score"});
    SubmitScore s;
    s.round = as_id(field(c, "round"));
    s.subject = as_actor(field(c, "subject"), n);
    auto sc = as_nonneg(field(c, "score"));
    if (sc > 100) fail(field(c, "score"), "must be in [0, 100]");
    s.score = static_cast<std::uint8_t>(sc);
    return s;
  }
  if (kind == "settle_review") {
    keys({"round"});
    return SettleReview{as_id(field(c, "round"))};
  }
  if (kind == "ppc_report") {
    keys({"period", "rows"});
    PpcReport r;
    r.period = as_u64(field(c, "period"));
    each(field(c, "rows"), [&](const Cur& row) {
      known_keys(row, {"actor", "promised", "completed"});
      r.rows.emplace_back(as_actor(field(row, "actor"), n), as_nonneg(field(row, "promised")),
                          as_nonneg(field(row, "completed")));
    });
    return r;
  }
  if (kind == "record_violation") {
    keys({"actor", "violation", "scope"});
    return RecordViolation{as_actor(field(c, "actor"), n), parse_violation(field(c, "violation")),
                           opt_scope(c, n)};
  }
  if (kind == "apply_sanction") {
    keys({"actor", "step", "scope"});
    ApplySanction s;
    s.actor = as_actor(field(c, "actor"), n);
    s.step = static_cast<std::uint32_t>(as_nonneg(field(c, "step")));
    s.scope = opt_scope(c, n);
    return s;
  }
  if (kind == "open_dispute") {
    keys({"id", "defendant", "claim", "scope", "remedy_violation"});
    OpenDispute d;
    d.id = as_id(field(c, "id"));
    d.defendant = as_actor(field(c, "defendant"), n);
    d.claim = as_digest(field(c, "claim"));
    d.scope = opt_scope(c, n);
    if (auto f = opt(c, "remedy_violation")) d.remedy_violation = as_bool(*f);
    return d;
  }
  if (kind == "stake_juror") {
    keys({"dispute", "stake"});
    return StakeJuror{as_id(field(c, "dispute")), as_positive(field(c, "stake"))};
  }
  if (kind == "vote_verdict") {
    keys({"dispute", "uphold"});
    VoteVerdict v;
    v.dispute = as_id(field(c, "dispute"));
    if (auto f = opt(c, "uphold")) v.uphold = as_bool(*f);
    return v;
  }
  if (kind == "resolve_dispute") {
    keys({"dispute"});
    return ResolveDispute{as_id(field(c, "dispute"))};
  }
  if (kind == "delegate" || kind == "revoke_delegation") {
    keys({"from", "to", "decision"});
    auto from = as_node(field(c, "from"), n);
    auto to = as_node(field(c, "to"), n);
    auto decision = as_id(field(c, "decision"));
    if (kind == "delegate") return Delegate{from, to, decision};
    return RevokeDelegation{from, to, decision};
  }
  fail(field(c, "kind"), "unknown command \"" + kind + '"');
}

SanctionStep parse_step(const Cur& c) {
  auto kind = as_id(field(c, "kind"));
  if (kind == "warning") {
    known_keys(c, {"kind"});
    return WarningStep{};
  }
  if (kind == "reputation_slash") {
    known_keys(c, {"kind", "share_ppm"});
    return ReputationSlashStep{as_ppm(field(c, "share_ppm"))};
  }
  if (kind == "reward_share_reduction") {
    known_keys(c, {"kind", "share_ppm"});
    return RewardShareReductionStep{as_ppm(field(c, "share_ppm"))};
  }
  if (kind == "removal") {
    known_keys(c, {"kind"});
    return RemovalStep{};
  }
  fail(field(c, "kind"), "unknown sanction step \"" + kind + '"');
}

Scenario parse_doc(const json& doc, const std::string& text,
                   std::optional<std::uint64_t> seed_override) {
  Cur root{&doc, "$"};
  known_keys(root, {"name", "seed", "ticks", "mechanisms", "config", "classes", "actors", "pools",
                    "curves", "rules", "policies", "incentives", "registries", "org", "agents",
                    "project", "script"});

  Scenario s;
  s.source_digest = crypto::sha256(text);
  s.name = as_id(field(root, "name"));
  s.seed = seed_override.value_or(as_u64(field(root, "seed")));
  s.ticks = as_u64(field(root, "ticks"));

  s.mech.fill(true);
  s.mech[0] = false;
  if (auto mechs = opt(root, "mechanisms")) {
    want_object(*mechs);
    for (const auto& [k, v] : mechs->j->items()) {
      Cur mc{&v, mechs->path + "." + k};
      int m = parse_mechanism(k);
      if (m == 0) fail(*mechs, "unknown mechanism \"" + k + '"');
      bool on = as_bool(mc);
      if (m == 7 && !on) fail(mc, "M7 cannot be disabled");
      s.mech[m] = on;
    }
  }

  Names n;
  n.seed = s.seed;
  n.actors.emplace(std::string(kSchedulerName), actor_address(s.seed, std::string(kSchedulerName)));

  if (auto classes = opt(root, "classes")) {
    each(*classes, [&](const Cur& c) {
      known_keys(c, {"id", "display", "transferable"});
      ClassSpec spec;
      spec.id = as_id(field(c, "id"));
      if (!n.classes.insert(spec.id).second) fail(field(c, "id"), "duplicate class");
      spec.display = as_str(field(c, "display"));
      if (auto f = opt(c, "transferable")) spec.transferable = as_bool(*f);
      s.classes.push_back(std::move(spec));
    });
  }

  if (auto actors = opt(root, "actors")) {
    each(*actors, [&](const Cur& c) {
      known_keys(c, {"name", "kind", "roles", "balances"});
      ActorSpec spec;
      spec.name = as_id(field(c, "name"));
      if (spec.name == kSchedulerName) fail(field(c, "name"), "reserved actor name");
      if (n.actors.count(spec.name)) fail(field(c, "name"), "duplicate actor");
      n.actors.emplace(spec.name, actor_address(s.seed, spec.name));
      if (auto f = opt(c, "kind")) {
        auto k = as_id(*f);
        if (k == "human")
          spec.kind = ActorKind::Human;
        else if (k == "machine")
          spec.kind = ActorKind::Machine;
        else if (k == "firm")
          spec.kind = ActorKind::Firm;
        else
          fail(*f, "unknown actor kind \"" + k + '"');
      }
      if (auto f = opt(c, "balances")) {
        want_object(*f);
        for (const auto& [cls, amt] : f->j->items()) {
          Cur bc{&amt, f->path + "." + cls};
          if (!n.classes.count(cls)) fail(*f, "unknown class \"" + cls + '"');
          spec.balances[cls] = as_positive(bc);
        }
      }
      s.actors.push_back(std::move(spec));
    });
  }

  // Org nodes come before roles and scopes so both can be checked.
  if (auto org = opt(root, "org")) {
    each(*org, [&](const Cur& c) {
      known_keys(c, {"id", "parent", "members", "mandates"});
      NodeSpec spec;
      spec.id = as_id(field(c, "id"));
      if (!n.nodes.insert(spec.id).second) fail(field(c, "id"), "duplicate node");
      if (auto f = opt(c, "parent")) spec.parent = as_id(*f);
      if (auto f = opt(c, "members"))
        each(*f, [&](const Cur& m) {
          auto name = as_id(m);
          if (!n.actors.count(name)) fail(m, "unknown actor \"" + name + '"');
          spec.members.push_back(name);
        });
      if (auto f = opt(c, "mandates"))
        each(*f, [&](const Cur& m) { spec.mandates.push_back(as_id(m)); });
      s.org.push_back(std::move(spec));
    });
    std::size_t roots = 0;
    for (std::size_t i = 0; i < s.org.size(); ++i) {
      const auto& node = s.org[i];
      auto path = root.path + ".org[" + std::to_string(i) + "]";
      if (!node.parent) {
        ++roots;
        continue;
      }
      if (!n.nodes.count(*node.parent))
        throw ParseFail{path + ".parent: unknown node \"" + *node.parent + '"'};
      // Walk to the root; revisiting a node means a parent cycle.
      std::set<NodeId> seen{node.id};
      const NodeSpec* cur = &node;
      while (cur->parent) {
        if (!seen.insert(*cur->parent).second)
          throw ParseFail{path + ".parent: cycle through \"" + *cur->parent + '"'};
        auto it = std::find_if(s.org.begin(), s.org.end(),
                               [&](const NodeSpec& x) { return x.id == *cur->parent; });
        cur = &*it;
      }
    }
    if (s.org.size() > 0 && roots != 1)
      throw ParseFail{root.path + ".org: expected exactly one root node, found " +
                      std::to_string(roots)};
  }

  // Roles may target nodes, so they resolve after the org block.
  {
    std::size_t i = 0;
    if (auto actors = opt(root, "actors")) {
      each(*actors, [&](const Cur& c) {
        auto& spec = s.actors[i++];
        if (auto f = opt(c, "roles")) {
          each(*f, [&](const Cur& r) {
            known_keys(r, {"role", "scope"});
            spec.roles.emplace_back(as_id(field(r, "role")), opt_scope(r, n));
          });
        }
      });
    }
  }

  if (auto pools = opt(root, "pools")) {
    each(*pools, [&](const Cur& c) {
      known_keys(c, {"id", "currency", "initial"});
      PoolSpec spec;
      spec.id = as_id(field(c, "id"));
      if (!n.pools.insert(spec.id).second) fail(field(c, "id"), "duplicate pool");
      spec.currency = as_class(field(c, "currency"), n);
      if (auto f = opt(c, "initial")) spec.initial = as_nonneg(*f);
      s.pools.push_back(std::move(spec));
    });
  }

  if (auto curves = opt(root, "curves")) {
    each(*curves, [&](const Cur& c) {
      known_keys(c, {"id", "token", "currency", "p0_num", "p0_den", "k_num", "k_den",
                     "tribute_in", "tribute_out", "tribute_pool"});
      CurveSpec spec;
      spec.id = as_id(field(c, "id"));
      if (!n.curves.insert(spec.id).second) fail(field(c, "id"), "duplicate curve");
      spec.token = as_class(field(c, "token"), n);
      spec.currency = as_class(field(c, "currency"), n);
      spec.p0_num = as_nonneg(field(c, "p0_num"));
      spec.p0_den = as_positive(field(c, "p0_den"));
      spec.k_num = as_nonneg(field(c, "k_num"));
      spec.k_den = as_positive(field(c, "k_den"));
      if (spec.p0_num == 0 && spec.k_num == 0) fail(c, "price must not be identically zero");
      if (auto f = opt(c, "tribute_in")) spec.tribute_in = as_ppm(*f);
      if (auto f = opt(c, "tribute_out")) spec.tribute_out = as_ppm(*f);
      if (auto f = opt(c, "tribute_pool")) spec.tribute_pool = as_pool(*f, n);
      if ((spec.tribute_in > 0 || spec.tribute_out > 0) && spec.tribute_pool.empty())
        fail(c, "tribute requires tribute_pool");
      s.curves.push_back(std::move(spec));
    });
  }

  if (auto rules = opt(root, "rules")) {
    std::set<RuleId> ids;
    each(*rules, [&](const Cur& c) {
      auto def = parse_rule(c, n);
      if (!ids.insert(def.id).second) fail(field(c, "id"), "duplicate rule");
      s.rules.push_back(std::move(def));
    });
  }

  if (auto policies = opt(root, "policies")) {
    each(*policies, [&](const Cur& c) {
      known_keys(c, {"id", "pool", "weight_class"});
      DistributionPolicy p;
      p.id = as_id(field(c, "id"));
      if (!n.policies.insert(p.id).second) fail(field(c, "id"), "duplicate policy");
      p.pool = as_pool(field(c, "pool"), n);
      p.weight_class = as_class(field(c, "weight_class"), n);
      s.policies.push_back(std::move(p));
    });
  }

  if (auto incentives = opt(root, "incentives")) {
    std::set<std::string> ids;
    each(*incentives, [&](const Cur& c) {
      known_keys(c, {"id", "trigger", "reward", "reward_class"});
      IncentiveRule r;
      r.id = as_id(field(c, "id"));
      if (!ids.insert(r.id).second) fail(field(c, "id"), "duplicate incentive");
      r.trigger = as_id(field(c, "trigger"));
      if (r.trigger != "on_time_completion" && r.trigger != "ppc_perfect")
        fail(field(c, "trigger"), "unknown trigger \"" + r.trigger + '"');
      r.reward = as_positive(field(c, "reward"));
      r.reward_class = as_class(field(c, "reward_class"), n);
      s.incentives.push_back(std::move(r));
    });
  }

  if (auto registries = opt(root, "registries")) {
    each(*registries, [&](const Cur& c) {
      known_keys(c, {"id", "stake_class", "min_stake", "apply_window", "vote_window"});
      RegistrySpec spec;
      spec.id = as_id(field(c, "id"));
      if (!n.registries.insert(spec.id).second) fail(field(c, "id"), "duplicate registry");
      spec.stake_class = as_class(field(c, "stake_class"), n);
      spec.min_stake = as_positive(field(c, "min_stake"));
      spec.apply_window = as_u64(field(c, "apply_window"));
      spec.vote_window = as_u64(field(c, "vote_window"));
      if (spec.apply_window == 0) fail(field(c, "apply_window"), "must be > 0");
      if (spec.vote_window == 0) fail(field(c, "vote_window"), "must be > 0");
      s.registries.push_back(std::move(spec));
    });
  }

  if (auto config = opt(root, "config")) {
    known_keys(*config, {"currency_class", "membership_class", "reputation_class",
                         "ppc_period_len", "deadlock_n", "auto_sanctions", "court", "ladder"});
    if (auto f = opt(*config, "currency_class")) s.cfg.currency_class = as_class(*f, n);
    if (auto f = opt(*config, "membership_class")) s.cfg.membership_class = as_class(*f, n);
    if (auto f = opt(*config, "reputation_class")) s.cfg.reputation_class = as_class(*f, n);
    if (auto f = opt(*config, "ppc_period_len")) {
      s.cfg.ppc_period_len = as_u64(*f);
      if (s.cfg.ppc_period_len == 0) fail(*f, "must be > 0");
    }
    if (auto f = opt(*config, "deadlock_n")) {
      s.cfg.deadlock_n = static_cast<std::uint32_t>(as_positive(*f));
    }
    if (auto f = opt(*config, "auto_sanctions")) s.cfg.auto_sanctions = as_bool(*f);
    if (auto court = opt(*config, "court")) {
      known_keys(*court, {"stake_class", "min_stake", "slash_ppm"});
      s.cfg.court_stake_class = as_class(field(*court, "stake_class"), n);
      if (auto f = opt(*court, "min_stake")) s.cfg.court_min_stake = as_positive(*f);
      if (auto f = opt(*court, "slash_ppm")) s.cfg.court_slash = as_ppm(*f);
    }
    if (auto ladder = opt(*config, "ladder")) {
      known_keys(*ladder, {"window", "steps"});
      if (auto f = opt(*ladder, "window")) s.cfg.ladder.window = as_u64(*f);
      each(field(*ladder, "steps"),
           [&](const Cur& st) { s.cfg.ladder.steps.push_back(parse_step(st)); });
    }
  }
  if (s.mech[1] && s.cfg.membership_class.empty())
    throw ParseFail{"$.config.membership_class: required while M1 is enabled"};

  if (auto agents = opt(root, "agents")) {
    std::set<std::string> seen;
    each(*agents, [&](const Cur& c) {
      known_keys(c, {"actor", "policy", "greed", "deterrence"});
      AgentSpec spec;
      spec.actor = as_id(field(c, "actor"));
      if (!n.actors.count(spec.actor)) fail(field(c, "actor"), "unknown actor \"" + spec.actor + '"');
      if (spec.actor == kSchedulerName) fail(field(c, "actor"), "reserved actor name");
      if (!seen.insert(spec.actor).second) fail(field(c, "actor"), "duplicate agent");
      auto policy = as_id(field(c, "policy"));
      if (policy == "honest") {
        known_keys(c, {"actor", "policy"});
        spec.policy = PolicyKind::Honest;
      } else if (policy == "opportunistic") {
        known_keys(c, {"actor", "policy", "greed"});
        spec.policy = PolicyKind::Opportunistic;
        spec.greed = as_ppm(field(c, "greed"));
        if (spec.greed == 0) fail(field(c, "greed"), "must be > 0");
      } else if (policy == "deterrable") {
        spec.policy = PolicyKind::Deterrable;
        spec.greed = as_ppm(field(c, "greed"));
        if (spec.greed == 0) fail(field(c, "greed"), "must be > 0");
        spec.deterrence = as_ppm(field(c, "deterrence"));
      } else {
        fail(field(c, "policy"), "unknown policy \"" + policy + '"');
      }
      s.agents.push_back(std::move(spec));
    });
  }

  if (auto project = opt(root, "project")) {
    known_keys(*project, {"pool", "packages", "package_cost", "rule", "commit_lead"});
    ProjectSpec spec;
    spec.pool = as_pool(field(*project, "pool"), n);
    spec.packages = as_positive(field(*project, "packages"));
    spec.package_cost = as_positive(field(*project, "package_cost"));
    if (auto f = opt(*project, "rule")) {
      spec.rule = as_id(*f);
      bool known = std::any_of(s.rules.begin(), s.rules.end(),
                               [&](const RuleProgramDef& r) { return r.id == spec.rule; });
      if (!known) fail(*f, "unknown rule \"" + spec.rule + '"');
    }
    if (auto f = opt(*project, "commit_lead")) {
      spec.commit_lead = as_u64(*f);
      if (spec.commit_lead == 0) fail(*f, "must be > 0");
    }
    s.project = std::move(spec);
  }
  if (!s.agents.empty() && !s.project)
    throw ParseFail{"$.agents: agents need a project block"};

  if (auto script = opt(root, "script")) {
    each(*script, [&](const Cur& c) {
      ScriptEvent ev;
      ev.at = as_u64(field(c, "at"));
      if (ev.at >= s.ticks) fail(field(c, "at"), "beyond the run horizon");
      ev.author = as_id(field(c, "author"));
      if (!n.actors.count(ev.author)) fail(field(c, "author"), "unknown actor \"" + ev.author + '"');
      ev.cmd = parse_command(c, n);
      s.script.push_back(std::move(ev));
    });
  }

  return s;
}

}  // namespace

AddressId actor_address(std::uint64_t seed, const std::string& name) {
  auto pub = derive_actor_key(seed, name);
  return crypto::sha256(Bytes(pub.begin(), pub.end()));
}

Result<Scenario> parse(const std::string& text, std::optional<std::uint64_t> seed_override) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    return Error{Errc::InvalidScenario, std::string("json: ") + e.what()};
  }
  try {
    return parse_doc(doc, text, seed_override);
  } catch (const ParseFail& f) {
    return Error{Errc::InvalidScenario, f.msg};
  }
}

Result<Scenario> load(const std::filesystem::path& file,
                      std::optional<std::uint64_t> seed_override) {
  std::ifstream in(file, std::ios::binary);
  if (!in) return Error{Errc::InvalidScenario, file.string() + ": cannot open"};
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), seed_override);
}

WorldState build_genesis(const Scenario& s, Keystore& ks) {
  WorldState w;
  w.world_seed = s.seed;
  w.mech = s.mech;
  w.cfg = s.cfg;

  auto add = [&](const std::string& name, ActorKind kind) {
    auto id = ks.add_actor(s.seed, name);
    AddressRecord rec;
    rec.kind = kind;
    rec.name = name;
    rec.pubkey = ks.find(id)->pub;
    w.addresses.emplace(id, std::move(rec));
    return id;
  };
  add(std::string(kSchedulerName), ActorKind::Machine);
  for (const auto& a : s.actors) add(a.name, a.kind);

  for (const auto& c : s.classes) {
    TokenClass tc;
    tc.id = c.id;
    tc.display = c.display;
    tc.transferable = c.transferable;
    w.classes.emplace(c.id, std::move(tc));
  }

  auto must = [](Status st) { assert(st.ok()); (void)st; };

  for (const auto& node : s.org) {
    OrgNode n;
    n.id = node.id;
    n.parent = node.parent;
    for (const auto& m : node.members) n.members.insert(*ks.by_name(m));
    n.mandates.insert(node.mandates.begin(), node.mandates.end());
    if (!node.parent) w.org_root = node.id;
    w.org.emplace(node.id, std::move(n));
  }

  for (const auto& a : s.actors) {
    auto id = *ks.by_name(a.name);
    for (const auto& [cls, amount] : a.balances) must(tokens::mint(w, cls, id, amount));
    for (const auto& [role, node] : a.roles)
      must(tokens::grant_role(w, id, role, node ? node_scope(*node) : global_scope()));
  }

  for (const auto& p : s.pools) {
    Pool pool;
    pool.id = p.id;
    pool.currency = p.currency;
    pool.escrow = ensure_escrow(w, "pool", p.id);
    if (p.initial > 0) must(tokens::mint(w, p.currency, pool.escrow, p.initial));
    w.pools.emplace(p.id, std::move(pool));
  }

  for (const auto& c : s.curves) {
    BondingCurve bc;
    bc.id = c.id;
    bc.token = c.token;
    bc.currency = c.currency;
    bc.p0_num = c.p0_num;
    bc.p0_den = c.p0_den;
    bc.k_num = c.k_num;
    bc.k_den = c.k_den;
    bc.tribute_in = c.tribute_in;
    bc.tribute_out = c.tribute_out;
    bc.tribute_pool = c.tribute_pool;
    bc.escrow = ensure_escrow(w, "curve", c.id);
    w.curves.emplace(c.id, std::move(bc));
  }

  for (const auto& r : s.rules) w.rules.emplace(r.id, r);
  for (const auto& p : s.policies) w.policies.emplace(p.id, p);
  for (const auto& i : s.incentives) w.incentives.emplace(i.id, i);

  for (const auto& r : s.registries) {
    Registry reg;
    reg.id = r.id;
    reg.stake_class = r.stake_class;
    reg.min_stake = r.min_stake;
    reg.apply_window = r.apply_window;
    reg.vote_window = r.vote_window;
    reg.escrow = ensure_escrow(w, "registry", r.id);
    w.registries.emplace(r.id, std::move(reg));
  }

  return w;
}

}  // namespace scenario
}  // namespace commons
