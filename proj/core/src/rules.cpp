#include "commons/rules.hpp"

#include <algorithm>

#include "commons/support/crypto.hpp"
#include "commons/tokens.hpp"
#include "commons/world.hpp"

namespace commons::rules {

Amount appropriated_in_period(const WorldState& w, const RuleId& rule, const AddressId& actor,
                              Tick tick, Tick period) {
  Tick start = period == 0 ? 0 : (tick / period) * period;
  auto r = w.appropriations.find(rule);
  if (r == w.appropriations.end()) return 0;
  auto a = r->second.find(actor);
  if (a == r->second.end()) return 0;
  Amount total = 0;
  for (const auto& [at, amount] : a->second)
    if (at >= start && at <= tick) total += amount;
  return total;
}

std::optional<ClauseFailure> evaluate(const WorldState& w, const RuleProgramDef& rule,
                                      const AddressId& actor, const PoolId& pool, Amount amount,
                                      Tick tick) {
  for (std::size_t i = 0; i < rule.clauses.size(); ++i) {
    const RuleClause& c = rule.clauses[i];
    bool ok = true;
    switch (c.type) {
      case ClauseType::PerActorCap:
        ok = appropriated_in_period(w, rule.id, actor, tick, c.period) + amount <= c.amount;
        break;
      case ClauseType::PerRoleAllowance:
        ok = tokens::has_role(w, actor, c.role) &&
             appropriated_in_period(w, rule.id, actor, tick, c.period) + amount <= c.amount;
        break;
      case ClauseType::PoolFloor: {
        auto p = w.pools.find(pool);
        Amount reserve =
            p == w.pools.end() ? 0 : tokens::balance(w, p->second.currency, p->second.escrow);
        ok = reserve - amount >= c.amount;
        break;
      }
      case ClauseType::TimeWindow: ok = tick >= c.from && tick <= c.to; break;
      case ClauseType::RequireRole: ok = tokens::has_role(w, actor, c.role); break;
      case ClauseType::RequireToken:
        ok = tokens::balance(w, c.token_class, actor) >= c.amount;
        break;
    }
    if (!ok) return ClauseFailure{i, c.type};
  }
  return std::nullopt;
}

std::string approval_id(const RuleId& rule, const AddressId& actor, Tick tick, Seq seq) {
  CanonicalWriter cw;
  cw.str(rule);
  cw.digest(actor);
  cw.u64(tick);
  cw.u64(seq);
  auto digest = crypto::sha256(cw.data());
  return "apv-" + to_hex(Bytes(digest.v.begin(), digest.v.begin() + 8));
}

Result<std::string> request_appropriation(WorldState& w, const AddressId& actor,
                                          const RuleId& rule, const PoolId& pool, Amount amount) {
  auto r = w.rules.find(rule);
  if (r == w.rules.end()) return Error{Errc::UnknownRule, rule};
  if (!w.pools.count(pool)) return Error{Errc::UnknownPool, pool};
  if (amount <= 0) return Error{Errc::InvalidPayload, "non-positive request"};
  if (auto fail = evaluate(w, r->second, actor, pool, amount, w.tick))
    return Error{Errc::Unauthorized,
                 "rule clause " + std::to_string(fail->index) + " failed"};

  std::string id = approval_id(rule, actor, w.tick, w.applied);

  w.appropriations[rule][actor].emplace_back(w.tick, amount);
  Approval a;
  a.id = id;
  a.actor = actor;
  a.pool = pool;
  a.amount = amount;
  a.issued_at = w.tick;
  w.approvals.emplace(id, std::move(a));
  return id;
}

std::vector<Payout> largest_remainder(const std::vector<std::pair<AddressId, Amount>>& weights,
                                      Amount amount) {
  std::vector<Payout> out;
  __int128 total = 0;
  for (const auto& [addr, wgt] : weights) total += wgt;
  if (total <= 0 || amount < 0) return out;

  out.reserve(weights.size());
  std::vector<std::pair<__int128, std::size_t>> rema;  // remainder, index
  Amount assigned = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    __int128 num = static_cast<__int128>(amount) * weights[i].second;
    Amount base = static_cast<Amount>(num / total);
    out.push_back(Payout{weights[i].first, base});
    assigned += base;
    rema.emplace_back(num % total, i);
  }
  Amount rest = amount - assigned;
  // Largest remainder first; equal remainders favor the earlier (smaller)
  // address, which callers provide in sorted order.
  std::stable_sort(rema.begin(), rema.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (Amount i = 0; i < rest; ++i) out[rema[static_cast<std::size_t>(i)].second].amount += 1;
  return out;
}

Result<std::vector<Payout>> distribute_rewards(WorldState& w, const AddressId& actor,
                                               const PolicyId& policy, Amount amount) {
  (void)actor;
  auto p = w.policies.find(policy);
  if (p == w.policies.end()) return Error{Errc::UnknownPolicy, policy};
  auto pool = w.pools.find(p->second.pool);
  if (pool == w.pools.end()) return Error{Errc::UnknownPool, p->second.pool};
  if (amount <= 0) return Error{Errc::InvalidPayload, "non-positive distribution"};
  if (tokens::balance(w, pool->second.currency, pool->second.escrow) < amount)
    return Error{Errc::InsufficientReserve, p->second.pool};
  auto cls = w.classes.find(p->second.weight_class);
  if (cls == w.classes.end()) return Error{Errc::UnknownClass, p->second.weight_class};

  std::vector<std::pair<AddressId, Amount>> weights;
  for (const auto& [addr, held] : cls->second.balances) {
    if (held <= 0) continue;
    auto rec = w.addresses.find(addr);
    if (rec == w.addresses.end() || rec->second.kind == ActorKind::Machine ||
        rec->second.removed)
      continue;
    // Reputation weighting is the reputation mechanism; without it every
    // eligible holder weighs the same.
    Amount wgt = w.mechanism_on(9) ? held : 1;
    auto rr = w.reward_reductions.find(addr);
    if (rr != w.reward_reductions.end() && rr->second.until >= w.tick)
      wgt -= ppm_floor(wgt, rr->second.share);
    if (wgt > 0) weights.emplace_back(addr, wgt);
  }
  if (weights.empty()) return Error{Errc::Insufficient, "no eligible recipients"};

  auto payouts = largest_remainder(weights, amount);
  for (const auto& pay : payouts) {
    if (pay.amount == 0) continue;
    if (auto s = tokens::transfer(w, pool->second.escrow, pool->second.currency, pay.to,
                                  pay.amount);
        !s.ok())
      return s.error();
  }
  return payouts;
}

}  // namespace commons::rules
