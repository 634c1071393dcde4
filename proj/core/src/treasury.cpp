#include "commons/treasury.hpp"

#include "commons/tokens.hpp"
#include "commons/world.hpp"

namespace commons::treasury {

namespace {

Result<Pool*> find_pool(WorldState& w, const PoolId& id) {
  auto it = w.pools.find(id);
  if (it == w.pools.end()) return Error{Errc::UnknownPool, id};
  return &it->second;
}

Result<BondingCurve*> find_curve(WorldState& w, const CurveId& id) {
  auto it = w.curves.find(id);
  if (it == w.curves.end()) return Error{Errc::UnknownCurve, id};
  return &it->second;
}

}  // namespace

__int128 cost_denominator(const BondingCurve& c) {
  return static_cast<__int128>(2) * c.p0_den * c.k_den;
}

__int128 cost_numerator(const BondingCurve& c, Amount s, Amount d) {
  // integral of (p0 + k x) dx over [s, s+d], over the common denominator:
  // 2*k_den*p0_num*d + p0_den*k_num*d*(2s + d)
  __int128 flat = static_cast<__int128>(2) * c.k_den * c.p0_num * d;
  __int128 slope =
      static_cast<__int128>(c.p0_den) * c.k_num * (2 * static_cast<__int128>(s) + d) * d;
  return flat + slope;
}

Amount max_affordable(const BondingCurve& c, Amount s, Amount budget) {
  if (budget <= 0) return 0;
  __int128 cap = static_cast<__int128>(budget) * cost_denominator(c);
  if (cost_numerator(c, s, 1) > cap) return 0;
  Amount lo = 1, hi = 2;
  while (cost_numerator(c, s, hi) <= cap) {
    lo = hi;
    if (hi > (std::int64_t{1} << 40)) break;  // price zero forever: cap the issue
    hi *= 2;
  }
  while (lo + 1 < hi) {
    Amount mid = lo + (hi - lo) / 2;
    if (cost_numerator(c, s, mid) <= cap) lo = mid;
    else hi = mid;
  }
  return lo;
}

Amount sale_proceeds_floor(const BondingCurve& c, Amount s, Amount d) {
  return static_cast<Amount>(cost_numerator(c, s - d, d) / cost_denominator(c));
}

Status deposit(WorldState& w, const AddressId& from, const PoolId& pool, Amount amount) {
  auto p = find_pool(w, pool);
  if (!p.ok()) return p.error();
  if (amount <= 0) return Error{Errc::InvalidPayload, "non-positive deposit"};
  return tokens::transfer(w, from, p.value()->currency, p.value()->escrow, amount);
}

Status withdraw(WorldState& w, const AddressId& actor, const PoolId& pool, const AddressId& to,
                Amount amount, const std::optional<std::string>& approval) {
  auto p = find_pool(w, pool);
  if (!p.ok()) return p.error();
  if (amount <= 0) return Error{Errc::InvalidPayload, "non-positive withdrawal"};
  if (!approval) return Error{Errc::NoApproval, "withdrawal without approval"};
  auto it = w.approvals.find(*approval);
  if (it == w.approvals.end()) return Error{Errc::NoApproval, *approval};
  Approval& a = it->second;
  if (a.consumed) return Error{Errc::NoApproval, "approval already spent"};
  if (a.actor != actor || a.pool != pool) return Error{Errc::Unauthorized, "approval mismatch"};
  // Approvals are one tick's capability: issued and spent at the same tick.
  if (a.issued_at != w.tick) return Error{Errc::NoApproval, "approval expired"};
  if (amount > a.amount) return Error{Errc::Unauthorized, "over approved amount"};
  auto moved = tokens::transfer(w, p.value()->escrow, p.value()->currency, to, amount);
  if (!moved.ok()) return moved;
  a.consumed = true;
  return ok_status();
}

Status unguarded_draw(WorldState& w, const AddressId& actor, const PoolId& pool, Amount amount) {
  auto p = find_pool(w, pool);
  if (!p.ok()) return p.error();
  if (amount <= 0) return Error{Errc::InvalidPayload, "non-positive draw"};
  return tokens::transfer(w, p.value()->escrow, p.value()->currency, actor, amount);
}

Result<TradeOutcome> curve_buy(WorldState& w, const AddressId& actor, const CurveId& curve,
                               Amount spend) {
  auto c = find_curve(w, curve);
  if (!c.ok()) return c.error();
  BondingCurve& bc = *c.value();
  if (spend <= 0) return Error{Errc::ZeroSpend, curve};
  if (tokens::balance(w, bc.currency, actor) < spend) return Error{Errc::Insufficient, bc.currency};

  Amount tribute = bc.tribute_pool.empty() ? 0 : ppm_floor(spend, bc.tribute_in);
  Amount net = spend - tribute;
  Amount d = max_affordable(bc, bc.supply, net);
  if (d <= 0) return Error{Errc::ZeroSpend, "spend below first token price"};

  if (tribute > 0) {
    auto tp = find_pool(w, bc.tribute_pool);
    if (!tp.ok()) return tp.error();
    if (auto s = tokens::transfer(w, actor, bc.currency, tp.value()->escrow, tribute); !s.ok())
      return s.error();
  }
  // The escrow keeps the whole net spend; integer change stays in reserve.
  if (auto s = tokens::transfer(w, actor, bc.currency, bc.escrow, net); !s.ok()) return s.error();
  if (auto s = tokens::mint(w, bc.token, actor, d); !s.ok()) return s.error();
  bc.supply += d;
  bc.reserve += net;
  return TradeOutcome{d, spend, tribute};
}

Result<TradeOutcome> curve_sell(WorldState& w, const AddressId& actor, const CurveId& curve,
                                Amount count) {
  auto c = find_curve(w, curve);
  if (!c.ok()) return c.error();
  BondingCurve& bc = *c.value();
  if (count <= 0) return Error{Errc::InvalidPayload, "non-positive sale"};
  if (count > bc.supply) return Error{Errc::Insufficient, "over curve supply"};
  if (tokens::balance(w, bc.token, actor) < count) return Error{Errc::Insufficient, bc.token};

  Amount gross = sale_proceeds_floor(bc, bc.supply, count);
  if (gross > bc.reserve) return Error{Errc::InsufficientReserve, curve};
  Amount tribute = bc.tribute_pool.empty() ? 0 : ppm_floor(gross, bc.tribute_out);
  Amount payout = gross - tribute;

  if (auto s = tokens::burn(w, bc.token, actor, count); !s.ok()) return s.error();
  if (tribute > 0) {
    auto tp = find_pool(w, bc.tribute_pool);
    if (!tp.ok()) return tp.error();
    if (auto s = tokens::transfer(w, bc.escrow, bc.currency, tp.value()->escrow, tribute); !s.ok())
      return s.error();
  }
  if (payout > 0) {
    if (auto s = tokens::transfer(w, bc.escrow, bc.currency, actor, payout); !s.ok())
      return s.error();
  }
  bc.supply -= count;
  bc.reserve -= gross;
  return TradeOutcome{count, payout, tribute};
}

}  // namespace commons::treasury
