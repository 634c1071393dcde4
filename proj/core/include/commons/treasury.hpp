#pragma once

#include <cstdint>
#include <string>

#include "commons/support/result.hpp"
#include "commons/types.hpp"

namespace commons {

struct WorldState;

struct Pool {
  PoolId id;
  ClassId currency;
  AddressId escrow{};  // machine account holding the reserve
};

/// Linear bonding curve p(s) = p0 + k*s with exact rational parameters.
/// All settlement is integer: the reserve absorbs every rounding remainder,
/// so reserve >= integral of p over [0, supply] at all times.
struct BondingCurve {
  CurveId id;
  ClassId token;     // class minted on buy, burned on sell
  ClassId currency;  // class paid in and out
  std::int64_t p0_num = 0;
  std::int64_t p0_den = 1;
  std::int64_t k_num = 0;
  std::int64_t k_den = 1;
  Ppm tribute_in = 0;   // share of gross spend routed to the tribute pool
  Ppm tribute_out = 0;  // share of gross proceeds routed on sell
  PoolId tribute_pool;  // empty: no tribute
  AddressId escrow{};
  Amount supply = 0;    // tokens outstanding on this curve
  Amount reserve = 0;   // currency held by the escrow for this curve
};

namespace treasury {

/// 2 * p0_den * k_den: the common denominator for exact cost comparison.
__int128 cost_denominator(const BondingCurve& c);

/// Numerator of the exact cost of moving supply s -> s + d, over
/// cost_denominator. cost = integral of (p0 + k*x) dx from s to s+d.
__int128 cost_numerator(const BondingCurve& c, Amount s, Amount d);

/// Largest d with cost(s, s+d) <= budget, i.e. cost_numerator <= budget * D.
Amount max_affordable(const BondingCurve& c, Amount s, Amount budget);

/// floor of the exact proceeds of selling d tokens from supply s.
Amount sale_proceeds_floor(const BondingCurve& c, Amount s, Amount d);

Status deposit(WorldState& w, const AddressId& from, const PoolId& pool, Amount amount);

/// Governed outflow. `approval` names a single-use capability issued by an
/// accepted appropriation request; it must match (actor, pool) and an
/// amount >= the withdrawal.
Status withdraw(WorldState& w, const AddressId& actor, const PoolId& pool, const AddressId& to,
                Amount amount, const std::optional<std::string>& approval);

/// Ungoverned outflow, only accepted while appropriation rules are switched
/// off. Leaves the same audit trail as everything else.
Status unguarded_draw(WorldState& w, const AddressId& actor, const PoolId& pool, Amount amount);

struct TradeOutcome {
  Amount tokens = 0;    // minted (buy) or burned (sell)
  Amount currency = 0;  // spent gross (buy) or paid out (sell)
  Amount tribute = 0;
};

Result<TradeOutcome> curve_buy(WorldState& w, const AddressId& actor, const CurveId& curve,
                               Amount spend);
Result<TradeOutcome> curve_sell(WorldState& w, const AddressId& actor, const CurveId& curve,
                                Amount tokens);

}  // namespace treasury
}  // namespace commons
