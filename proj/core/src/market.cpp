#include "commons/market.hpp"

#include <algorithm>

#include "commons/rules.hpp"
#include "commons/tokens.hpp"
#include "commons/world.hpp"

namespace commons::market {

Status post_tender(WorldState& w, const AddressId& poster, const TenderId& id,
                   const Digest32& package, Amount min_reputation,
                   const std::optional<RoleName>& required_role, Tick deadline,
                   bool cancel_on_no_bids) {
  if (w.tenders.count(id)) return Error{Errc::DuplicateId, id};
  if (deadline <= w.tick) return Error{Errc::BadTick, "deadline not in the future"};
  if (min_reputation < 0) return Error{Errc::InvalidPayload, "negative reputation bar"};
  Tender t;
  t.id = id;
  t.poster = poster;
  t.package = package;
  t.min_reputation = min_reputation;
  t.required_role = required_role;
  t.deadline = deadline;
  t.cancel_on_no_bids = cancel_on_no_bids;
  t.posted_at = w.tick;
  w.tenders.emplace(id, std::move(t));
  return ok_status();
}

Status submit_bid(WorldState& w, const AddressId& bidder, const TenderId& tender, Amount price) {
  auto it = w.tenders.find(tender);
  if (it == w.tenders.end()) return Error{Errc::UnknownTender, tender};
  Tender& t = it->second;
  if (t.status != TenderStatus::Open) return Error{Errc::AlreadyClosed, tender};
  if (w.tick >= t.deadline) return Error{Errc::OutsideWindow, "past bid deadline"};
  if (price <= 0) return Error{Errc::InvalidPayload, "non-positive bid"};
  if (w.mechanism_on(9) && t.min_reputation > 0 &&
      tokens::balance(w, w.cfg.reputation_class, bidder) < t.min_reputation)
    return Error{Errc::Unauthorized, "reputation below tender bar"};
  if (t.required_role && !tokens::has_role(w, bidder, *t.required_role))
    return Error{Errc::Unauthorized, "missing role " + *t.required_role};
  for (const auto& b : t.bids)
    if (b.bidder == bidder) return Error{Errc::DuplicateEntry, "one bid per bidder"};
  t.bids.push_back(BidEntry{bidder, price, w.applied});
  return ok_status();
}

Result<AuctionOutcome> close_auction(WorldState& w, const AddressId& actor,
                                     const TenderId& tender) {
  (void)actor;
  auto it = w.tenders.find(tender);
  if (it == w.tenders.end()) return Error{Errc::UnknownTender, tender};
  Tender& t = it->second;
  if (t.status != TenderStatus::Open) return Error{Errc::AlreadyClosed, tender};
  if (w.tick < t.deadline) return Error{Errc::NotYetDeadline, tender};
  if (t.bids.empty()) {
    if (t.cancel_on_no_bids) {
      t.status = TenderStatus::Cancelled;
      return AuctionOutcome{};
    }
    // Reopen for another round of the original length.
    Tick len = t.deadline - t.posted_at;
    t.posted_at = w.tick;
    t.deadline = w.tick + len;
    return AuctionOutcome{};
  }
  const BidEntry* best = &t.bids.front();
  for (const auto& b : t.bids)
    if (b.price < best->price || (b.price == best->price && b.seq < best->seq)) best = &b;
  t.status = TenderStatus::Awarded;
  t.winner = best->bidder;
  t.award_price = best->price;
  return AuctionOutcome{true, best->bidder, best->price};
}

Status open_market(WorldState& w, const AddressId& creator, const MarketId& id,
                   const Digest32& question, std::vector<std::string> outcomes,
                   const ClassId& currency, Ppm fee_ppm, const std::optional<PoolId>& fee_pool) {
  if (w.markets.count(id)) return Error{Errc::DuplicateId, id};
  if (outcomes.size() < 2) return Error{Errc::InvalidPayload, "need at least two outcomes"};
  for (std::size_t i = 0; i < outcomes.size(); ++i)
    for (std::size_t j = i + 1; j < outcomes.size(); ++j)
      if (outcomes[i] == outcomes[j]) return Error{Errc::InvalidPayload, "duplicate outcome"};
  if (!w.classes.count(currency)) return Error{Errc::UnknownClass, currency};
  if (fee_ppm < 0 || fee_ppm >= kPpmOne) return Error{Errc::InvalidPayload, "fee out of range"};
  if (fee_pool && !w.pools.count(*fee_pool)) return Error{Errc::UnknownPool, *fee_pool};
  PredictionMarket m;
  m.id = id;
  m.oracle = creator;
  m.question = question;
  m.outcomes = std::move(outcomes);
  m.currency = currency;
  m.fee_ppm = fee_ppm;
  m.fee_pool = fee_pool;
  m.escrow = ensure_escrow(w, "market", id);
  w.markets.emplace(id, std::move(m));
  return ok_status();
}

Status bet(WorldState& w, const AddressId& bettor, const MarketId& id, const std::string& outcome,
           Amount stake) {
  auto it = w.markets.find(id);
  if (it == w.markets.end()) return Error{Errc::UnknownMarket, id};
  PredictionMarket& m = it->second;
  if (m.status != MarketStatus::Open) return Error{Errc::MarketClosed, id};
  if (std::find(m.outcomes.begin(), m.outcomes.end(), outcome) == m.outcomes.end())
    return Error{Errc::InvalidPayload, "unknown outcome " + outcome};
  if (stake <= 0) return Error{Errc::InsufficientStake, "non-positive stake"};
  if (auto s = tokens::transfer(w, bettor, m.currency, m.escrow, stake); !s.ok()) return s;
  m.stakes[outcome][bettor] += stake;
  return ok_status();
}

Status resolve(WorldState& w, const AddressId& actor, const MarketId& id,
               const std::string& outcome) {
  auto it = w.markets.find(id);
  if (it == w.markets.end()) return Error{Errc::UnknownMarket, id};
  PredictionMarket& m = it->second;
  if (actor != m.oracle) return Error{Errc::Unauthorized, "only the market oracle resolves"};
  if (m.status != MarketStatus::Open) return Error{Errc::MarketClosed, id};
  if (std::find(m.outcomes.begin(), m.outcomes.end(), outcome) == m.outcomes.end())
    return Error{Errc::InvalidPayload, "unknown outcome " + outcome};
  m.status = MarketStatus::Resolved;
  m.resolved_outcome = outcome;
  return ok_status();
}

Result<SettleOutcome> settle(WorldState& w, const MarketId& id) {
  auto it = w.markets.find(id);
  if (it == w.markets.end()) return Error{Errc::UnknownMarket, id};
  PredictionMarket& m = it->second;
  if (m.status != MarketStatus::Resolved)
    return Error{m.status == MarketStatus::Settled ? Errc::AlreadyClosed : Errc::MarketClosed, id};

  Amount total = 0;
  for (const auto& [outcome, per] : m.stakes)
    for (const auto& [who, amt] : per) total += amt;

  auto winners = m.stakes.find(m.resolved_outcome);
  SettleOutcome out;
  out.pool = total;
  if (winners == m.stakes.end() || winners->second.empty()) {
    // Nobody backed the outcome: every stake goes straight back.
    out.refunded = true;
    for (const auto& [outcome, per] : m.stakes)
      for (const auto& [who, amt] : per)
        if (auto s = tokens::transfer(w, m.escrow, m.currency, who, amt); !s.ok())
          return s.error();
    m.status = MarketStatus::Settled;
    return out;
  }

  Amount fee = m.fee_pool ? ppm_floor(total, m.fee_ppm) : 0;
  if (fee > 0) {
    const Pool& fp = w.pools.at(*m.fee_pool);
    if (auto s = tokens::transfer(w, m.escrow, m.currency, fp.escrow, fee); !s.ok())
      return s.error();
  }
  out.fee = fee;

  std::vector<std::pair<AddressId, Amount>> weights(winners->second.begin(),
                                                    winners->second.end());
  auto payouts = rules::largest_remainder(weights, total - fee);
  for (const auto& pay : payouts)
    if (pay.amount > 0)
      if (auto s = tokens::transfer(w, m.escrow, m.currency, pay.to, pay.amount); !s.ok())
        return s.error();
  m.status = MarketStatus::Settled;
  return out;
}

}  // namespace commons::market
