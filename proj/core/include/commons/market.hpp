#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "commons/support/result.hpp"
#include "commons/types.hpp"

namespace commons {

struct WorldState;

struct BidEntry {
  AddressId bidder{};
  Amount price = 0;
  Seq seq = 0;  // arrival order; first of equal prices wins
};

enum class TenderStatus : std::uint8_t { Open = 0, Awarded = 1, Cancelled = 2 };

/// Reverse auction for a work package: lowest bid wins at the deadline.
struct Tender {
  TenderId id;
  AddressId poster{};
  Digest32 package{};
  Amount min_reputation = 0;
  std::optional<RoleName> required_role;
  Tick deadline = 0;
  bool cancel_on_no_bids = true;
  Tick posted_at = 0;
  TenderStatus status = TenderStatus::Open;
  std::vector<BidEntry> bids;
  std::optional<AddressId> winner;
  Amount award_price = 0;
};

enum class MarketStatus : std::uint8_t { Open = 0, Resolved = 1, Settled = 2 };

/// Pari-mutuel prediction market: winners split the whole pool pro rata by
/// stake, largest remainder; no winning stake refunds everyone.
struct PredictionMarket {
  MarketId id;
  AddressId oracle{};  // creator; the only address that may resolve
  Digest32 question{};
  std::vector<std::string> outcomes;
  ClassId currency;
  Ppm fee_ppm = 0;
  std::optional<PoolId> fee_pool;
  AddressId escrow{};
  MarketStatus status = MarketStatus::Open;
  std::map<std::string, std::map<AddressId, Amount>> stakes;
  std::string resolved_outcome;
};

namespace market {

Status post_tender(WorldState& w, const AddressId& poster, const TenderId& id,
                   const Digest32& package, Amount min_reputation,
                   const std::optional<RoleName>& required_role, Tick deadline,
                   bool cancel_on_no_bids);
Status submit_bid(WorldState& w, const AddressId& bidder, const TenderId& tender, Amount price);

struct AuctionOutcome {
  bool awarded = false;
  AddressId winner{};
  Amount price = 0;
};
Result<AuctionOutcome> close_auction(WorldState& w, const AddressId& actor,
                                     const TenderId& tender);

Status open_market(WorldState& w, const AddressId& creator, const MarketId& id,
                   const Digest32& question, std::vector<std::string> outcomes,
                   const ClassId& currency, Ppm fee_ppm, const std::optional<PoolId>& fee_pool);
Status bet(WorldState& w, const AddressId& bettor, const MarketId& id, const std::string& outcome,
           Amount stake);
Status resolve(WorldState& w, const AddressId& actor, const MarketId& id,
               const std::string& outcome);

struct SettleOutcome {
  bool refunded = false;
  Amount pool = 0;
  Amount fee = 0;
};
Result<SettleOutcome> settle(WorldState& w, const MarketId& id);

}  // namespace market
}  // namespace commons
