#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "commons/support/result.hpp"
#include "commons/types.hpp"

namespace commons {

struct WorldState;
struct PpcReport;

enum class CommitmentStatus : std::uint8_t { Open = 0, Completed = 1, Missed = 2 };

struct Commitment {
  CommitmentId id;
  AddressId actor{};
  Digest32 package{};
  Tick committed_at = 0;
  Tick promised_tick = 0;
  std::optional<RuleId> terms;
  CommitmentStatus status = CommitmentStatus::Open;
  Tick completed_at = 0;
};

enum class ReviewStatus : std::uint8_t { Open = 0, Settled = 1 };

/// Peer review round: reviewers score each subject contribution 0..100.
/// Settlement splits `reward` from the pool by total score and mints one
/// reputation point per score point received.
struct ReviewRound {
  ReviewRoundId id;
  AddressId opener{};
  std::vector<std::pair<AddressId, Digest32>> subjects;
  std::vector<AddressId> reviewers;
  PoolId pool;
  Amount reward = 0;
  AddressId escrow{};
  ReviewStatus status = ReviewStatus::Open;
  std::map<AddressId, std::map<AddressId, std::uint8_t>> scores;  // reviewer -> subject
};

namespace accountability {

Status commit(WorldState& w, const AddressId& actor, const CommitmentId& id,
              const Digest32& package, Tick promised_tick, const std::optional<RuleId>& terms);
Status report_complete(WorldState& w, const AddressId& actor, const CommitmentId& id);

/// Tick hook: commitments whose promised tick has passed become Missed.
/// Returns the affected actors in commitment-id order (violation feed).
std::vector<AddressId> expire_commitments(WorldState& w);

Status open_review(WorldState& w, const AddressId& opener, const ReviewRoundId& id,
                   std::vector<std::pair<AddressId, Digest32>> subjects,
                   std::vector<AddressId> reviewers, const PoolId& pool, Amount reward);
Status submit_score(WorldState& w, const AddressId& reviewer, const ReviewRoundId& id,
                    const AddressId& subject, std::uint8_t score);
Status settle_review(WorldState& w, const ReviewRoundId& id);

struct PpcRow {
  AddressId actor{};
  Amount promised = 0;
  Amount completed = 0;
};

/// Promised/completed counts for the given period, derived from the
/// commitment book. Period p covers ticks (p*len, (p+1)*len].
std::vector<PpcRow> ppc_rows(const WorldState& w, Tick period);

/// Validated transparency report: rows must equal ppc_rows for the period.
Status ppc_report(WorldState& w, const AddressId& reporter, const commons::PpcReport& cmd);

}  // namespace accountability
}  // namespace commons
