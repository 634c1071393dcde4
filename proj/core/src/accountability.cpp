#include "commons/accountability.hpp"

#include <algorithm>
#include <utility>

#include "commons/commands.hpp"
#include "commons/rules.hpp"
#include "commons/tokens.hpp"
#include "commons/world.hpp"

namespace commons::accountability {

Status commit(WorldState& w, const AddressId& actor, const CommitmentId& id,
              const Digest32& package, Tick promised_tick, const std::optional<RuleId>& terms) {
  if (id.empty()) return Error{Errc::InvalidPayload, "empty commitment id"};
  if (w.commitments.contains(id)) return Error{Errc::DuplicateId, "commitment " + id};
  if (promised_tick <= w.tick)
    return Error{Errc::InvalidPayload, "promised tick already passed"};
  if (terms && !w.rules.contains(*terms)) return Error{Errc::UnknownRule, *terms};

  Commitment c;
  c.id = id;
  c.actor = actor;
  c.package = package;
  c.committed_at = w.tick;
  c.promised_tick = promised_tick;
  c.terms = terms;
  w.commitments.emplace(id, std::move(c));
  return ok_status();
}

Status report_complete(WorldState& w, const AddressId& actor, const CommitmentId& id) {
  auto it = w.commitments.find(id);
  if (it == w.commitments.end()) return Error{Errc::UnknownCommitment, id};
  Commitment& c = it->second;
  if (c.actor != actor) return Error{Errc::Unauthorized, "not the committed party"};
  if (c.status != CommitmentStatus::Open) return Error{Errc::AlreadyClosed, id};
  c.status = CommitmentStatus::Completed;
  c.completed_at = w.tick;
  return ok_status();
}

std::vector<AddressId> expire_commitments(WorldState& w) {
  std::vector<AddressId> missed;
  for (auto& [id, c] : w.commitments) {
    if (c.status != CommitmentStatus::Open) continue;
    if (w.tick <= c.promised_tick) continue;
    c.status = CommitmentStatus::Missed;
    missed.push_back(c.actor);
  }
  return missed;
}

Status open_review(WorldState& w, const AddressId& opener, const ReviewRoundId& id,
                   std::vector<std::pair<AddressId, Digest32>> subjects,
                   std::vector<AddressId> reviewers, const PoolId& pool, Amount reward) {
  if (id.empty()) return Error{Errc::InvalidPayload, "empty review id"};
  if (w.reviews.contains(id)) return Error{Errc::DuplicateId, "review " + id};
  if (subjects.empty()) return Error{Errc::InvalidPayload, "no subjects"};
  if (reviewers.empty()) return Error{Errc::InvalidPayload, "no reviewers"};
  auto pit = w.pools.find(pool);
  if (pit == w.pools.end()) return Error{Errc::UnknownPool, pool};
  if (reward <= 0) return Error{Errc::InvalidPayload, "non-positive reward"};
  for (const auto& [subject, package] : subjects)
    if (!w.addresses.contains(subject)) return Error{Errc::UnknownAddress, "review subject"};
  for (const auto& reviewer : reviewers)
    if (!w.addresses.contains(reviewer)) return Error{Errc::UnknownAddress, "reviewer"};

  ReviewRound r;
  r.id = id;
  r.opener = opener;
  r.subjects = std::move(subjects);
  r.reviewers = std::move(reviewers);
  r.pool = pool;
  r.reward = reward;
  r.escrow = ensure_escrow(w, "review", id);
  if (auto s = tokens::transfer(w, pit->second.escrow, pit->second.currency, r.escrow, reward);
      !s.ok())
    return s;
  w.reviews.emplace(id, std::move(r));
  return ok_status();
}

Status submit_score(WorldState& w, const AddressId& reviewer, const ReviewRoundId& id,
                    const AddressId& subject, std::uint8_t score) {
  auto it = w.reviews.find(id);
  if (it == w.reviews.end()) return Error{Errc::UnknownReviewRound, id};
  ReviewRound& r = it->second;
  if (r.status != ReviewStatus::Open) return Error{Errc::AlreadyClosed, id};
  if (std::find(r.reviewers.begin(), r.reviewers.end(), reviewer) == r.reviewers.end())
    return Error{Errc::Unauthorized, "not on the review panel"};
  bool listed = std::any_of(r.subjects.begin(), r.subjects.end(),
                            [&](const auto& s) { return s.first == subject; });
  if (!listed) return Error{Errc::UnknownAddress, "not a review subject"};
  if (reviewer == subject) return Error{Errc::SelfReview, id};
  if (score > 100) return Error{Errc::InvalidPayload, "score above 100"};
  auto& row = r.scores[reviewer];
  if (row.contains(subject)) return Error{Errc::DoubleVote, "score already in"};
  row.emplace(subject, score);
  return ok_status();
}

Status settle_review(WorldState& w, const ReviewRoundId& id) {
  auto it = w.reviews.find(id);
  if (it == w.reviews.end()) return Error{Errc::UnknownReviewRound, id};
  ReviewRound& r = it->second;
  if (r.status != ReviewStatus::Open) return Error{Errc::AlreadyClosed, id};

  for (const auto& reviewer : r.reviewers) {
    auto row = r.scores.find(reviewer);
    for (const auto& [subject, package] : r.subjects) {
      if (subject == reviewer) continue;
      if (row == r.scores.end() || !row->second.contains(subject))
        return Error{Errc::IncompleteScores, id};
    }
  }

  std::vector<std::pair<AddressId, Amount>> totals;
  Amount grand = 0;
  for (const auto& [subject, package] : r.subjects) {
    Amount total = 0;
    for (const auto& [reviewer, row] : r.scores) {
      auto sc = row.find(subject);
      if (sc != row.end()) total += sc->second;
    }
    totals.emplace_back(subject, total);
    grand += total;
  }
  std::stable_sort(totals.begin(), totals.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });

  auto pit = w.pools.find(r.pool);
  if (pit == w.pools.end()) return Error{Errc::UnknownPool, r.pool};
  if (grand == 0) {
    // Nothing scored above zero: the reward goes back to the pool.
    if (auto s =
            tokens::transfer(w, r.escrow, pit->second.currency, pit->second.escrow, r.reward);
        !s.ok())
      return s;
  } else {
    for (const auto& pay : rules::largest_remainder(totals, r.reward)) {
      if (pay.amount == 0) continue;
      if (auto s = tokens::transfer(w, r.escrow, pit->second.currency, pay.to, pay.amount);
          !s.ok())
        return s;
    }
  }

  if (w.mechanism_on(9) && !w.cfg.reputation_class.empty()) {
    for (const auto& [subject, total] : totals) {
      if (total == 0) continue;
      if (auto s = tokens::mint(w, w.cfg.reputation_class, subject, total); !s.ok()) return s;
    }
  }
  r.status = ReviewStatus::Settled;
  return ok_status();
}

std::vector<PpcRow> ppc_rows(const WorldState& w, Tick period) {
  Tick len = w.cfg.ppc_period_len;
  Tick lo = period * len;  // exclusive
  Tick hi = lo + len;      // inclusive
  std::map<AddressId, PpcRow> rows;
  for (const auto& [id, c] : w.commitments) {
    if (c.promised_tick <= lo || c.promised_tick > hi) continue;
    auto& row = rows[c.actor];
    row.actor = c.actor;
    row.promised += 1;
    if (c.status == CommitmentStatus::Completed && c.completed_at <= c.promised_tick)
      row.completed += 1;
  }
  std::vector<PpcRow> out;
  out.reserve(rows.size());
  for (auto& [actor, row] : rows) out.push_back(row);
  return out;
}

Status ppc_report(WorldState& w, const AddressId&, const commons::PpcReport& cmd) {
  Tick len = w.cfg.ppc_period_len;
  if (len == 0) return Error{Errc::InvalidPayload, "zero reporting period"};
  if ((cmd.period + 1) * len > w.tick)
    return Error{Errc::NotYetDeadline, "period still running"};
  if (w.ppc_reported.contains(cmd.period)) return Error{Errc::DuplicateId, "period reported"};

  auto expect = ppc_rows(w, cmd.period);
  if (cmd.rows.size() != expect.size())
    return Error{Errc::InvalidPayload, "row count off the commitment book"};
  for (std::size_t i = 0; i < expect.size(); ++i) {
    const auto& [actor, promised, completed] = cmd.rows[i];
    if (actor != expect[i].actor || promised != expect[i].promised ||
        completed != expect[i].completed)
      return Error{Errc::InvalidPayload, "row " + std::to_string(i) + " off the commitment book"};
  }
  w.ppc_reported.insert(cmd.period);
  return ok_status();
}

}  // namespace commons::accountability
