#include "commons/enforcement.hpp"

#include <algorithm>
#include <utility>

#include "commons/rules.hpp"
#include "commons/tokens.hpp"
#include "commons/world.hpp"

namespace commons {

std::string sanction_step_name(const SanctionStep& s) {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, WarningStep>) return "warning";
        else if constexpr (std::is_same_v<T, ReputationSlashStep>) return "reputation_slash";
        else if constexpr (std::is_same_v<T, RewardShareReductionStep>)
          return "reward_share_reduction";
        else return "removal";
      },
      s);
}

namespace enforcement {

namespace {

Status enact(WorldState& w, const AddressId& actor, std::uint32_t step) {
  const auto& ladder = w.cfg.ladder.steps;
  if (step >= ladder.size()) return Error{Errc::InvalidPayload, "step off the ladder"};

  const SanctionStep& rung = ladder[step];
  if (const auto* slash = std::get_if<ReputationSlashStep>(&rung)) {
    if (w.mechanism_on(9) && !w.cfg.reputation_class.empty()) {
      Amount held = tokens::balance(w, w.cfg.reputation_class, actor);
      Amount cut = ppm_floor(held, slash->share);
      if (cut > 0)
        if (auto s = tokens::burn(w, w.cfg.reputation_class, actor, cut); !s.ok()) return s;
    }
  } else if (const auto* cut = std::get_if<RewardShareReductionStep>(&rung)) {
    w.reward_reductions[actor] = RewardReduction{cut->share, w.tick + w.cfg.ladder.window};
  } else if (std::holds_alternative<RemovalStep>(rung)) {
    auto it = w.addresses.find(actor);
    if (it == w.addresses.end()) return Error{Errc::UnknownAddress, "sanction target"};
    it->second.removed = true;
    if (!w.cfg.membership_class.empty()) {
      Amount held = tokens::balance(w, w.cfg.membership_class, actor);
      if (held > 0)
        if (auto s = tokens::burn(w, w.cfg.membership_class, actor, held); !s.ok()) return s;
    }
  }
  w.sanctions[actor].push_back(AppliedSanction{step, w.tick, w.applied});
  return ok_status();
}

}  // namespace

std::vector<ViolationRecord> window_violations(const WorldState& w, const AddressId& actor,
                                               Tick tick) {
  std::vector<ViolationRecord> out;
  auto it = w.violations.find(actor);
  if (it == w.violations.end()) return out;
  Tick window = w.cfg.ladder.window;
  for (const auto& v : it->second)
    if (window == 0 || v.at + window > tick) out.push_back(v);
  return out;
}

std::uint32_t next_step(const WorldState& w, const AddressId& actor, Tick tick) {
  auto n = window_violations(w, actor, tick).size();
  if (n == 0) return 0;
  std::size_t last = w.cfg.ladder.steps.empty() ? 0 : w.cfg.ladder.steps.size() - 1;
  return static_cast<std::uint32_t>(std::min(n - 1, last));
}

Result<std::optional<std::uint32_t>> record_violation(WorldState& w, const AddressId&,
                                                      const AddressId& actor, ViolationKind kind,
                                                      const std::optional<NodeId>& scope) {
  if (!w.addresses.contains(actor)) return Error{Errc::UnknownAddress, "violation target"};
  if (scope && !w.org.contains(*scope)) return Error{Errc::UnknownNode, *scope};
  w.violations[actor].push_back(ViolationRecord{kind, w.tick, scope, w.applied});

  if (!w.cfg.auto_sanctions || w.cfg.ladder.steps.empty()) return std::optional<std::uint32_t>{};
  std::uint32_t step = next_step(w, actor, w.tick);
  if (auto s = enact(w, actor, step); !s.ok()) return s.error();
  return std::optional<std::uint32_t>{step};
}

Status apply_sanction(WorldState& w, const AddressId& actor, std::uint32_t step,
                      const std::optional<NodeId>& scope) {
  if (w.cfg.auto_sanctions)
    return Error{Errc::InvalidPayload, "sanctions apply automatically here"};
  if (!w.addresses.contains(actor)) return Error{Errc::UnknownAddress, "sanction target"};
  if (window_violations(w, actor, w.tick).empty())
    return Error{Errc::InvalidPayload, "no violation on record"};
  std::uint32_t due = next_step(w, actor, w.tick);
  if (step != due) return Error{Errc::OutOfOrder, "ladder step " + std::to_string(due) + " due"};
  if (scope && !w.org.contains(*scope)) return Error{Errc::UnknownNode, *scope};
  return enact(w, actor, step);
}

Status open_dispute(WorldState& w, const AddressId& claimant, const OpenDispute& cmd) {
  if (cmd.id.empty()) return Error{Errc::InvalidPayload, "empty dispute id"};
  if (w.disputes.contains(cmd.id)) return Error{Errc::DuplicateId, "dispute " + cmd.id};
  if (!w.addresses.contains(cmd.defendant)) return Error{Errc::UnknownAddress, "defendant"};
  if (cmd.defendant == claimant) return Error{Errc::InvalidPayload, "self-dispute"};
  if (cmd.scope && !w.org.contains(*cmd.scope)) return Error{Errc::UnknownNode, *cmd.scope};
  if (w.cfg.court_stake_class.empty() || !w.classes.contains(w.cfg.court_stake_class))
    return Error{Errc::UnknownClass, "court stake class"};

  Dispute d;
  d.id = cmd.id;
  d.claimant = claimant;
  d.defendant = cmd.defendant;
  d.claim = cmd.claim;
  d.scope = cmd.scope;
  d.remedy_violation = cmd.remedy_violation;
  d.escrow = ensure_escrow(w, "dispute", cmd.id);
  w.disputes.emplace(cmd.id, std::move(d));
  return ok_status();
}

Status stake_juror(WorldState& w, const AddressId& juror, const DisputeId& id, Amount stake) {
  auto it = w.disputes.find(id);
  if (it == w.disputes.end()) return Error{Errc::UnknownDispute, id};
  Dispute& d = it->second;
  if (d.status != DisputeStatus::Open) return Error{Errc::AlreadyFinal, id};
  if (juror == d.claimant || juror == d.defendant)
    return Error{Errc::Unauthorized, "parties cannot judge their own case"};
  auto addr = w.addresses.find(juror);
  if (addr == w.addresses.end()) return Error{Errc::UnknownAddress, "juror"};
  if (addr->second.kind == ActorKind::Machine)
    return Error{Errc::MachineVoter, "machines hold no verdict"};
  if (stake < w.cfg.court_min_stake) return Error{Errc::InsufficientStake, id};
  for (const auto& j : d.jurors)
    if (j.juror == juror) return Error{Errc::DuplicateEntry, "already on the panel"};
  if (auto s = tokens::transfer(w, juror, w.cfg.court_stake_class, d.escrow, stake); !s.ok())
    return s;
  d.jurors.push_back(JurorStake{juror, stake, w.applied});
  return ok_status();
}

Status vote_verdict(WorldState& w, const AddressId& juror, const DisputeId& id, bool uphold) {
  auto it = w.disputes.find(id);
  if (it == w.disputes.end()) return Error{Errc::UnknownDispute, id};
  Dispute& d = it->second;
  if (d.status != DisputeStatus::Open) return Error{Errc::AlreadyFinal, id};
  bool seated = std::any_of(d.jurors.begin(), d.jurors.end(),
                            [&](const JurorStake& j) { return j.juror == juror; });
  if (!seated) return Error{Errc::Unauthorized, "not on the panel"};
  if (d.verdicts.contains(juror)) return Error{Errc::DoubleVote, id};
  d.verdicts.emplace(juror, uphold);
  return ok_status();
}

Result<VerdictOutcome> resolve_dispute(WorldState& w, const DisputeId& id) {
  auto it = w.disputes.find(id);
  if (it == w.disputes.end()) return Error{Errc::UnknownDispute, id};
  Dispute& d = it->second;
  if (d.status != DisputeStatus::Open) return Error{Errc::AlreadyFinal, id};
  if (d.jurors.size() < 3) return Error{Errc::TooFewJurors, id};
  for (const auto& j : d.jurors)
    if (!d.verdicts.contains(j.juror)) return Error{Errc::IncompleteScores, "verdicts missing"};

  // An even panel drops the latest juror: their vote abstains, their stake
  // rides home untouched.
  std::vector<JurorStake> counted = d.jurors;
  if (counted.size() % 2 == 0) {
    auto latest = std::max_element(counted.begin(), counted.end(),
                                   [](const JurorStake& a, const JurorStake& b) {
                                     return a.seq < b.seq;
                                   });
    const AddressId dropped = latest->juror;
    Amount back = latest->stake;
    counted.erase(latest);
    if (auto s = tokens::transfer(w, d.escrow, w.cfg.court_stake_class, dropped, back); !s.ok())
      return s.error();
  }

  std::size_t yes = 0;
  for (const auto& j : counted)
    if (d.verdicts.at(j.juror)) ++yes;
  bool upheld = yes * 2 > counted.size();

  VerdictOutcome out;
  out.upheld = upheld;
  std::map<AddressId, Amount> majority;
  std::vector<std::pair<AddressId, Amount>> minority;
  for (const auto& j : counted) {
    if (d.verdicts.at(j.juror) == upheld)
      majority[j.juror] += j.stake;
    else
      minority.emplace_back(j.juror, j.stake);
  }

  for (const auto& [juror, stake] : minority) {
    Amount cut = ppm_floor(stake, w.cfg.court_slash);
    out.slashed += cut;
    if (auto s = tokens::transfer(w, d.escrow, w.cfg.court_stake_class, juror, stake - cut);
        !s.ok())
      return s.error();
  }
  for (const auto& [juror, stake] : majority) {
    if (auto s = tokens::transfer(w, d.escrow, w.cfg.court_stake_class, juror, stake); !s.ok())
      return s.error();
  }
  if (out.slashed > 0) {
    std::vector<std::pair<AddressId, Amount>> weights(majority.begin(), majority.end());
    for (const auto& pay : rules::largest_remainder(weights, out.slashed)) {
      if (pay.amount == 0) continue;
      if (auto s = tokens::transfer(w, d.escrow, w.cfg.court_stake_class, pay.to, pay.amount);
          !s.ok())
        return s.error();
    }
  }

  d.status = DisputeStatus::Resolved;
  d.upheld = upheld;
  if (upheld && d.remedy_violation) {
    auto rec = record_violation(w, d.claimant, d.defendant, ViolationKind::VerdictNonCompliance,
                                d.scope);
    if (!rec.ok()) return rec.error();
  }
  return out;
}

}  // namespace enforcement
}  // namespace commons
