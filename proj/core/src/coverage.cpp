#include "commons/coverage.hpp"

#include <algorithm>
#include <sstream>

#include "commons/concept_map.hpp"
#include "commons/engine.hpp"
#include "commons/enforcement.hpp"

namespace commons {

std::size_t CoverageReport::mechanisms_hit() const {
  return static_cast<std::size_t>(
      std::count_if(mechanisms.begin(), mechanisms.end(),
                    [](const auto& kv) { return kv.second > 0; }));
}

std::size_t CoverageReport::applications_hit() const {
  return static_cast<std::size_t>(
      std::count_if(applications.begin(), applications.end(),
                    [](const auto& kv) { return kv.second > 0; }));
}

namespace coverage {

namespace {

int app_mechanism(const std::string& app) {
  auto dash = app.find('-');
  return parse_mechanism(app.substr(0, dash));
}

bool warning_due(const WorldState& w, const AddressId& actor, bool counting_new_violation) {
  const auto& steps = w.cfg.ladder.steps;
  if (steps.empty()) return false;
  auto n = enforcement::window_violations(w, actor, w.tick).size() +
           (counting_new_violation ? 1 : 0);
  if (n == 0) return false;
  std::size_t step = std::min(n - 1, steps.size() - 1);
  return std::holds_alternative<WarningStep>(steps[step]);
}

}  // namespace

std::vector<std::string> attribute(const WorldState& w, const SignedEvent& ev) {
  std::vector<std::string> out;
  auto add = [&](const std::string& app) {
    int m = app_mechanism(app);
    if (m != 7 && !w.mechanism_on(m)) return;
    if (std::find(out.begin(), out.end(), app) == out.end()) out.push_back(app);
  };

  // Every accepted event lands on the transparent shared ledger.
  out.push_back("M7-1");

  auto author = w.addresses.find(ev.author);
  if (author != w.addresses.end() && author->second.kind == ActorKind::Machine) add("M1-2");

  std::visit(
      [&](const auto& c) {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, Mint> || std::is_same_v<T, Burn>) {
          add(c.cls == w.cfg.membership_class ? "M1-1" : "M2-1");
        } else if constexpr (std::is_same_v<T, GrantRole> || std::is_same_v<T, RevokeRole>) {
          add("M1-1");
        } else if constexpr (std::is_same_v<T, Transfer> || std::is_same_v<T, Deposit> ||
                             std::is_same_v<T, UnguardedDraw>) {
          add("M2-1");
        } else if constexpr (std::is_same_v<T, Withdraw>) {
          add("M2-1");
          add("M4-1");
        } else if constexpr (std::is_same_v<T, CurveBuy> || std::is_same_v<T, CurveSell>) {
          add("M2-2");
        } else if constexpr (std::is_same_v<T, RequestAppropriation>) {
          add("M4-1");
        } else if constexpr (std::is_same_v<T, DistributeRewards>) {
          add("M4-2");
        } else if constexpr (std::is_same_v<T, PostTender> || std::is_same_v<T, CloseAuction>) {
          add("M3-1");
        } else if constexpr (std::is_same_v<T, SubmitBid>) {
          add("M3-1");
          auto t = w.tenders.find(c.tender);
          if (t != w.tenders.end() && t->second.min_reputation > 0) add("M9-1");
        } else if constexpr (std::is_same_v<T, OpenMarket> || std::is_same_v<T, Bet> ||
                             std::is_same_v<T, ResolveMarket> ||
                             std::is_same_v<T, SettleMarket>) {
          add("M6-1");
        } else if constexpr (std::is_same_v<T, CreateProposal>) {
          add("M5-1");
          add("M5-2");
          if (!c.route_affected.empty()) add("M14-1");
          if (c.scope && w.mechanism_on(13)) add("M13-1");
        } else if constexpr (std::is_same_v<T, CastVote> || std::is_same_v<T, Unstake> ||
                             std::is_same_v<T, TallyProposal> ||
                             std::is_same_v<T, ExecuteProposal>) {
          add("M5-1");
          auto p = w.proposals.find(c.proposal);
          if (p != w.proposals.end() && p->second.scope && w.mechanism_on(13)) add("M13-1");
        } else if constexpr (std::is_same_v<T, EscalateProposal>) {
          add("M5-1");
          add("M14-1");
          auto p = w.proposals.find(c.proposal);
          if (p != w.proposals.end() && p->second.scope && w.mechanism_on(13)) add("M13-1");
        } else if constexpr (std::is_same_v<T, TcrApply> || std::is_same_v<T, TcrChallenge> ||
                             std::is_same_v<T, TcrVote> || std::is_same_v<T, TcrResolve>) {
          add("M5-1");
          add("M1-1");
        } else if constexpr (std::is_same_v<T, Commit>) {
          add("M8-1");
        } else if constexpr (std::is_same_v<T, ReportComplete>) {
          add("M8-1");
          for (const auto& [id, rule] : w.incentives)
            if (rule.trigger == "on_time_completion") add("M4-3");
        } else if constexpr (std::is_same_v<T, OpenReview> || std::is_same_v<T, SubmitScore>) {
          add("M10-1");
        } else if constexpr (std::is_same_v<T, SettleReview>) {
          add("M10-1");
          if (w.mechanism_on(9)) add("M9-1");
        } else if constexpr (std::is_same_v<T, PpcReport>) {
          add("M7-2");
          add("M11-2");
          for (const auto& [id, rule] : w.incentives)
            if (rule.trigger == "ppc_perfect") add("M4-3");
        } else if constexpr (std::is_same_v<T, RecordViolation>) {
          if (!w.cfg.auto_sanctions || warning_due(w, c.actor, true))
            add("M11-2");
          else
            add("M11-1");
          if (c.scope && w.mechanism_on(13)) add("M13-1");
        } else if constexpr (std::is_same_v<T, ApplySanction>) {
          if (warning_due(w, c.actor, false))
            add("M11-2");
          else
            add("M11-1");
          if (c.scope && w.mechanism_on(13)) add("M13-1");
        } else if constexpr (std::is_same_v<T, OpenDispute>) {
          add("M12-1");
          if (c.scope && w.mechanism_on(13)) add("M13-1");
        } else if constexpr (std::is_same_v<T, StakeJuror>) {
          add("M12-1");
          add("M12-2");
        } else if constexpr (std::is_same_v<T, VoteVerdict> ||
                             std::is_same_v<T, ResolveDispute>) {
          add("M12-1");
        } else if constexpr (std::is_same_v<T, Delegate> ||
                             std::is_same_v<T, RevokeDelegation>) {
          add("M14-1");
          if (w.mechanism_on(13)) add("M13-1");
        }
      },
      ev.payload);
  return out;
}

Result<CoverageReport> report(WorldState genesis, const EventLog& log) {
  CoverageReport rep;
  for (const auto& mech : concept_map::builtin().mechanisms) rep.mechanisms[mech.id] = 0;
  for (const auto& app : concept_map::builtin().applications) rep.applications[app.id] = 0;

  WorldState w = std::move(genesis);
  for (const auto& ev : log.events) {
    auto apps = attribute(w, ev);
    if (auto s = fold_event(w, log.genesis, ev); !s.ok())
      return Error{s.error().code,
                   "event " + std::to_string(ev.seq) + ": " + s.error().detail};
    rep.events += 1;
    for (const auto& app : apps) {
      rep.applications[app] += 1;
      rep.mechanisms[mechanism_tag(app_mechanism(app))] += 1;
    }
  }

  for (const auto& [id, n] : rep.mechanisms)
    if (n == 0) rep.mechanism_gaps.push_back(id);
  for (const auto& [id, n] : rep.applications)
    if (n == 0) rep.application_gaps.push_back(id);
  return rep;
}

std::string to_tsv(const CoverageReport& r) {
  std::ostringstream out;
  out << "kind\tid\tevents\n";
  for (const auto& mech : concept_map::builtin().mechanisms)
    out << "mechanism\t" << mech.id << '\t' << r.mechanisms.at(mech.id) << '\n';
  for (const auto& app : concept_map::builtin().applications)
    out << "application\t" << app.id << '\t' << r.applications.at(app.id) << '\n';
  return out.str();
}

}  // namespace coverage
}  // namespace commons
