#include "commons/sim.hpp"

#include <algorithm>
#include <deque>
#include <set>

#include "commons/accountability.hpp"
#include "commons/rules.hpp"
#include "commons/support/rng.hpp"
#include "commons/tokens.hpp"

namespace commons::sim {
namespace {

constexpr std::uint64_t kShuffleTag = 0x5e1f'0a9e;
constexpr std::uint64_t kJitterTag = 0x6a17'7e52;

struct AgentState {
  const AgentSpec* spec = nullptr;
  AddressId addr{};
  std::uint64_t tag = 0;  // rng actor tag: position in the agents list
  Ppm greed_eff = 0;
  std::uint64_t seen_sanctions = 0;
  Amount hoard = 0;
  std::deque<CommitmentId> commitments;  // open, oldest first
};

std::uint64_t total_sanctions(const WorldState& w) {
  std::uint64_t n = 0;
  for (const auto& [addr, v] : w.sanctions) n += v.size();
  return n;
}

std::uint64_t total_violations(const WorldState& w) {
  std::uint64_t n = 0;
  for (const auto& [addr, v] : w.violations) n += v.size();
  return n;
}

class Runner {
 public:
  explicit Runner(const Scenario& s) : s_(s) {}

  Result<SimRun> run() {
    if (s_.mech[1] && s_.cfg.membership_class.empty())
      return Error{Errc::InvalidScenario, "config.membership_class: required while M1 is enabled"};
    if (!s_.agents.empty() && s_.mech[4] && (!s_.project || s_.project->rule.empty()))
      return Error{Errc::InvalidScenario, "project.rule: required while M4 is enabled"};

    auto genesis = scenario::build_genesis(s_, ks_);
    engine_.emplace(genesis);
    scheduler_ = *ks_.by_name(std::string(scenario::kSchedulerName));
    find_monitor();

    agents_.reserve(s_.agents.size());
    for (std::size_t i = 0; i < s_.agents.size(); ++i) {
      AgentState a;
      a.spec = &s_.agents[i];
      a.addr = *ks_.by_name(s_.agents[i].actor);
      a.tag = i + 1;
      a.greed_eff = s_.agents[i].greed;
      agents_.push_back(std::move(a));
    }

    metrics_.ticks = s_.ticks;
    if (s_.project) metrics_.packages_total = s_.project->packages;

    for (Tick t = 0; t < s_.ticks; ++t) {
      play_script(t);
      play_agents(t);
      report_ppc(t);
      sample(t);
      auto adv = engine_->act(ks_, scheduler_, TickAdvance{t + 1});
      if (!adv.ok())
        return Error{Errc::BadTick, "scheduler rejected at tick " + std::to_string(t) + ": " +
                                        adv.error().detail};
    }

    finish_metrics();
    SimRun out;
    out.genesis = std::move(genesis);
    out.final_state = engine_->state();
    out.log = engine_->log();
    out.metrics = std::move(metrics_);
    return out;
  }

 private:
  const WorldState& world() const { return engine_->state(); }

  bool act(const AddressId& author, Command cmd) {
    auto r = engine_->act(ks_, author, std::move(cmd));
    if (!r.ok()) ++metrics_.rejected;
    return r.ok();
  }

  void find_monitor() {
    for (const auto& a : s_.actors)
      for (const auto& [role, node] : a.roles)
        if (role == "monitor" && !node) {
          monitor_ = *ks_.by_name(a.name);
          return;
        }
  }

  Amount reserve() const {
    if (!s_.project) return 0;
    const auto& pool = world().pools.at(s_.project->pool);
    return tokens::balance(world(), pool.currency, pool.escrow);
  }

  void play_script(Tick t) {
    for (const auto& ev : s_.script) {
      if (ev.at != t) continue;
      Command cmd = ev.cmd;
      if (auto* wd = std::get_if<Withdraw>(&cmd); wd && wd->approval == "auto")
        wd->approval = resolve_approval(*ks_.by_name(ev.author), wd->pool, wd->amount);
      act(*ks_.by_name(ev.author), std::move(cmd));
    }
  }

  /// Newest unconsumed approval covering (author, pool, amount).
  std::optional<std::string> resolve_approval(const AddressId& who, const PoolId& pool,
                                              Amount amount) const {
    const Approval* best = nullptr;
    for (const auto& [id, ap] : world().approvals) {
      if (ap.consumed || ap.actor != who || ap.pool != pool || ap.amount < amount) continue;
      if (!best || ap.issued_at > best->issued_at) best = &ap;
    }
    if (!best) return std::nullopt;
    return best->id;
  }

  void play_agents(Tick t) {
    if (agents_.empty()) return;
    std::vector<std::size_t> order(agents_.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    for (std::size_t i = order.size() - 1; i > 0; --i) {
      auto j = CounterRng::bounded(CounterRng::draw(s_.seed, t, kShuffleTag, i), i + 1);
      std::swap(order[i], order[j]);
    }
    for (auto i : order) agent_turn(t, agents_[i]);
  }

  void agent_turn(Tick t, AgentState& a) {
    observe_sanctions(t, a);
    if (world().addresses.at(a.addr).removed) return;
    if (!s_.project) return;
    const auto& proj = *s_.project;
    if (metrics_.packages_done >= proj.packages) return;

    if (s_.mech[8]) refresh_commitments(t, a);

    Amount res = reserve();
    if (res <= 0) return;
    Amount desired = target(t, a, res);
    if (desired <= 0) return;
    Amount drawn = attempt_draw(t, a, desired, res);
    if (drawn >= proj.package_cost) {
      ++metrics_.packages_done;
      a.hoard += drawn - proj.package_cost;
      if (s_.mech[8]) complete_commitment(a);
    } else {
      a.hoard += drawn;
    }
  }

  void observe_sanctions(Tick t, AgentState& a) {
    auto cur = total_sanctions(world());
    if (cur <= a.seen_sanctions) return;
    if (a.spec->policy == PolicyKind::Deterrable) {
      auto before = a.greed_eff;
      for (auto n = a.seen_sanctions; n < cur; ++n)
        a.greed_eff = std::max<Ppm>(1, ppm_floor(a.greed_eff, a.spec->deterrence));
      if (a.greed_eff < before && !metrics_.first_greed_reduction)
        metrics_.first_greed_reduction = t;
    }
    a.seen_sanctions = cur;
  }

  Amount target(Tick t, const AgentState& a, Amount res) const {
    Amount fair = std::min(s_.project->package_cost, res);
    if (a.spec->policy == PolicyKind::Honest) return fair;
    // Greedy target: a jittered share of whatever is left, never below the
    // amount one package needs.
    Ppm g = a.greed_eff;
    Ppm span = g / 16 + 1;
    Ppm j = static_cast<Ppm>(CounterRng::bounded(CounterRng::draw(s_.seed, t, kJitterTag, a.tag),
                                                 static_cast<std::uint64_t>(span)));
    g = std::max<Ppm>(1, g - g / 32 + j);
    Amount want = ppm_ceil(res, std::min<Ppm>(g, kPpmOne));
    return std::min(res, std::max(want, fair));
  }

  Amount attempt_draw(Tick t, AgentState& a, Amount desired, Amount res) {
    const auto& proj = *s_.project;
    if (!s_.mech[4]) {
      return act(a.addr, UnguardedDraw{proj.pool, desired}) ? desired : 0;
    }
    if (draw_via_rule(t, a, desired)) return desired;
    // The request exceeded what the rules allow; the monitor saw it.
    Amount fair = std::min(proj.package_cost, res);
    if (desired > fair && monitor_ && s_.mech[11])
      act(*monitor_, RecordViolation{a.addr, ViolationKind::RuleBreach, std::nullopt});
    if (fair > 0 && fair != desired && draw_via_rule(t, a, fair)) return fair;
    return 0;
  }

  bool draw_via_rule(Tick t, AgentState& a, Amount amount) {
    const auto& proj = *s_.project;
    if (!act(a.addr, RequestAppropriation{proj.rule, proj.pool, amount})) return false;
    auto apv = rules::approval_id(proj.rule, a.addr, t, world().applied - 1);
    return act(a.addr, Withdraw{proj.pool, a.addr, amount, apv});
  }

  void refresh_commitments(Tick t, AgentState& a) {
    // Drop commitments the clock already expired.
    while (!a.commitments.empty()) {
      const auto& c = world().commitments.at(a.commitments.front());
      if (c.status == CommitmentStatus::Open) break;
      a.commitments.pop_front();
    }
    if (!a.commitments.empty()) return;
    CommitmentId id = "c-" + a.spec->actor + "-" + std::to_string(t);
    std::optional<RuleId> terms;
    if (!s_.project->rule.empty()) terms = s_.project->rule;
    if (act(a.addr, Commit{id, crypto::sha256(id), t + s_.project->commit_lead, terms}))
      a.commitments.push_back(id);
  }

  void complete_commitment(AgentState& a) {
    if (a.commitments.empty()) return;
    const auto& id = a.commitments.front();
    if (world().commitments.at(id).status == CommitmentStatus::Open &&
        act(a.addr, ReportComplete{id}))
      a.commitments.pop_front();
  }

  void report_ppc(Tick t) {
    if (!monitor_) return;
    auto len = world().cfg.ppc_period_len;
    if (len == 0 || t == 0 || t % len != 0) return;
    Tick period = t / len - 1;
    if (world().ppc_reported.count(period)) return;
    PpcReport rep;
    rep.period = period;
    for (const auto& row : accountability::ppc_rows(world(), period))
      rep.rows.emplace_back(row.actor, row.promised, row.completed);
    act(*monitor_, std::move(rep));
  }

  void sample(Tick t) {
    TickSample ts;
    ts.tick = t;
    ts.reserve = reserve();
    ts.done = metrics_.packages_done;
    ts.violations = total_violations(world());
    ts.sanctions = total_sanctions(world());
    metrics_.series.push_back(ts);
    if (s_.project && ts.reserve == 0 && !metrics_.depletion_tick) {
      metrics_.depletion_tick = t;
      metrics_.done_at_depletion = metrics_.packages_done;
    }
  }

  void finish_metrics() {
    metrics_.completion =
        metrics_.packages_total > 0
            ? static_cast<double>(metrics_.packages_done) / metrics_.packages_total
            : 0.0;
    metrics_.tragedy =
        metrics_.depletion_tick.has_value() && metrics_.done_at_depletion < metrics_.packages_total;
    const auto& log = engine_->log();
    metrics_.accepted = log.events.size();
    for (const auto& ev : log.events) {
      metrics_.events_by_kind[std::string(command_kind_name(ev.payload))] += 1;
      if (const auto* rep = std::get_if<PpcReport>(&ev.payload)) {
        PpcPoint pt;
        pt.period = rep->period;
        for (const auto& [actor, promised, completed] : rep->rows) {
          pt.promised += promised;
          pt.completed += completed;
        }
        metrics_.ppc.push_back(pt);
      }
    }
  }

  const Scenario& s_;
  Keystore ks_;
  std::optional<Engine> engine_;
  AddressId scheduler_{};
  std::optional<AddressId> monitor_;
  std::vector<AgentState> agents_;
  SimMetrics metrics_;
};

}  // namespace

Result<SimRun> run(const Scenario& s) { return Runner(s).run(); }

TragedyCall tragedy_metric(const SimMetrics& m) {
  TragedyCall out;
  out.tragedy = m.depletion_tick.has_value() && m.done_at_depletion < m.packages_total;
  if (m.depletion_tick) out.margin = m.ticks - *m.depletion_tick;
  return out;
}

Result<AbResult> ab_compare(const Scenario& s, const std::vector<int>& switches) {
  std::set<int> uniq;
  for (int m : switches) {
    if (m < 1 || m > kMechanismCount)
      return Error{Errc::InvalidPayload, "unknown mechanism M" + std::to_string(m)};
    if (m == 7) return Error{Errc::InvalidPayload, "M7 cannot be switched"};
    uniq.insert(m);
  }
  Scenario flipped = s;
  for (int m : uniq) flipped.mech[m] = !flipped.mech[m];

  AbResult out;
  out.switched.assign(uniq.begin(), uniq.end());
  auto a = run(s);
  if (!a.ok()) return a.error();
  auto b = run(flipped);
  if (!b.ok()) return b.error();
  out.a = std::move(a.value());
  out.b = std::move(b.value());
  return out;
}

}  // namespace commons::sim
