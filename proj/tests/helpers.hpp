#pragma once

// Shared fixtures and independent oracles. The oracles deliberately avoid
// the library's arithmetic paths: the curve oracle integrates numerically,
// the split oracle re-derives largest remainder from scratch, and the
// conviction oracle uses the geometric-series closed form.

#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "commons/engine.hpp"
#include "commons/keystore.hpp"
#include "commons/world.hpp"

namespace commons::testing {

inline constexpr std::uint64_t kSeed = 99;

struct TestWorld {
  WorldState w;
  Keystore ks;
  AddressId scheduler{}, admin{}, monitor{}, alice{}, bob{}, carol{};

  AddressId add(const std::string& name, ActorKind kind = ActorKind::Human) {
    auto id = ks.add_actor(w.world_seed, name);
    AddressRecord rec;
    rec.kind = kind;
    rec.name = name;
    rec.pubkey = ks.find(id)->pub;
    w.addresses.emplace(id, std::move(rec));
    return id;
  }

  AddressId add_member(const std::string& name, Amount credits = 1000) {
    auto id = add(name);
    (void)tokens::mint(w, "membership", id, 1);
    (void)tokens::mint(w, "credits", id, credits);
    (void)tokens::mint(w, "reputation", id, 10);
    return id;
  }

  Pool& pool(const PoolId& id) { return w.pools.at(id); }
  Amount credits(const AddressId& who) const { return tokens::balance(w, "credits", who); }
};

/// All mechanisms on, three token classes, five funded members, one pool.
inline TestWorld make_world() {
  TestWorld t;
  t.w.world_seed = kSeed;
  t.w.mech.fill(true);
  t.w.mech[0] = false;
  t.w.cfg.currency_class = "credits";
  t.w.cfg.membership_class = "membership";
  t.w.cfg.reputation_class = "reputation";
  t.w.cfg.court_stake_class = "credits";
  t.w.cfg.court_min_stake = 5;
  t.w.cfg.court_slash = 500'000;
  t.w.cfg.ladder.window = 20;
  t.w.cfg.ladder.steps = {WarningStep{}, ReputationSlashStep{250'000},
                          RewardShareReductionStep{500'000}, RemovalStep{}};

  auto cls = [&](const ClassId& id, bool transferable) {
    TokenClass c;
    c.id = id;
    c.display = id;
    c.transferable = transferable;
    t.w.classes.emplace(id, std::move(c));
  };
  cls("credits", true);
  cls("membership", false);
  cls("reputation", false);

  t.scheduler = t.add("scheduler", ActorKind::Machine);
  t.admin = t.add_member("admin");
  t.monitor = t.add_member("monitor");
  t.alice = t.add_member("alice");
  t.bob = t.add_member("bob");
  t.carol = t.add_member("carol");

  (void)tokens::grant_role(t.w, t.admin, "admin", global_scope());
  (void)tokens::grant_role(t.w, t.monitor, "monitor", global_scope());

  Pool p;
  p.id = "budget";
  p.currency = "credits";
  p.escrow = ensure_escrow(t.w, "pool", "budget");
  t.w.pools.emplace("budget", p);
  (void)tokens::mint(t.w, "credits", p.escrow, 1000);
  return t;
}

/// Three-node org: root "ipd" (admin), "design" (alice), "build" (bob, carol).
inline void add_org(TestWorld& t) {
  OrgNode root;
  root.id = "ipd";
  root.members = {t.admin, t.monitor};
  root.mandates = {"budget", "policy", "work"};
  OrgNode design;
  design.id = "design";
  design.parent = "ipd";
  design.members = {t.alice};
  OrgNode build;
  build.id = "build";
  build.parent = "ipd";
  build.members = {t.bob, t.carol};
  build.mandates = {"work"};
  t.w.org.emplace(root.id, root);
  t.w.org.emplace(design.id, design);
  t.w.org.emplace(build.id, build);
  t.w.org_root = "ipd";
}

// --- oracles ----------------------------------------------------------------

/// Numeric integral of the curve price over [0, supply].
inline double trapezoid_reserve(const BondingCurve& c, Amount supply, int steps = 4096) {
  if (supply <= 0) return 0.0;
  auto price = [&](double s) {
    return static_cast<double>(c.p0_num) / static_cast<double>(c.p0_den) +
           static_cast<double>(c.k_num) / static_cast<double>(c.k_den) * s;
  };
  double h = static_cast<double>(supply) / steps;
  double acc = 0.0;
  for (int i = 0; i < steps; ++i) acc += (price(h * i) + price(h * (i + 1))) * h / 2.0;
  return acc;
}

/// Independent largest-remainder: floor shares, then bumps by remainder
/// descending with ties toward the earlier entry.
inline std::vector<Amount> lr_oracle(const std::vector<Amount>& weights, Amount amount) {
  __int128 total = 0;
  for (Amount w : weights) total += w;
  std::vector<Amount> out(weights.size(), 0);
  if (total <= 0 || amount < 0) return out;
  std::vector<std::pair<__int128, std::size_t>> rema;
  Amount rest = amount;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    __int128 num = static_cast<__int128>(amount) * weights[i];
    out[i] = static_cast<Amount>(num / total);
    rest -= out[i];
    rema.emplace_back(num % total, i);
  }
  std::sort(rema.begin(), rema.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  });
  for (Amount i = 0; i < rest; ++i) out[rema[static_cast<std::size_t>(i)].second] += 1;
  return out;
}

/// Every length-n composition of `total` (for exhaustive split checking).
inline void compositions(std::size_t n, Amount total, std::vector<Amount>& cur,
                         std::vector<std::vector<Amount>>& out) {
  if (cur.size() + 1 == n) {
    cur.push_back(total);
    out.push_back(cur);
    cur.pop_back();
    return;
  }
  for (Amount x = 0; x <= total; ++x) {
    cur.push_back(x);
    compositions(n, total - x, cur, out);
    cur.pop_back();
  }
}

/// Brute-force largest remainder: enumerate every composition and keep the
/// one that floors every share and never bumps a smaller remainder over a
/// larger (ties resolved toward the earlier entry). Exactly one survives.
inline std::vector<std::vector<Amount>> lr_brute_force(const std::vector<Amount>& weights,
                                                       Amount amount) {
  __int128 total = 0;
  for (Amount w : weights) total += w;
  std::vector<std::vector<Amount>> all;
  if (total <= 0) return all;
  std::vector<Amount> cur;
  compositions(weights.size(), amount, cur, all);

  std::vector<Amount> base(weights.size());
  std::vector<__int128> rem(weights.size());
  for (std::size_t i = 0; i < weights.size(); ++i) {
    __int128 num = static_cast<__int128>(amount) * weights[i];
    base[i] = static_cast<Amount>(num / total);
    rem[i] = num % total;
  }

  std::vector<std::vector<Amount>> valid;
  for (const auto& alloc : all) {
    bool ok = true;
    for (std::size_t i = 0; ok && i < alloc.size(); ++i)
      if (alloc[i] != base[i] && alloc[i] != base[i] + 1) ok = false;
    for (std::size_t i = 0; ok && i < alloc.size(); ++i)
      for (std::size_t j = 0; ok && j < alloc.size(); ++j) {
        bool i_bumped = alloc[i] == base[i] + 1;
        bool j_bumped = alloc[j] == base[j] + 1;
        // j took a bump i deserved first.
        if (!i_bumped && j_bumped &&
            (rem[i] > rem[j] || (rem[i] == rem[j] && i < j)))
          ok = false;
      }
    if (ok) valid.push_back(alloc);
  }
  return valid;
}

/// Conviction after `t` whole steps of constant stake s: s(1-a^t)/(1-a).
inline double conviction_closed_form(double alpha, Amount stake, Tick t) {
  if (alpha == 0.0) return t > 0 ? static_cast<double>(stake) : 0.0;
  return static_cast<double>(stake) * (1.0 - std::pow(alpha, static_cast<double>(t))) /
         (1.0 - alpha);
}

/// Per-class conservation: every balance column sums to the recorded supply.
inline bool conserved(const WorldState& w) {
  for (const auto& [cls, tc] : w.classes) {
    Amount sum = 0;
    for (const auto& [addr, amt] : tc.balances) sum += amt;
    if (sum != tc.total_supply) return false;
  }
  return true;
}

}  // namespace commons::testing
