#include <algorithm>

#include "commons/rules.hpp"
#include "commons/support/rng.hpp"
#include "commons/tokens.hpp"
#include "commons/world.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace commons;
using namespace commons::testing;

namespace {

RuleProgramDef one_clause(ClauseType type, Amount amount = 0, Tick period = 0,
                          RoleName role = "", ClassId token_class = "", Tick from = 0,
                          Tick to = 0) {
  return RuleProgramDef{"r", {RuleClause{type, amount, period, role, token_class, from, to}}};
}

// Address whose sort order is pinned by its first byte.
AddressId addr(char fill) {
  AddressId a{};
  a.v.fill(static_cast<Byte>(fill));
  return a;
}

}  // namespace

TEST_CASE("per-actor cap counts prior appropriations in the current period") {
  auto t = make_world();
  auto rule = one_clause(ClauseType::PerActorCap, 10, 5);
  t.w.rules.emplace("r", rule);
  t.w.tick = 7;  // period [5, 9]

  t.w.appropriations["r"][t.alice] = {{2, 6}, {5, 4}, {6, 3}};
  CHECK(rules::appropriated_in_period(t.w, "r", t.alice, 7, 5) == 7);

  CHECK_FALSE(rules::evaluate(t.w, rule, t.alice, "budget", 3, 7).has_value());
  auto fail = rules::evaluate(t.w, rule, t.alice, "budget", 4, 7);
  REQUIRE(fail.has_value());
  CHECK(fail->index == 0);
  CHECK(fail->type == ClauseType::PerActorCap);

  // period 0: the whole history counts.
  CHECK(rules::appropriated_in_period(t.w, "r", t.alice, 7, 0) == 13);
  CHECK(rules::appropriated_in_period(t.w, "r", t.bob, 7, 5) == 0);
}

TEST_CASE("per-role allowance requires the role and respects the cap") {
  auto t = make_world();
  auto rule = one_clause(ClauseType::PerRoleAllowance, 10, 0, "buyer");
  CHECK(rules::evaluate(t.w, rule, t.alice, "budget", 1, 0)->type ==
        ClauseType::PerRoleAllowance);
  REQUIRE(tokens::grant_role(t.w, t.alice, "buyer", global_scope()).ok());
  CHECK_FALSE(rules::evaluate(t.w, rule, t.alice, "budget", 10, 0).has_value());
  CHECK(rules::evaluate(t.w, rule, t.alice, "budget", 11, 0).has_value());
}

TEST_CASE("pool floor blocks draws that would breach the reserve") {
  auto t = make_world();  // budget reserve 1000
  auto rule = one_clause(ClauseType::PoolFloor, 900);
  CHECK_FALSE(rules::evaluate(t.w, rule, t.alice, "budget", 100, 0).has_value());
  CHECK(rules::evaluate(t.w, rule, t.alice, "budget", 101, 0)->type == ClauseType::PoolFloor);
  // Unknown pool evaluates as an empty reserve.
  CHECK(rules::evaluate(t.w, rule, t.alice, "missing", 1, 0).has_value());
}

TEST_CASE("time window is inclusive on both ends") {
  auto t = make_world();
  auto rule = one_clause(ClauseType::TimeWindow, 0, 0, "", "", 3, 9);
  CHECK(rules::evaluate(t.w, rule, t.alice, "budget", 1, 2).has_value());
  CHECK_FALSE(rules::evaluate(t.w, rule, t.alice, "budget", 1, 3).has_value());
  CHECK_FALSE(rules::evaluate(t.w, rule, t.alice, "budget", 1, 9).has_value());
  CHECK(rules::evaluate(t.w, rule, t.alice, "budget", 1, 10).has_value());
}

TEST_CASE("require-role and require-token clauses") {
  auto t = make_world();
  auto need_role = one_clause(ClauseType::RequireRole, 0, 0, "monitor");
  CHECK(rules::evaluate(t.w, need_role, t.alice, "budget", 1, 0).has_value());
  CHECK_FALSE(rules::evaluate(t.w, need_role, t.monitor, "budget", 1, 0).has_value());

  auto need_token = one_clause(ClauseType::RequireToken, 11, 0, "", "reputation");
  CHECK(rules::evaluate(t.w, need_token, t.alice, "budget", 1, 0).has_value());  // holds 10
  REQUIRE(tokens::mint(t.w, "reputation", t.alice, 1).ok());
  CHECK_FALSE(rules::evaluate(t.w, need_token, t.alice, "budget", 1, 0).has_value());
}

TEST_CASE("conjunction reports the first failing clause") {
  auto t = make_world();
  RuleProgramDef rule{"r",
                      {RuleClause{ClauseType::PerActorCap, 100, 0, "", "", 0, 0},
                       RuleClause{ClauseType::TimeWindow, 0, 0, "", "", 5, 9},
                       RuleClause{ClauseType::RequireRole, 0, 0, "monitor", "", 0, 0}}};
  auto fail = rules::evaluate(t.w, rule, t.alice, "budget", 1, 2);
  REQUIRE(fail.has_value());
  CHECK(fail->index == 1);
  auto fail2 = rules::evaluate(t.w, rule, t.alice, "budget", 1, 6);
  REQUIRE(fail2.has_value());
  CHECK(fail2->index == 2);
  CHECK_FALSE(rules::evaluate(t.w, rule, t.monitor, "budget", 1, 6).has_value());
}

TEST_CASE("approval ids are deterministic and collision-discriminating") {
  auto a = rules::approval_id("r", addr('a'), 3, 17);
  CHECK(a == rules::approval_id("r", addr('a'), 3, 17));
  CHECK(a != rules::approval_id("r", addr('a'), 3, 18));
  CHECK(a != rules::approval_id("r", addr('a'), 4, 17));
  CHECK(a != rules::approval_id("r", addr('b'), 3, 17));
  CHECK(a != rules::approval_id("q", addr('a'), 3, 17));
  CHECK(a.substr(0, 4) == "apv-");
}

TEST_CASE("request_appropriation records history and issues the approval") {
  auto t = make_world();
  t.w.rules.emplace("r", one_clause(ClauseType::PerActorCap, 10, 0));

  CHECK(rules::request_appropriation(t.w, t.alice, "missing", "budget", 1).error().code ==
        Errc::UnknownRule);
  CHECK(rules::request_appropriation(t.w, t.alice, "r", "missing", 1).error().code ==
        Errc::UnknownPool);
  CHECK(rules::request_appropriation(t.w, t.alice, "r", "budget", 0).error().code ==
        Errc::InvalidPayload);

  auto id = rules::request_appropriation(t.w, t.alice, "r", "budget", 6);
  REQUIRE(id.ok());
  CHECK(t.w.approvals.at(id.value()).amount == 6);
  CHECK(t.w.appropriations.at("r").at(t.alice).size() == 1);

  // The cap now counts the accepted request.
  auto over = rules::request_appropriation(t.w, t.alice, "r", "budget", 5);
  REQUIRE_FALSE(over.ok());
  CHECK(over.error().code == Errc::Unauthorized);
  CHECK(rules::request_appropriation(t.w, t.alice, "r", "budget", 4).ok());
}

TEST_CASE("largest remainder matches the independent oracle") {
  std::vector<AddressId> ids;
  for (char ch : {'a', 'b', 'c', 'd', 'e', 'f'}) ids.push_back(addr(ch));

  for (int trial = 0; trial < 300; ++trial) {
    auto key = [&](std::uint64_t lane, std::uint64_t ctr) {
      return CounterRng::draw(kSeed + 2, static_cast<std::uint64_t>(trial), lane, ctr);
    };
    std::size_t n = CounterRng::bounded(key(1, 0), 6) + 1;
    Amount amount = static_cast<Amount>(CounterRng::bounded(key(2, 0), 200));
    std::vector<std::pair<AddressId, Amount>> weights;
    std::vector<Amount> plain;
    for (std::size_t i = 0; i < n; ++i) {
      Amount wgt = static_cast<Amount>(CounterRng::bounded(key(3, i), 30));
      weights.emplace_back(ids[i], wgt);
      plain.push_back(wgt);
    }
    auto got = rules::largest_remainder(weights, amount);
    auto want = lr_oracle(plain, amount);
    __int128 total = 0;
    for (Amount wgt : plain) total += wgt;
    CAPTURE(trial);
    if (total <= 0) {
      CHECK(got.empty());
      continue;
    }
    REQUIRE(got.size() == n);
    Amount sum = 0;
    for (std::size_t i = 0; i < n; ++i) {
      CHECK(got[i].to == ids[i]);
      CHECK(got[i].amount == want[i]);
      sum += got[i].amount;
    }
    CHECK(sum == amount);
  }
}

TEST_CASE("largest remainder breaks remainder ties toward the earlier entry") {
  // Equal weights, amount 1: exactly one unit, to the first address.
  std::vector<std::pair<AddressId, Amount>> weights = {{addr('a'), 5}, {addr('b'), 5},
                                                       {addr('c'), 5}};
  auto got = rules::largest_remainder(weights, 1);
  REQUIRE(got.size() == 3);
  CHECK(got[0].amount == 1);
  CHECK(got[1].amount == 0);
  CHECK(got[2].amount == 0);

  // amount 2: first two entries.
  got = rules::largest_remainder(weights, 2);
  CHECK(got[0].amount == 1);
  CHECK(got[1].amount == 1);
  CHECK(got[2].amount == 0);

  // Zero-weight entries never get a bump.
  weights = {{addr('a'), 0}, {addr('b'), 3}};
  got = rules::largest_remainder(weights, 2);
  CHECK(got[0].amount == 0);
  CHECK(got[1].amount == 2);
}

TEST_CASE("distribute_rewards splits by reputation and skips machines") {
  auto t = make_world();
  t.w.policies.emplace("share", DistributionPolicy{"share", "budget", "reputation"});

  // Tilt the weights: alice 30, bob 20, carol 10; admin/monitor 10 each.
  REQUIRE(tokens::mint(t.w, "reputation", t.alice, 20).ok());
  REQUIRE(tokens::mint(t.w, "reputation", t.bob, 10).ok());
  // Machines never share even when holding the weight class.
  REQUIRE(tokens::mint(t.w, "reputation", t.scheduler, 50).ok());

  auto r = rules::distribute_rewards(t.w, t.admin, "share", 80);
  REQUIRE(r.ok());
  Amount total = 0, to_alice = 0;
  for (const auto& pay : r.value()) {
    total += pay.amount;
    CHECK(pay.to != t.scheduler);
    if (pay.to == t.alice) to_alice = pay.amount;
  }
  CHECK(total == 80);
  CHECK(to_alice == 30);  // 80 * 30/80
  CHECK(t.credits(t.alice) == 1030);
  CHECK(conserved(t.w));

  SUBCASE("weights flatten to one each while reputation is off") {
    t.w.mech[9] = false;
    auto flat = rules::distribute_rewards(t.w, t.admin, "share", 5);
    REQUIRE(flat.ok());
    for (const auto& pay : flat.value()) CHECK(pay.amount == 1);
  }
  SUBCASE("reward-share reductions shave the weight") {
    t.w.reward_reductions[t.alice] = RewardReduction{500'000, t.w.tick + 10};
    auto cut = rules::distribute_rewards(t.w, t.admin, "share", 65);
    REQUIRE(cut.ok());
    for (const auto& pay : cut.value())
      if (pay.to == t.alice) CHECK(pay.amount == 15);  // weight 15 of 65
  }
  SUBCASE("reserve shortfall rejects the whole distribution") {
    auto broke = rules::distribute_rewards(t.w, t.admin, "share", 10'000);
    REQUIRE_FALSE(broke.ok());
    CHECK(broke.error().code == Errc::InsufficientReserve);
  }
}
