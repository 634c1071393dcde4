#include "doctest.h"

#include "commons/support/rng.hpp"
#include "commons/tokens.hpp"
#include "helpers.hpp"

using namespace commons;
using namespace commons::testing;

TEST_CASE("mint and burn move supply with the balance") {
  auto t = make_world();
  auto before = t.w.classes.at("credits").total_supply;

  REQUIRE(tokens::mint(t.w, "credits", t.alice, 50).ok());
  CHECK(t.credits(t.alice) == 1050);
  CHECK(t.w.classes.at("credits").total_supply == before + 50);

  REQUIRE(tokens::burn(t.w, "credits", t.alice, 20).ok());
  CHECK(t.credits(t.alice) == 1030);
  CHECK(t.w.classes.at("credits").total_supply == before + 30);

  auto s = tokens::burn(t.w, "credits", t.alice, 1'000'000);
  REQUIRE_FALSE(s.ok());
  CHECK(s.error().code == Errc::Insufficient);
  CHECK(conserved(t.w));
}

TEST_CASE("mint rejects unknown classes and non-positive amounts") {
  auto t = make_world();
  CHECK_FALSE(tokens::mint(t.w, "no-such-class", t.alice, 1).ok());
  CHECK_FALSE(tokens::mint(t.w, "credits", t.alice, 0).ok());
  CHECK_FALSE(tokens::mint(t.w, "credits", t.alice, -5).ok());
}

TEST_CASE("transfer moves tokens and respects balances") {
  auto t = make_world();
  REQUIRE(tokens::transfer(t.w, t.alice, "credits", t.bob, 300).ok());
  CHECK(t.credits(t.alice) == 700);
  CHECK(t.credits(t.bob) == 1300);

  auto s = tokens::transfer(t.w, t.alice, "credits", t.bob, 10'000);
  REQUIRE_FALSE(s.ok());
  CHECK(s.error().code == Errc::Insufficient);
  CHECK(conserved(t.w));
}

TEST_CASE("soulbound classes refuse transfer but allow mint and burn") {
  auto t = make_world();
  auto s = tokens::transfer(t.w, t.alice, "reputation", t.bob, 1);
  REQUIRE_FALSE(s.ok());
  CHECK(s.error().code == Errc::NonTransferable);
  CHECK(tokens::mint(t.w, "reputation", t.bob, 5).ok());
  CHECK(tokens::burn(t.w, "reputation", t.bob, 5).ok());
}

TEST_CASE("conservation holds through a mixed op sequence") {
  auto t = make_world();
  for (int i = 0; i < 200; ++i) {
    auto k = CounterRng::draw(kSeed, 0, 1, static_cast<std::uint64_t>(i));
    Amount amt = static_cast<Amount>(CounterRng::bounded(k, 40)) + 1;
    switch (k % 4) {
      case 0: (void)tokens::mint(t.w, "credits", t.alice, amt); break;
      case 1: (void)tokens::burn(t.w, "credits", t.bob, amt); break;
      case 2: (void)tokens::transfer(t.w, t.alice, "credits", t.carol, amt); break;
      default: (void)tokens::transfer(t.w, t.carol, "credits", t.bob, amt); break;
    }
    REQUIRE(conserved(t.w));
  }
}

TEST_CASE("roles grant, widen by scope, and revoke") {
  auto t = make_world();
  add_org(t);
  CHECK_FALSE(tokens::has_role(t.w, t.alice, "reviewer"));

  REQUIRE(tokens::grant_role(t.w, t.alice, "reviewer", node_scope("design")).ok());
  CHECK(tokens::has_role(t.w, t.alice, "reviewer"));
  CHECK(tokens::has_role_at(t.w, t.alice, "reviewer", "design"));
  CHECK_FALSE(tokens::has_role_at(t.w, t.alice, "reviewer", "build"));
  CHECK_FALSE(tokens::has_role_global(t.w, t.alice, "reviewer"));

  // A global grant satisfies every node.
  REQUIRE(tokens::grant_role(t.w, t.bob, "reviewer", global_scope()).ok());
  CHECK(tokens::has_role_at(t.w, t.bob, "reviewer", "design"));
  CHECK(tokens::has_role_global(t.w, t.bob, "reviewer"));

  REQUIRE(tokens::revoke_role(t.w, t.alice, "reviewer", node_scope("design")).ok());
  CHECK_FALSE(tokens::has_role(t.w, t.alice, "reviewer"));
  CHECK_FALSE(tokens::revoke_role(t.w, t.alice, "reviewer", node_scope("design")).ok());
}

TEST_CASE("membership gates access while M1 is on") {
  auto t = make_world();
  auto outsider = t.add("outsider");
  CHECK_FALSE(tokens::check_access(t.w, outsider));
  CHECK(tokens::check_access(t.w, t.alice));

  REQUIRE(tokens::mint(t.w, "membership", outsider, 1).ok());
  CHECK(tokens::check_access(t.w, outsider));

  t.w.addresses.at(outsider).removed = true;
  CHECK_FALSE(tokens::check_access(t.w, outsider));

  t.w.mech[1] = false;  // membership switched off: the gate opens
  auto stranger = t.add("stranger");
  CHECK(tokens::check_access(t.w, stranger));
}
