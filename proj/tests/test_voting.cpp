#include <cmath>

#include "commons/engine.hpp"
#include "commons/support/rng.hpp"
#include "commons/tokens.hpp"
#include "commons/voting.hpp"
#include "commons/world.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace commons;
using namespace commons::testing;

namespace {

CreateProposal plain_proposal(const ProposalId& id, Tick window = 3) {
  CreateProposal p;
  p.id = id;
  p.action = NoopAction{};
  p.decision_kind = "policy";
  p.scheme = VoteScheme{SchemeKind::TokenWeighted, "credits", 0, 0.0, 1.0};
  p.window_len = window;
  return p;
}

void step(TestWorld& t) {
  REQUIRE(apply_command(t.w, t.scheduler, TickAdvance{t.w.tick + 1}).ok());
}

}  // namespace

TEST_CASE("quadratic weight scales as the square root") {
  for (int i = 0; i < 200; ++i) {
    auto k1 = CounterRng::draw(kSeed + 4, 0, 1, static_cast<std::uint64_t>(i));
    auto k2 = CounterRng::draw(kSeed + 4, 0, 2, static_cast<std::uint64_t>(i));
    Amount tokens = static_cast<Amount>(CounterRng::bounded(k1, 10'000)) + 1;
    Amount n = static_cast<Amount>(CounterRng::bounded(k2, 30)) + 1;
    double lhs = voting::quadratic_weight(n * n * tokens);
    double rhs = static_cast<double>(n) * voting::quadratic_weight(tokens);
    CHECK(std::abs(lhs - rhs) <= 1e-9 * std::max(1.0, rhs));
  }
}

TEST_CASE("conviction iteration matches the geometric closed form") {
  for (int i = 0; i < 100; ++i) {
    auto k1 = CounterRng::draw(kSeed + 5, 0, 1, static_cast<std::uint64_t>(i));
    auto k2 = CounterRng::draw(kSeed + 5, 0, 2, static_cast<std::uint64_t>(i));
    auto k3 = CounterRng::draw(kSeed + 5, 0, 3, static_cast<std::uint64_t>(i));
    double alpha = static_cast<double>(CounterRng::bounded(k1, 999)) / 1000.0;
    Amount stake = static_cast<Amount>(CounterRng::bounded(k2, 500)) + 1;
    Tick ticks = CounterRng::bounded(k3, 200) + 1;

    double c = 0.0;
    for (Tick s = 0; s < ticks; ++s) c = voting::conviction_step(alpha, c, stake);
    double want = conviction_closed_form(alpha, stake, ticks);
    CHECK(std::abs(c - want) <= 1e-9 * std::max(1.0, std::abs(want)));
  }
  CHECK(voting::conviction_threshold(0.9, 0.5, 60) == doctest::Approx(300.0));
}

TEST_CASE("create_proposal validates its inputs") {
  auto t = make_world();
  CHECK(voting::create_proposal(t.w, t.alice, plain_proposal("")).error().code ==
        Errc::InvalidPayload);
  CHECK(voting::create_proposal(t.w, t.alice, plain_proposal("p", 0)).error().code ==
        Errc::InvalidPayload);

  auto bad_class = plain_proposal("p");
  bad_class.scheme.voting_class = "doubloons";
  CHECK(voting::create_proposal(t.w, t.alice, bad_class).error().code == Errc::UnknownClass);

  auto bad_scope = plain_proposal("p");
  bad_scope.scope = "atlantis";
  CHECK(voting::create_proposal(t.w, t.alice, bad_scope).error().code == Errc::UnknownNode);

  auto bad_pool = plain_proposal("p");
  bad_pool.action = SpendAction{"missing", t.bob, 5};
  CHECK(voting::create_proposal(t.w, t.alice, bad_pool).error().code == Errc::UnknownPool);

  auto conviction = plain_proposal("p");
  conviction.scheme = VoteScheme{SchemeKind::Conviction, "credits", 0, 1.0, 0.5};
  CHECK(voting::create_proposal(t.w, t.alice, conviction).error().code == Errc::InvalidPayload);
  conviction.scheme.alpha = 0.9;
  conviction.scheme.beta = 0.0;
  CHECK(voting::create_proposal(t.w, t.alice, conviction).error().code == Errc::InvalidPayload);
  conviction.scheme.beta = 0.5;
  // Noop carries no request size: conviction needs an explicit threshold.
  CHECK(voting::create_proposal(t.w, t.alice, conviction).error().code == Errc::InvalidPayload);
  conviction.action = SpendAction{"budget", t.bob, 60};
  REQUIRE(voting::create_proposal(t.w, t.alice, conviction).ok());
  CHECK(t.w.proposals.at("p").threshold_amount == 60);

  CHECK(voting::create_proposal(t.w, t.alice, plain_proposal("p")).error().code ==
        Errc::DuplicateId);
}

TEST_CASE("token-weighted proposals tally by majority after the window") {
  auto t = make_world();
  REQUIRE(voting::create_proposal(t.w, t.admin, plain_proposal("p", 3)).ok());

  CHECK(voting::cast_vote(t.w, t.scheduler, "p", true, 5).error().code == Errc::MachineVoter);
  CHECK(voting::cast_vote(t.w, t.alice, "p", true, 0).error().code == Errc::ZeroSpend);
  REQUIRE(voting::cast_vote(t.w, t.alice, "p", true, 30).ok());
  CHECK(voting::cast_vote(t.w, t.alice, "p", false, 5).error().code == Errc::DoubleVote);
  REQUIRE(voting::cast_vote(t.w, t.bob, "p", false, 20).ok());
  CHECK(t.credits(t.alice) == 970);  // staked into the proposal escrow

  CHECK(voting::tally(t.w, t.admin, "p").error().code == Errc::NotYetDeadline);
  t.w.tick = 3;
  CHECK(voting::tally(t.w, t.admin, "p").error().code == Errc::NotYetDeadline);
  t.w.tick = 4;
  CHECK(voting::cast_vote(t.w, t.carol, "p", true, 5).error().code == Errc::OutsideWindow);

  auto out = voting::tally(t.w, t.admin, "p");
  REQUIRE(out.ok());
  CHECK(out.value().decided);
  CHECK(out.value().passed);
  CHECK(out.value().yes == doctest::Approx(30.0));
  CHECK(out.value().no == doctest::Approx(20.0));
  // Plain ballots unlock at the tally.
  CHECK(t.credits(t.alice) == 1000);
  CHECK(t.credits(t.bob) == 1000);
  CHECK(t.w.proposals.at("p").status == ProposalStatus::Passed);
  CHECK(voting::tally(t.w, t.admin, "p").error().code == Errc::AlreadyClosed);
  CHECK(voting::cast_vote(t.w, t.carol, "p", true, 5).error().code == Errc::AlreadyClosed);
}

TEST_CASE("min-support thresholds require the floor even when yes leads") {
  auto t = make_world();
  auto cmd = plain_proposal("p", 2);
  cmd.threshold_kind = ThresholdKind::MinSupport;
  cmd.min_support = 50.0;
  REQUIRE(voting::create_proposal(t.w, t.admin, cmd).ok());
  REQUIRE(voting::cast_vote(t.w, t.alice, "p", true, 40).ok());
  t.w.tick = 3;
  auto out = voting::tally(t.w, t.admin, "p");
  REQUIRE(out.ok());
  CHECK_FALSE(out.value().passed);
  CHECK(t.w.proposals.at("p").status == ProposalStatus::Rejected);
  CHECK(t.w.proposals.at("p").failed_tallies == 1);
}

TEST_CASE("passed spend proposals execute once") {
  auto t = make_world();
  auto cmd = plain_proposal("p", 1);
  cmd.action = SpendAction{"budget", t.carol, 60};
  REQUIRE(voting::create_proposal(t.w, t.admin, cmd).ok());
  CHECK(voting::execute(t.w, "p").error().code == Errc::NotPassed);
  REQUIRE(voting::cast_vote(t.w, t.alice, "p", true, 10).ok());
  t.w.tick = 2;
  REQUIRE(voting::tally(t.w, t.admin, "p").ok());

  REQUIRE(voting::execute(t.w, "p").ok());
  CHECK(t.credits(t.carol) == 1060);
  CHECK(t.credits(t.pool("budget").escrow) == 940);
  CHECK(voting::execute(t.w, "p").error().code == Errc::AlreadyExecuted);
  CHECK(conserved(t.w));
}

TEST_CASE("quadratic locks weigh sqrt and outlive the tally") {
  auto t = make_world();
  auto cmd = plain_proposal("p", 2);
  cmd.scheme = VoteScheme{SchemeKind::QuadraticLock, "credits", 4, 0.0, 1.0};
  REQUIRE(voting::create_proposal(t.w, t.admin, cmd).ok());

  REQUIRE(voting::cast_vote(t.w, t.alice, "p", true, 16).ok());  // weight 4
  REQUIRE(voting::cast_vote(t.w, t.bob, "p", false, 9).ok());    // weight 3
  CHECK(voting::unstake(t.w, t.alice, "p").error().code == Errc::OutsideWindow);

  t.w.tick = 3;
  auto out = voting::tally(t.w, t.admin, "p");
  REQUIRE(out.ok());
  CHECK(out.value().yes == doctest::Approx(4.0));
  CHECK(out.value().no == doctest::Approx(3.0));
  CHECK(out.value().passed);

  // Still locked: window end (2) + lock (4) = unlock at tick 6.
  CHECK(t.credits(t.alice) == 984);
  CHECK(voting::unstake(t.w, t.alice, "p").error().code == Errc::OutsideWindow);
  t.w.tick = 6;
  REQUIRE(voting::unstake(t.w, t.alice, "p").ok());
  CHECK(t.credits(t.alice) == 1000);
  CHECK(voting::unstake(t.w, t.alice, "p").error().code == Errc::Insufficient);
  REQUIRE(voting::unstake(t.w, t.bob, "p").ok());
  CHECK(voting::unstake(t.w, t.carol, "p").error().code == Errc::Insufficient);
  CHECK(conserved(t.w));
}

TEST_CASE("conviction accumulates per tick and passes at the bar") {
  auto t = make_world();
  CreateProposal cmd;
  cmd.id = "p";
  cmd.action = SpendAction{"budget", t.carol, 60};
  cmd.decision_kind = "budget";
  cmd.scheme = VoteScheme{SchemeKind::Conviction, "credits", 0, 0.9, 0.5};
  cmd.window_len = 0;  // conviction runs until it passes
  REQUIRE(apply_command(t.w, t.admin, cmd).ok());

  CHECK(apply_command(t.w, t.alice, CastVote{"p", false, 10}).error().code ==
        Errc::InvalidPayload);
  REQUIRE(apply_command(t.w, t.alice, CastVote{"p", true, 40}).ok());

  const Proposal& p = t.w.proposals.at("p");
  double bar = voting::conviction_threshold(0.9, 0.5, 60);  // 300
  for (Tick i = 1; i <= 13; ++i) {
    step(t);
    CHECK(p.conviction ==
          doctest::Approx(conviction_closed_form(0.9, 40, i)).epsilon(1e-12));
    CHECK(p.conviction < bar);
  }
  // Tallying early is an accepted event that leaves the proposal open.
  auto early = voting::tally(t.w, t.admin, "p");
  REQUIRE(early.ok());
  CHECK_FALSE(early.value().decided);
  CHECK(p.failed_tallies == 1);
  CHECK(p.status == ProposalStatus::Open);

  step(t);  // tick 14: 40 * (1 - 0.9^14) / 0.1 = 308.9...
  CHECK(p.conviction > bar);
  auto out = voting::tally(t.w, t.admin, "p");
  REQUIRE(out.ok());
  CHECK(out.value().decided);
  CHECK(out.value().passed);
  CHECK(t.credits(t.alice) == 1000);  // stake refunded on pass
  REQUIRE(voting::execute(t.w, "p").ok());
  CHECK(t.credits(t.carol) == 1060);
  CHECK(conserved(t.w));
}

TEST_CASE("conviction stakes can be withdrawn while open, stalling growth") {
  auto t = make_world();
  CreateProposal cmd;
  cmd.id = "p";
  cmd.action = SpendAction{"budget", t.carol, 60};
  cmd.decision_kind = "budget";
  cmd.scheme = VoteScheme{SchemeKind::Conviction, "credits", 0, 0.5, 1.0};
  REQUIRE(apply_command(t.w, t.admin, cmd).ok());
  REQUIRE(apply_command(t.w, t.alice, CastVote{"p", true, 20}).ok());
  step(t);
  step(t);
  CHECK(t.w.proposals.at("p").conviction == doctest::Approx(30.0));  // 20 + 0.5*20

  REQUIRE(voting::unstake(t.w, t.alice, "p").ok());
  CHECK(t.credits(t.alice) == 1000);
  CHECK(voting::unstake(t.w, t.alice, "p").error().code == Errc::Insufficient);
  step(t);
  CHECK(t.w.proposals.at("p").conviction == doctest::Approx(15.0));  // decays, no stake
}

TEST_CASE("deadlocked scoped proposals escalate to the mandated ancestor") {
  auto t = make_world();
  add_org(t);
  CreateProposal cmd;
  cmd.id = "p";
  cmd.action = NoopAction{};
  cmd.decision_kind = "policy";
  cmd.scheme = VoteScheme{SchemeKind::Conviction, "credits", 0, 0.5, 1.0};
  cmd.threshold_amount = 1000;
  cmd.scope = "design";
  REQUIRE(voting::create_proposal(t.w, t.alice, cmd).ok());
  REQUIRE(voting::cast_vote(t.w, t.alice, "p", true, 5).ok());

  CHECK(voting::escalate(t.w, t.alice, "p").error().code == Errc::NotYetDeadline);
  REQUIRE(voting::tally(t.w, t.alice, "p").ok());
  REQUIRE(voting::tally(t.w, t.alice, "p").ok());
  CHECK(t.w.proposals.at("p").failed_tallies == 2);

  REQUIRE(voting::escalate(t.w, t.alice, "p").ok());
  const Proposal& p = t.w.proposals.at("p");
  CHECK(p.scope == NodeId("ipd"));
  CHECK(p.failed_tallies == 0);
  CHECK(p.conviction == 0.0);
  CHECK(p.escalations == 1);
  CHECK(t.credits(t.alice) == 1000);  // stake came home for the retry

  // Already at the root: a second deadlock has nowhere to go.
  REQUIRE(voting::tally(t.w, t.alice, "p").ok());
  REQUIRE(voting::tally(t.w, t.alice, "p").ok());
  CHECK(voting::escalate(t.w, t.alice, "p").error().code == Errc::AtRoot);

  SUBCASE("unscoped proposals cannot escalate at all") {
    auto flat = plain_proposal("q", 1);
    REQUIRE(voting::create_proposal(t.w, t.alice, flat).ok());
    t.w.proposals.at("q").failed_tallies = 2;
    CHECK(voting::escalate(t.w, t.alice, "q").error().code == Errc::AtRoot);
  }
}

TEST_CASE("tcr entries admit quietly after an unchallenged window") {
  auto t = make_world();
  Registry r;
  r.id = "vendors";
  r.stake_class = "credits";
  r.min_stake = 10;
  r.apply_window = 5;
  r.vote_window = 3;
  r.escrow = ensure_escrow(t.w, "registry", "vendors");
  t.w.registries.emplace("vendors", r);

  CHECK(voting::tcr_apply(t.w, t.alice, "missing", "x", 10).error().code ==
        Errc::UnknownRegistry);
  CHECK(voting::tcr_apply(t.w, t.alice, "vendors", "", 10).error().code == Errc::InvalidPayload);
  CHECK(voting::tcr_apply(t.w, t.alice, "vendors", "x", 9).error().code ==
        Errc::InsufficientStake);
  REQUIRE(voting::tcr_apply(t.w, t.alice, "vendors", "x", 10).ok());
  CHECK(t.credits(t.alice) == 990);
  CHECK(voting::tcr_apply(t.w, t.bob, "vendors", "x", 10).error().code == Errc::DuplicateEntry);
  CHECK_FALSE(voting::tcr_listed(t.w, "vendors", "x"));

  CHECK(voting::tcr_resolve(t.w, "vendors", "x").error().code == Errc::NotYetDeadline);
  t.w.tick = 5;
  auto out = voting::tcr_resolve(t.w, "vendors", "x");
  REQUIRE(out.ok());
  CHECK(out.value().status == EntryStatus::Admitted);
  CHECK_FALSE(out.value().challenged);
  CHECK(t.credits(t.alice) == 1000);
  CHECK(voting::tcr_listed(t.w, "vendors", "x"));
  CHECK(voting::tcr_challenge(t.w, t.bob, "vendors", "x", 10).error().code ==
        Errc::AlreadyClosed);
  CHECK(voting::tcr_resolve(t.w, "vendors", "x").error().code == Errc::AlreadyClosed);
  CHECK(conserved(t.w));
}

TEST_CASE("challenged tcr entries go to a stake-weighted ballot") {
  auto t = make_world();
  Registry r;
  r.id = "vendors";
  r.stake_class = "credits";
  r.min_stake = 10;
  r.apply_window = 5;
  r.vote_window = 3;
  r.escrow = ensure_escrow(t.w, "registry", "vendors");
  t.w.registries.emplace("vendors", r);

  REQUIRE(voting::tcr_apply(t.w, t.alice, "vendors", "x", 10).ok());
  CHECK(voting::tcr_challenge(t.w, t.alice, "vendors", "x", 10).error().code ==
        Errc::Unauthorized);
  CHECK(voting::tcr_challenge(t.w, t.bob, "vendors", "x", 11).error().code ==
        Errc::InsufficientStake);
  t.w.tick = 1;
  REQUIRE(voting::tcr_challenge(t.w, t.bob, "vendors", "x", 10).ok());
  CHECK(voting::tcr_challenge(t.w, t.carol, "vendors", "x", 10).error().code ==
        Errc::AlreadyClosed);

  CHECK(voting::tcr_vote(t.w, t.scheduler, "vendors", "x", true, 5).error().code ==
        Errc::MachineVoter);
  CHECK(voting::tcr_vote(t.w, t.carol, "vendors", "x", true, 0).error().code == Errc::ZeroSpend);
  REQUIRE(voting::tcr_vote(t.w, t.carol, "vendors", "x", true, 9).ok());
  CHECK(voting::tcr_vote(t.w, t.carol, "vendors", "x", true, 1).error().code ==
        Errc::DoubleVote);
  t.w.tick = 2;
  REQUIRE(voting::tcr_vote(t.w, t.admin, "vendors", "x", false, 6).ok());

  CHECK(voting::tcr_resolve(t.w, "vendors", "x").error().code == Errc::NotYetDeadline);
  t.w.tick = 4;
  CHECK(voting::tcr_vote(t.w, t.monitor, "vendors", "x", false, 1).error().code ==
        Errc::OutsideWindow);

  auto out = voting::tcr_resolve(t.w, "vendors", "x");
  REQUIRE(out.ok());
  CHECK(out.value().status == EntryStatus::Admitted);  // keep 9 >= drop 6
  CHECK(out.value().challenged);
  CHECK(voting::tcr_listed(t.w, "vendors", "x"));

  // Voters made whole; bob's forfeit splits 10 over {alice 10, carol 9}.
  CHECK(t.credits(t.admin) == 1000);
  CHECK(t.credits(t.alice) == 1005);
  CHECK(t.credits(t.carol) == 1005);
  CHECK(t.credits(t.bob) == 990);
  CHECK(t.credits(t.w.registries.at("vendors").escrow) == 0);
  CHECK(conserved(t.w));

  // A rejected item may reapply.
  SUBCASE("losing the ballot rejects the entry and frees the name") {
    REQUIRE(voting::tcr_apply(t.w, t.carol, "vendors", "y", 10).ok());
    t.w.tick = 5;
    REQUIRE(voting::tcr_challenge(t.w, t.admin, "vendors", "y", 10).ok());
    REQUIRE(voting::tcr_vote(t.w, t.alice, "vendors", "y", false, 8).ok());
    t.w.tick = 8;
    auto dropped = voting::tcr_resolve(t.w, "vendors", "y");
    REQUIRE(dropped.ok());
    CHECK(dropped.value().status == EntryStatus::Rejected);
    CHECK_FALSE(voting::tcr_listed(t.w, "vendors", "y"));
    REQUIRE(voting::tcr_apply(t.w, t.carol, "vendors", "y", 10).ok());
    CHECK(conserved(t.w));
  }
}

TEST_CASE("tcr ballot ties keep the applicant") {
  auto t = make_world();
  Registry r;
  r.id = "vendors";
  r.stake_class = "credits";
  r.min_stake = 5;
  r.apply_window = 2;
  r.vote_window = 2;
  r.escrow = ensure_escrow(t.w, "registry", "vendors");
  t.w.registries.emplace("vendors", r);

  REQUIRE(voting::tcr_apply(t.w, t.alice, "vendors", "x", 5).ok());
  REQUIRE(voting::tcr_challenge(t.w, t.bob, "vendors", "x", 5).ok());
  REQUIRE(voting::tcr_vote(t.w, t.carol, "vendors", "x", true, 7).ok());
  REQUIRE(voting::tcr_vote(t.w, t.admin, "vendors", "x", false, 7).ok());
  t.w.tick = 2;
  auto out = voting::tcr_resolve(t.w, "vendors", "x");
  REQUIRE(out.ok());
  CHECK(out.value().status == EntryStatus::Admitted);
  CHECK(conserved(t.w));
}
