#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <variant>

#include "commons/engine.hpp"
#include "commons/ledger.hpp"
#include "commons/support/codec.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace commons;
using namespace commons::testing;

namespace {

Digest32 digest_of(std::string_view s) { return crypto::sha256(Bytes(s.begin(), s.end())); }

AddressId addr(char fill) {
  AddressId a{};
  a.v.fill(static_cast<Byte>(fill));
  return a;
}

// One populated instance per command kind. Optionals and vectors are filled
// so the codec exercises both presence flags and length prefixes.
std::vector<Command> all_commands() {
  VoteScheme conviction{SchemeKind::Conviction, "credits", 0, 0.875, 0.5};
  RuleProgramDef prog{"rule-x",
                      {RuleClause{ClauseType::PerActorCap, 5, 1, "", "", 0, 0},
                       RuleClause{ClauseType::TimeWindow, 0, 0, "", "", 3, 9}}};

  std::vector<Command> out;
  out.push_back(TickAdvance{7});
  out.push_back(Mint{"credits", addr('a'), 25});
  out.push_back(Burn{"credits", addr('b'), 3});
  out.push_back(Transfer{"credits", addr('c'), 11});
  out.push_back(GrantRole{addr('d'), "monitor", "design"});
  out.push_back(RevokeRole{addr('d'), "monitor", ""});
  out.push_back(Deposit{"budget", 40});
  out.push_back(Withdraw{"budget", addr('e'), 6, std::string("approval-1")});
  out.push_back(Withdraw{"budget", addr('e'), 6, std::nullopt});
  out.push_back(UnguardedDraw{"budget", 9});
  out.push_back(CurveBuy{"curve-1", 30});
  out.push_back(CurveSell{"curve-1", 4});
  out.push_back(RequestAppropriation{"fair-draw", "budget", 5});
  out.push_back(DistributeRewards{"profit-share", 100});
  out.push_back(PostTender{"tn1", digest_of("package"), 5, std::string("builder"), 12, false});
  out.push_back(PostTender{"tn2", digest_of("pkg2"), 0, std::nullopt, 3, true});
  out.push_back(SubmitBid{"tn1", 42});
  out.push_back(CloseAuction{"tn1"});
  out.push_back(OpenMarket{"m1", "credits", digest_of("q"), {"yes", "no", "void"}, 50000,
                           std::string("profit")});
  out.push_back(Bet{"m1", "yes", 10});
  out.push_back(ResolveMarket{"m1", "no"});
  out.push_back(SettleMarket{"m1"});
  out.push_back(CreateProposal{"p1", SpendAction{"budget", addr('f'), 60}, "budget", conviction,
                               5, ThresholdKind::MinSupport, 0.25, 500, std::string("design"),
                               {addr('a'), addr('b')}});
  out.push_back(CreateProposal{"p2", UpdateRuleAction{prog}, "policy",
                               VoteScheme{SchemeKind::QuadraticLock, "credits", 2, 0.0, 1.0}, 3,
                               ThresholdKind::Majority, 0.0, 0, std::nullopt, {}});
  out.push_back(CreateProposal{"p3", GrantRoleAction{addr('g'), "foreman", "build"}, "work",
                               VoteScheme{}, 4, ThresholdKind::Majority, 0.0, 0, std::nullopt,
                               {}});
  out.push_back(CreateProposal{"p4", RevokeRoleAction{addr('g'), "foreman", ""}, "work",
                               VoteScheme{}, 4, ThresholdKind::Majority, 0.0, 0, std::nullopt,
                               {}});
  out.push_back(CreateProposal{"p5", NoopAction{}, "policy", VoteScheme{}, 4,
                               ThresholdKind::Majority, 0.0, 0, std::nullopt, {}});
  out.push_back(CastVote{"p1", false, 16});
  out.push_back(Unstake{"p1"});
  out.push_back(TallyProposal{"p1"});
  out.push_back(ExecuteProposal{"p1"});
  out.push_back(EscalateProposal{"p1", "deadlocked twice"});
  out.push_back(TcrApply{"vendors", "builder-c", 10});
  out.push_back(TcrChallenge{"vendors", "builder-c", 10});
  out.push_back(TcrVote{"vendors", "builder-c", false, 5});
  out.push_back(TcrResolve{"vendors", "builder-c"});
  out.push_back(Commit{"c1", digest_of("wp"), 9, std::string("fair-draw")});
  out.push_back(Commit{"c2", digest_of("wp2"), 9, std::nullopt});
  out.push_back(ReportComplete{"c1"});
  out.push_back(OpenReview{"r1",
                           {{addr('a'), digest_of("work-a")}, {addr('b'), digest_of("work-b")}},
                           {addr('c'), addr('d')},
                           "profit",
                           60});
  out.push_back(SubmitScore{"r1", addr('a'), 80});
  out.push_back(SettleReview{"r1"});
  out.push_back(PpcReport{2, {{addr('a'), 5, 5}, {addr('b'), 4, 2}}});
  out.push_back(RecordViolation{addr('b'), ViolationKind::MissedCommitment,
                                std::string("build")});
  out.push_back(ApplySanction{addr('b'), 1, std::nullopt});
  out.push_back(OpenDispute{"d1", addr('b'), digest_of("claim"), std::string("ipd"), true});
  out.push_back(StakeJuror{"d1", 5});
  out.push_back(VoteVerdict{"d1", false});
  out.push_back(ResolveDispute{"d1"});
  out.push_back(Delegate{"ipd", "design", "policy"});
  out.push_back(RevokeDelegation{"ipd", "design", "policy"});
  return out;
}

Bytes encode_one(const Command& cmd) {
  CanonicalWriter w;
  encode_command(w, cmd);
  return w.take();
}

}  // namespace

TEST_CASE("every command kind round-trips through the canonical codec") {
  std::set<std::string> seen_kinds;
  for (const Command& cmd : all_commands()) {
    const std::string kind{command_kind_name(cmd)};
    CAPTURE(kind);
    seen_kinds.insert(kind);

    Bytes raw = encode_one(cmd);
    CanonicalReader r(raw);
    Command back = decode_command(r);
    CHECK(r.exhausted());
    CHECK(back.index() == cmd.index());
    CHECK(command_kind_name(back) == kind);
    CHECK(encode_one(back) == raw);
  }
  // 44 distinct payload kinds in the variant; the sample list covers them all.
  CHECK(seen_kinds.size() == std::variant_size_v<Command>);
}

TEST_CASE("decoding truncated or trailing-garbage command bytes fails") {
  Bytes raw = encode_one(Commit{"c1", digest_of("wp"), 9, std::string("fair-draw")});
  for (std::size_t cut : {std::size_t{0}, raw.size() / 2, raw.size() - 1}) {
    Bytes head(raw.begin(), raw.begin() + static_cast<std::ptrdiff_t>(cut));
    CanonicalReader r(head);
    CHECK_THROWS_AS((void)decode_command(r), DecodeError);
  }
  Bytes padded = raw;
  padded.push_back(Byte{0x5a});
  CanonicalReader r(padded);
  (void)decode_command(r);
  CHECK_FALSE(r.exhausted());
}

TEST_CASE("signed events encode and decode bit-exactly") {
  TestWorld tw = make_world();
  Engine eng(tw.w);
  auto ev = eng.act(tw.ks, tw.alice, Transfer{"credits", tw.bob, 7});
  REQUIRE(ev.ok());

  Bytes raw = encode_event(ev.value());
  auto back = decode_event(raw);
  REQUIRE(back.ok());
  const SignedEvent& b = back.value();
  CHECK(b.seq == ev.value().seq);
  CHECK(b.author == ev.value().author);
  CHECK(b.tick == ev.value().tick);
  CHECK(b.sig == ev.value().sig);
  CHECK(encode_event(b) == raw);

  Bytes cut(raw.begin(), raw.end() - 1);
  CHECK_FALSE(decode_event(cut).ok());
}

TEST_CASE("event log saves and reloads bit-exactly") {
  TestWorld tw = make_world();
  Engine eng(tw.w);
  REQUIRE(eng.act(tw.ks, tw.admin, Mint{"credits", tw.alice, 5}).ok());
  REQUIRE(eng.act(tw.ks, tw.alice, Transfer{"credits", tw.bob, 2}).ok());
  REQUIRE(eng.act(tw.ks, tw.scheduler, TickAdvance{1}).ok());
  REQUIRE(eng.act(tw.ks, tw.bob, Deposit{"budget", 3}).ok());

  auto dir = std::filesystem::temp_directory_path() / "commons-ledger-test";
  std::filesystem::create_directories(dir);
  auto path = dir / "events.log";
  REQUIRE(eng.log().save(path).ok());

  auto loaded = EventLog::load(path);
  REQUIRE(loaded.ok());
  const EventLog& log = loaded.value();
  CHECK(log.genesis == eng.log().genesis);
  REQUIRE(log.events.size() == eng.log().events.size());
  for (std::size_t i = 0; i < log.events.size(); ++i)
    CHECK(encode_event(log.events[i]) == encode_event(eng.log().events[i]));

  auto path2 = dir / "events2.log";
  REQUIRE(log.save(path2).ok());
  std::ifstream a(path, std::ios::binary), b(path2, std::ios::binary);
  std::stringstream sa, sb;
  sa << a.rdbuf();
  sb << b.rdbuf();
  CHECK(sa.str() == sb.str());
  CHECK(sa.str().substr(0, 64) == to_hex(log.genesis));
}

TEST_CASE("loading a tampered log reports the line") {
  TestWorld tw = make_world();
  Engine eng(tw.w);
  REQUIRE(eng.act(tw.ks, tw.admin, Mint{"credits", tw.alice, 5}).ok());

  auto dir = std::filesystem::temp_directory_path() / "commons-ledger-test";
  std::filesystem::create_directories(dir);
  auto path = dir / "tampered.log";
  REQUIRE(eng.log().save(path).ok());

  std::ifstream in(path);
  std::string genesis_line, event_line;
  std::getline(in, genesis_line);
  std::getline(in, event_line);
  in.close();

  std::ofstream out(path, std::ios::trunc);
  out << genesis_line << "\n" << event_line.substr(0, event_line.size() - 2) << "zz\n";
  out.close();

  auto loaded = EventLog::load(path);
  REQUIRE_FALSE(loaded.ok());
  CHECK(loaded.error().detail.find("line 2") != std::string::npos);
}

TEST_CASE("signature preimage binds the genesis digest") {
  TestWorld tw = make_world();
  Engine eng(tw.w);

  Command cmd = Transfer{"credits", tw.bob, 1};
  Digest32 foreign = digest_of("some other world");
  REQUIRE(foreign != eng.genesis_digest());

  SignedEvent ev;
  ev.seq = eng.state().applied;
  ev.author = tw.alice;
  ev.tick = eng.state().tick;
  ev.payload = cmd;
  ev.sig = tw.ks.sign(tw.alice, event_preimage(foreign, ev.seq, ev.author, ev.tick, cmd));
  auto st = eng.submit(ev);
  REQUIRE_FALSE(st.ok());
  CHECK(st.error().code == Errc::BadSignature);

  ev.sig = tw.ks.sign(tw.alice, event_preimage(eng.genesis_digest(), ev.seq, ev.author,
                                               ev.tick, cmd));
  CHECK(eng.submit(ev).ok());
}

TEST_CASE("fold rejects out-of-order, wrong-tick, unknown-author, and tampered events") {
  TestWorld tw = make_world();
  Engine eng(tw.w);
  REQUIRE(eng.act(tw.ks, tw.admin, Mint{"credits", tw.alice, 5}).ok());
  const Digest32 before = state_hash(eng.state());

  auto signed_event = [&](Seq seq, Tick tick, const AddressId& author, const Keystore& ks) {
    SignedEvent ev;
    ev.seq = seq;
    ev.author = author;
    ev.tick = tick;
    ev.payload = Transfer{"credits", tw.bob, 1};
    ev.sig = ks.sign(author, event_preimage(eng.genesis_digest(), seq, author, tick, ev.payload));
    return ev;
  };

  SUBCASE("sequence gap") {
    auto st = eng.submit(signed_event(eng.state().applied + 1, eng.state().tick, tw.alice, tw.ks));
    REQUIRE_FALSE(st.ok());
    CHECK(st.error().code == Errc::OutOfOrder);
  }
  SUBCASE("stale tick") {
    auto st = eng.submit(signed_event(eng.state().applied, eng.state().tick + 1, tw.alice, tw.ks));
    REQUIRE_FALSE(st.ok());
    CHECK(st.error().code == Errc::BadTick);
  }
  SUBCASE("author not in the address book") {
    Keystore ghost_ks;
    AddressId ghost = ghost_ks.add_actor(777, "ghost");
    auto st = eng.submit(signed_event(eng.state().applied, eng.state().tick, ghost, ghost_ks));
    REQUIRE_FALSE(st.ok());
    CHECK(st.error().code == Errc::UnknownAuthor);
  }
  SUBCASE("payload tampered after signing") {
    SignedEvent ev = signed_event(eng.state().applied, eng.state().tick, tw.alice, tw.ks);
    ev.payload = Transfer{"credits", tw.bob, 2};
    auto st = eng.submit(ev);
    REQUIRE_FALSE(st.ok());
    CHECK(st.error().code == Errc::BadSignature);
  }
  CHECK(state_hash(eng.state()) == before);
  CHECK(eng.log().events.size() == 1);
}

TEST_CASE("replaying the log reproduces the live state hash") {
  TestWorld tw = make_world();
  Engine eng(tw.w);
  REQUIRE(eng.act(tw.ks, tw.admin, Mint{"credits", tw.alice, 50}).ok());
  REQUIRE(eng.act(tw.ks, tw.alice, Transfer{"credits", tw.carol, 12}).ok());
  REQUIRE(eng.act(tw.ks, tw.scheduler, TickAdvance{1}).ok());
  REQUIRE(eng.act(tw.ks, tw.carol, Deposit{"budget", 4}).ok());
  REQUIRE(eng.act(tw.ks, tw.scheduler, TickAdvance{2}).ok());

  auto replayed = replay(eng.log(), eng.genesis_state());
  REQUIRE(replayed.ok());
  CHECK(state_hash(replayed.value()) == state_hash(eng.state()));

  // Same events folded a second time from a fresh copy: still identical.
  auto again = replay(eng.log(), eng.genesis_state());
  REQUIRE(again.ok());
  CHECK(state_hash(again.value()) == state_hash(replayed.value()));

  SUBCASE("replay from a mismatching genesis state fails") {
    WorldState other = eng.genesis_state();
    other.tick = 5;
    auto r = replay(eng.log(), std::move(other));
    REQUIRE_FALSE(r.ok());
  }
  SUBCASE("a corrupted middle event halts replay with its position") {
    EventLog bad = eng.log();
    bad.events[2].payload = Transfer{"credits", tw.bob, 999};
    auto r = replay(bad, eng.genesis_state());
    REQUIRE_FALSE(r.ok());
    CHECK(r.error().detail.find("event 2") != std::string::npos);
  }
}
