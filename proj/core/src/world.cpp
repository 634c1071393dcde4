#include "commons/world.hpp"

#include <charconv>

#include "commons/support/crypto.hpp"

namespace commons {

int parse_mechanism(std::string_view tag) {
  if (tag.size() < 2 || (tag[0] != 'M' && tag[0] != 'm')) return 0;
  int m = 0;
  auto [p, ec] = std::from_chars(tag.data() + 1, tag.data() + tag.size(), m);
  if (ec != std::errc{} || p != tag.data() + tag.size()) return 0;
  return (m >= 1 && m <= kMechanismCount) ? m : 0;
}

std::string mechanism_tag(int m) { return "M" + std::to_string(m); }

AddressId derive_escrow(std::string_view tag, std::string_view id) {
  std::string preimage = "escrow:";
  preimage.append(tag);
  preimage.push_back(':');
  preimage.append(id);
  return crypto::sha256(preimage);
}

AddressId ensure_escrow(WorldState& w, std::string_view tag, std::string_view id) {
  AddressId addr = derive_escrow(tag, id);
  if (!w.addresses.count(addr)) {
    AddressRecord rec;
    rec.kind = ActorKind::Machine;
    rec.name = "escrow:" + std::string(tag) + ":" + std::string(id);
    w.addresses.emplace(addr, std::move(rec));
  }
  return addr;
}

namespace {

// Paired encoders/decoders for every state struct. Maps and sets iterate in
// key order, so one state has exactly one encoding.

void put_opt_str(CanonicalWriter& w, const std::optional<std::string>& v) {
  w.boolean(v.has_value());
  if (v) w.str(*v);
}
std::optional<std::string> get_opt_str(CanonicalReader& r) {
  if (!r.boolean()) return std::nullopt;
  return r.str();
}

template <typename F>
void put_seq(CanonicalWriter& w, std::size_t n, F&& item) {
  w.u32(static_cast<std::uint32_t>(n));
  for (std::size_t i = 0; i < n; ++i) item(i);
}

void put_address_record(CanonicalWriter& w, const AddressRecord& a) {
  w.u8(static_cast<std::uint8_t>(a.kind));
  w.str(a.name);
  w.boolean(a.pubkey.has_value());
  if (a.pubkey) w.raw(a.pubkey->data(), a.pubkey->size());
  w.boolean(a.removed);
}
AddressRecord get_address_record(CanonicalReader& r) {
  AddressRecord a;
  a.kind = static_cast<ActorKind>(r.u8());
  a.name = r.str();
  if (r.boolean()) {
    crypto::PublicKey pk;
    r.raw(pk.data(), pk.size());
    a.pubkey = pk;
  }
  a.removed = r.boolean();
  return a;
}

void put_balances(CanonicalWriter& w, const std::map<AddressId, Amount>& m) {
  put_seq(w, m.size(), [&, it = m.begin()](std::size_t) mutable {
    w.digest(it->first);
    w.i64(it->second);
    ++it;
  });
}
std::map<AddressId, Amount> get_balances(CanonicalReader& r) {
  std::map<AddressId, Amount> m;
  auto n = r.u32();
  for (std::uint32_t i = 0; i < n; ++i) {
    auto k = r.digest();
    m[k] = r.i64();
  }
  return m;
}

void put_token_class(CanonicalWriter& w, const TokenClass& c) {
  w.str(c.id);
  w.str(c.display);
  w.boolean(c.transferable);
  w.i64(c.total_supply);
  put_balances(w, c.balances);
}
TokenClass get_token_class(CanonicalReader& r) {
  TokenClass c;
  c.id = r.str();
  c.display = r.str();
  c.transferable = r.boolean();
  c.total_supply = r.i64();
  c.balances = get_balances(r);
  return c;
}

void put_pool(CanonicalWriter& w, const Pool& p) {
  w.str(p.id);
  w.str(p.currency);
  w.digest(p.escrow);
}
Pool get_pool(CanonicalReader& r) {
  Pool p;
  p.id = r.str();
  p.currency = r.str();
  p.escrow = r.digest();
  return p;
}

void put_curve(CanonicalWriter& w, const BondingCurve& c) {
  w.str(c.id);
  w.str(c.token);
  w.str(c.currency);
  w.i64(c.p0_num);
  w.i64(c.p0_den);
  w.i64(c.k_num);
  w.i64(c.k_den);
  w.i64(c.tribute_in);
  w.i64(c.tribute_out);
  w.str(c.tribute_pool);
  w.digest(c.escrow);
  w.i64(c.supply);
  w.i64(c.reserve);
}
BondingCurve get_curve(CanonicalReader& r) {
  BondingCurve c;
  c.id = r.str();
  c.token = r.str();
  c.currency = r.str();
  c.p0_num = r.i64();
  c.p0_den = r.i64();
  c.k_num = r.i64();
  c.k_den = r.i64();
  c.tribute_in = r.i64();
  c.tribute_out = r.i64();
  c.tribute_pool = r.str();
  c.escrow = r.digest();
  c.supply = r.i64();
  c.reserve = r.i64();
  return c;
}

void put_rule(CanonicalWriter& w, const RuleProgramDef& p) {
  w.str(p.id);
  put_seq(w, p.clauses.size(), [&](std::size_t i) {
    const auto& c = p.clauses[i];
    w.u8(static_cast<std::uint8_t>(c.type));
    w.i64(c.amount);
    w.u64(c.period);
    w.str(c.role);
    w.str(c.token_class);
    w.u64(c.from);
    w.u64(c.to);
  });
}
RuleProgramDef get_rule(CanonicalReader& r) {
  RuleProgramDef p;
  p.id = r.str();
  auto n = r.u32();
  p.clauses.resize(n);
  for (auto& c : p.clauses) {
    c.type = static_cast<ClauseType>(r.u8());
    c.amount = r.i64();
    c.period = r.u64();
    c.role = r.str();
    c.token_class = r.str();
    c.from = r.u64();
    c.to = r.u64();
  }
  return p;
}

void put_approval(CanonicalWriter& w, const Approval& a) {
  w.str(a.id);
  w.digest(a.actor);
  w.str(a.pool);
  w.i64(a.amount);
  w.u64(a.issued_at);
  w.boolean(a.consumed);
}
Approval get_approval(CanonicalReader& r) {
  Approval a;
  a.id = r.str();
  a.actor = r.digest();
  a.pool = r.str();
  a.amount = r.i64();
  a.issued_at = r.u64();
  a.consumed = r.boolean();
  return a;
}

void put_tender(CanonicalWriter& w, const Tender& t) {
  w.str(t.id);
  w.digest(t.poster);
  w.digest(t.package);
  w.i64(t.min_reputation);
  put_opt_str(w, t.required_role);
  w.u64(t.deadline);
  w.boolean(t.cancel_on_no_bids);
  w.u64(t.posted_at);
  w.u8(static_cast<std::uint8_t>(t.status));
  put_seq(w, t.bids.size(), [&](std::size_t i) {
    w.digest(t.bids[i].bidder);
    w.i64(t.bids[i].price);
    w.u64(t.bids[i].seq);
  });
  w.boolean(t.winner.has_value());
  if (t.winner) w.digest(*t.winner);
  w.i64(t.award_price);
}
Tender get_tender(CanonicalReader& r) {
  Tender t;
  t.id = r.str();
  t.poster = r.digest();
  t.package = r.digest();
  t.min_reputation = r.i64();
  t.required_role = get_opt_str(r);
  t.deadline = r.u64();
  t.cancel_on_no_bids = r.boolean();
  t.posted_at = r.u64();
  t.status = static_cast<TenderStatus>(r.u8());
  auto n = r.u32();
  t.bids.resize(n);
  for (auto& b : t.bids) {
    b.bidder = r.digest();
    b.price = r.i64();
    b.seq = r.u64();
  }
  if (r.boolean()) t.winner = r.digest();
  t.award_price = r.i64();
  return t;
}

void put_market(CanonicalWriter& w, const PredictionMarket& m) {
  w.str(m.id);
  w.digest(m.oracle);
  w.digest(m.question);
  put_seq(w, m.outcomes.size(), [&](std::size_t i) { w.str(m.outcomes[i]); });
  w.str(m.currency);
  w.i64(m.fee_ppm);
  put_opt_str(w, m.fee_pool);
  w.digest(m.escrow);
  w.u8(static_cast<std::uint8_t>(m.status));
  put_seq(w, m.stakes.size(), [&, it = m.stakes.begin()](std::size_t) mutable {
    w.str(it->first);
    put_balances(w, it->second);
    ++it;
  });
  w.str(m.resolved_outcome);
}
PredictionMarket get_market(CanonicalReader& r) {
  PredictionMarket m;
  m.id = r.str();
  m.oracle = r.digest();
  m.question = r.digest();
  auto n = r.u32();
  m.outcomes.resize(n);
  for (auto& o : m.outcomes) o = r.str();
  m.currency = r.str();
  m.fee_ppm = r.i64();
  m.fee_pool = get_opt_str(r);
  m.escrow = r.digest();
  m.status = static_cast<MarketStatus>(r.u8());
  auto ns = r.u32();
  for (std::uint32_t i = 0; i < ns; ++i) {
    auto k = r.str();
    m.stakes[k] = get_balances(r);
  }
  m.resolved_outcome = r.str();
  return m;
}

void put_proposal(CanonicalWriter& w, const Proposal& p) {
  w.str(p.id);
  w.digest(p.proposer);
  encode_action(w, p.action);
  w.str(p.decision_kind);
  w.u8(static_cast<std::uint8_t>(p.scheme.kind));
  w.str(p.scheme.voting_class);
  w.u64(p.scheme.lock_duration);
  w.f64(p.scheme.alpha);
  w.f64(p.scheme.beta);
  w.u64(p.opened_at);
  w.u64(p.window_len);
  w.u8(static_cast<std::uint8_t>(p.threshold_kind));
  w.f64(p.min_support);
  w.i64(p.threshold_amount);
  put_opt_str(w, p.scope);
  w.digest(p.escrow);
  w.u8(static_cast<std::uint8_t>(p.status));
  put_seq(w, p.ballots.size(), [&, it = p.ballots.begin()](std::size_t) mutable {
    w.digest(it->first);
    w.boolean(it->second.support);
    w.i64(it->second.tokens);
    w.f64(it->second.weight);
    w.u64(it->second.cast_at);
    ++it;
  });
  put_balances(w, p.conviction_stakes);
  w.f64(p.conviction);
  w.u32(p.failed_tallies);
  w.u32(p.escalations);
}
Proposal get_proposal(CanonicalReader& r) {
  Proposal p;
  p.id = r.str();
  p.proposer = r.digest();
  p.action = decode_action(r);
  p.decision_kind = r.str();
  p.scheme.kind = static_cast<SchemeKind>(r.u8());
  p.scheme.voting_class = r.str();
  p.scheme.lock_duration = r.u64();
  p.scheme.alpha = r.f64();
  p.scheme.beta = r.f64();
  p.opened_at = r.u64();
  p.window_len = r.u64();
  p.threshold_kind = static_cast<ThresholdKind>(r.u8());
  p.min_support = r.f64();
  p.threshold_amount = r.i64();
  p.scope = get_opt_str(r);
  p.escrow = r.digest();
  p.status = static_cast<ProposalStatus>(r.u8());
  auto n = r.u32();
  for (std::uint32_t i = 0; i < n; ++i) {
    auto k = r.digest();
    BallotRecord b;
    b.support = r.boolean();
    b.tokens = r.i64();
    b.weight = r.f64();
    b.cast_at = r.u64();
    p.ballots.emplace(k, b);
  }
  p.conviction_stakes = get_balances(r);
  p.conviction = r.f64();
  p.failed_tallies = r.u32();
  p.escalations = r.u32();
  return p;
}

void put_registry(CanonicalWriter& w, const Registry& g) {
  w.str(g.id);
  w.str(g.stake_class);
  w.i64(g.min_stake);
  w.u64(g.apply_window);
  w.u64(g.vote_window);
  w.digest(g.escrow);
  put_seq(w, g.entries.size(), [&, it = g.entries.begin()](std::size_t) mutable {
    const auto& e = it->second;
    w.str(it->first);
    w.digest(e.applicant);
    w.i64(e.stake);
    w.u64(e.applied_at);
    w.u8(static_cast<std::uint8_t>(e.status));
    w.boolean(e.challenger.has_value());
    if (e.challenger) w.digest(*e.challenger);
    w.i64(e.challenge_stake);
    w.u64(e.challenged_at);
    put_seq(w, e.votes.size(), [&, vt = e.votes.begin()](std::size_t) mutable {
      w.digest(vt->first);
      w.boolean(vt->second.first);
      w.i64(vt->second.second);
      ++vt;
    });
    ++it;
  });
}
Registry get_registry(CanonicalReader& r) {
  Registry g;
  g.id = r.str();
  g.stake_class = r.str();
  g.min_stake = r.i64();
  g.apply_window = r.u64();
  g.vote_window = r.u64();
  g.escrow = r.digest();
  auto n = r.u32();
  for (std::uint32_t i = 0; i < n; ++i) {
    auto key = r.str();
    RegistryEntry e;
    e.item = key;
    e.applicant = r.digest();
    e.stake = r.i64();
    e.applied_at = r.u64();
    e.status = static_cast<EntryStatus>(r.u8());
    if (r.boolean()) e.challenger = r.digest();
    e.challenge_stake = r.i64();
    e.challenged_at = r.u64();
    auto nv = r.u32();
    for (std::uint32_t j = 0; j < nv; ++j) {
      auto voter = r.digest();
      bool support = r.boolean();
      Amount tokens = r.i64();
      e.votes.emplace(voter, std::make_pair(support, tokens));
    }
    g.entries.emplace(key, std::move(e));
  }
  return g;
}

void put_commitment(CanonicalWriter& w, const Commitment& c) {
  w.str(c.id);
  w.digest(c.actor);
  w.digest(c.package);
  w.u64(c.committed_at);
  w.u64(c.promised_tick);
  put_opt_str(w, c.terms);
  w.u8(static_cast<std::uint8_t>(c.status));
  w.u64(c.completed_at);
}
Commitment get_commitment(CanonicalReader& r) {
  Commitment c;
  c.id = r.str();
  c.actor = r.digest();
  c.package = r.digest();
  c.committed_at = r.u64();
  c.promised_tick = r.u64();
  c.terms = get_opt_str(r);
  c.status = static_cast<CommitmentStatus>(r.u8());
  c.completed_at = r.u64();
  return c;
}

void put_review(CanonicalWriter& w, const ReviewRound& v) {
  w.str(v.id);
  w.digest(v.opener);
  put_seq(w, v.subjects.size(), [&](std::size_t i) {
    w.digest(v.subjects[i].first);
    w.digest(v.subjects[i].second);
  });
  put_seq(w, v.reviewers.size(), [&](std::size_t i) { w.digest(v.reviewers[i]); });
  w.str(v.pool);
  w.i64(v.reward);
  w.digest(v.escrow);
  w.u8(static_cast<std::uint8_t>(v.status));
  put_seq(w, v.scores.size(), [&, it = v.scores.begin()](std::size_t) mutable {
    w.digest(it->first);
    put_seq(w, it->second.size(), [&, st = it->second.begin()](std::size_t) mutable {
      w.digest(st->first);
      w.u8(st->second);
      ++st;
    });
    ++it;
  });
}
ReviewRound get_review(CanonicalReader& r) {
  ReviewRound v;
  v.id = r.str();
  v.opener = r.digest();
  auto ns = r.u32();
  v.subjects.resize(ns);
  for (auto& s : v.subjects) {
    s.first = r.digest();
    s.second = r.digest();
  }
  auto nr = r.u32();
  v.reviewers.resize(nr);
  for (auto& a : v.reviewers) a = r.digest();
  v.pool = r.str();
  v.reward = r.i64();
  v.escrow = r.digest();
  v.status = static_cast<ReviewStatus>(r.u8());
  auto nsc = r.u32();
  for (std::uint32_t i = 0; i < nsc; ++i) {
    auto reviewer = r.digest();
    auto& row = v.scores[reviewer];
    auto nrow = r.u32();
    for (std::uint32_t j = 0; j < nrow; ++j) {
      auto subject = r.digest();
      row[subject] = r.u8();
    }
  }
  return v;
}

void put_sanction_step(CanonicalWriter& w, const SanctionStep& s) {
  w.u8(static_cast<std::uint8_t>(s.index()));
  if (const auto* rs = std::get_if<ReputationSlashStep>(&s)) w.i64(rs->share);
  if (const auto* rr = std::get_if<RewardShareReductionStep>(&s)) w.i64(rr->share);
}
SanctionStep get_sanction_step(CanonicalReader& r) {
  switch (r.u8()) {
    case 0: return WarningStep{};
    case 1: return ReputationSlashStep{r.i64()};
    case 2: return RewardShareReductionStep{r.i64()};
    case 3: return RemovalStep{};
    default: throw DecodeError("bad sanction step tag");
  }
}

void put_dispute(CanonicalWriter& w, const Dispute& d) {
  w.str(d.id);
  w.digest(d.claimant);
  w.digest(d.defendant);
  w.digest(d.claim);
  put_opt_str(w, d.scope);
  w.boolean(d.remedy_violation);
  w.digest(d.escrow);
  w.u8(static_cast<std::uint8_t>(d.status));
  put_seq(w, d.jurors.size(), [&](std::size_t i) {
    w.digest(d.jurors[i].juror);
    w.i64(d.jurors[i].stake);
    w.u64(d.jurors[i].seq);
  });
  put_seq(w, d.verdicts.size(), [&, it = d.verdicts.begin()](std::size_t) mutable {
    w.digest(it->first);
    w.boolean(it->second);
    ++it;
  });
  w.boolean(d.upheld);
}
Dispute get_dispute(CanonicalReader& r) {
  Dispute d;
  d.id = r.str();
  d.claimant = r.digest();
  d.defendant = r.digest();
  d.claim = r.digest();
  d.scope = get_opt_str(r);
  d.remedy_violation = r.boolean();
  d.escrow = r.digest();
  d.status = static_cast<DisputeStatus>(r.u8());
  auto nj = r.u32();
  d.jurors.resize(nj);
  for (auto& j : d.jurors) {
    j.juror = r.digest();
    j.stake = r.i64();
    j.seq = r.u64();
  }
  auto nv = r.u32();
  for (std::uint32_t i = 0; i < nv; ++i) {
    auto k = r.digest();
    d.verdicts[k] = r.boolean();
  }
  d.upheld = r.boolean();
  return d;
}

void put_node(CanonicalWriter& w, const OrgNode& n) {
  w.str(n.id);
  put_opt_str(w, n.parent);
  put_seq(w, n.members.size(), [&, it = n.members.begin()](std::size_t) mutable {
    w.digest(*it);
    ++it;
  });
  put_seq(w, n.mandates.size(), [&, it = n.mandates.begin()](std::size_t) mutable {
    w.str(*it);
    ++it;
  });
}
OrgNode get_node(CanonicalReader& r) {
  OrgNode n;
  n.id = r.str();
  n.parent = get_opt_str(r);
  auto nm = r.u32();
  for (std::uint32_t i = 0; i < nm; ++i) n.members.insert(r.digest());
  auto nd = r.u32();
  for (std::uint32_t i = 0; i < nd; ++i) n.mandates.insert(r.str());
  return n;
}

void put_config(CanonicalWriter& w, const Config& c) {
  w.str(c.currency_class);
  w.str(c.membership_class);
  w.str(c.reputation_class);
  w.u64(c.ppc_period_len);
  put_seq(w, c.ladder.steps.size(),
          [&](std::size_t i) { put_sanction_step(w, c.ladder.steps[i]); });
  w.u64(c.ladder.window);
  w.str(c.court_stake_class);
  w.i64(c.court_min_stake);
  w.i64(c.court_slash);
  w.u32(c.deadlock_n);
  w.boolean(c.auto_sanctions);
}
Config get_config(CanonicalReader& r) {
  Config c;
  c.currency_class = r.str();
  c.membership_class = r.str();
  c.reputation_class = r.str();
  c.ppc_period_len = r.u64();
  auto n = r.u32();
  c.ladder.steps.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i) c.ladder.steps.push_back(get_sanction_step(r));
  c.ladder.window = r.u64();
  c.court_stake_class = r.str();
  c.court_min_stake = r.i64();
  c.court_slash = r.i64();
  c.deadlock_n = r.u32();
  c.auto_sanctions = r.boolean();
  return c;
}

}  // namespace

void encode_state(CanonicalWriter& w, const WorldState& s) {
  w.u64(s.world_seed);
  for (int m = 1; m <= kMechanismCount; ++m) w.boolean(s.mech[m]);
  put_config(w, s.cfg);
  w.u64(s.tick);
  w.u64(s.applied);

  put_seq(w, s.addresses.size(), [&, it = s.addresses.begin()](std::size_t) mutable {
    w.digest(it->first);
    put_address_record(w, it->second);
    ++it;
  });
  put_seq(w, s.classes.size(), [&, it = s.classes.begin()](std::size_t) mutable {
    put_token_class(w, it->second);
    ++it;
  });
  put_seq(w, s.roles.grants.size(), [&, it = s.roles.grants.begin()](std::size_t) mutable {
    w.str(it->first);
    put_seq(w, it->second.size(), [&, ht = it->second.begin()](std::size_t) mutable {
      w.digest(ht->first);
      put_seq(w, ht->second.size(), [&, st = ht->second.begin()](std::size_t) mutable {
        w.str(*st);
        ++st;
      });
      ++ht;
    });
    ++it;
  });
  put_seq(w, s.pools.size(), [&, it = s.pools.begin()](std::size_t) mutable {
    put_pool(w, it->second);
    ++it;
  });
  put_seq(w, s.curves.size(), [&, it = s.curves.begin()](std::size_t) mutable {
    put_curve(w, it->second);
    ++it;
  });
  put_seq(w, s.rules.size(), [&, it = s.rules.begin()](std::size_t) mutable {
    put_rule(w, it->second);
    ++it;
  });
  put_seq(w, s.appropriations.size(), [&, it = s.appropriations.begin()](std::size_t) mutable {
    w.str(it->first);
    put_seq(w, it->second.size(), [&, at = it->second.begin()](std::size_t) mutable {
      w.digest(at->first);
      put_seq(w, at->second.size(), [&](std::size_t i) {
        w.u64(at->second[i].first);
        w.i64(at->second[i].second);
      });
      ++at;
    });
    ++it;
  });
  put_seq(w, s.approvals.size(), [&, it = s.approvals.begin()](std::size_t) mutable {
    put_approval(w, it->second);
    ++it;
  });
  put_seq(w, s.policies.size(), [&, it = s.policies.begin()](std::size_t) mutable {
    w.str(it->second.id);
    w.str(it->second.pool);
    w.str(it->second.weight_class);
    ++it;
  });
  put_seq(w, s.incentives.size(), [&, it = s.incentives.begin()](std::size_t) mutable {
    w.str(it->second.id);
    w.str(it->second.trigger);
    w.i64(it->second.reward);
    w.str(it->second.reward_class);
    ++it;
  });
  put_seq(w, s.fired_incentives.size(),
          [&, it = s.fired_incentives.begin()](std::size_t) mutable {
            w.str(it->first);
            w.u64(it->second);
            ++it;
          });
  put_seq(w, s.tenders.size(), [&, it = s.tenders.begin()](std::size_t) mutable {
    put_tender(w, it->second);
    ++it;
  });
  put_seq(w, s.markets.size(), [&, it = s.markets.begin()](std::size_t) mutable {
    put_market(w, it->second);
    ++it;
  });
  put_seq(w, s.proposals.size(), [&, it = s.proposals.begin()](std::size_t) mutable {
    put_proposal(w, it->second);
    ++it;
  });
  put_seq(w, s.registries.size(), [&, it = s.registries.begin()](std::size_t) mutable {
    put_registry(w, it->second);
    ++it;
  });
  put_seq(w, s.commitments.size(), [&, it = s.commitments.begin()](std::size_t) mutable {
    put_commitment(w, it->second);
    ++it;
  });
  put_seq(w, s.reviews.size(), [&, it = s.reviews.begin()](std::size_t) mutable {
    put_review(w, it->second);
    ++it;
  });
  put_seq(w, s.ppc_reported.size(), [&, it = s.ppc_reported.begin()](std::size_t) mutable {
    w.u64(*it);
    ++it;
  });
  put_seq(w, s.violations.size(), [&, it = s.violations.begin()](std::size_t) mutable {
    w.digest(it->first);
    put_seq(w, it->second.size(), [&](std::size_t i) {
      const auto& v = it->second[i];
      w.u8(static_cast<std::uint8_t>(v.kind));
      w.u64(v.at);
      put_opt_str(w, v.scope);
      w.u64(v.seq);
    });
    ++it;
  });
  put_seq(w, s.sanctions.size(), [&, it = s.sanctions.begin()](std::size_t) mutable {
    w.digest(it->first);
    put_seq(w, it->second.size(), [&](std::size_t i) {
      w.u32(it->second[i].step);
      w.u64(it->second[i].at);
      w.u64(it->second[i].seq);
    });
    ++it;
  });
  put_seq(w, s.reward_reductions.size(),
          [&, it = s.reward_reductions.begin()](std::size_t) mutable {
            w.digest(it->first);
            w.i64(it->second.share);
            w.u64(it->second.until);
            ++it;
          });
  put_seq(w, s.disputes.size(), [&, it = s.disputes.begin()](std::size_t) mutable {
    put_dispute(w, it->second);
    ++it;
  });
  put_seq(w, s.org.size(), [&, it = s.org.begin()](std::size_t) mutable {
    put_node(w, it->second);
    ++it;
  });
  w.str(s.org_root);
  put_seq(w, s.delegations.size(), [&, it = s.delegations.begin()](std::size_t) mutable {
    w.str(std::get<0>(*it));
    w.str(std::get<1>(*it));
    w.str(std::get<2>(*it));
    ++it;
  });
}

Digest32 state_hash(const WorldState& s) {
  CanonicalWriter w;
  encode_state(w, s);
  return crypto::sha256(w.data());
}

WorldState decode_state(CanonicalReader& r) {
  WorldState s;
  s.world_seed = r.u64();
  for (int m = 1; m <= kMechanismCount; ++m) s.mech[m] = r.boolean();
  s.cfg = get_config(r);
  s.tick = r.u64();
  s.applied = r.u64();

  auto na = r.u32();
  for (std::uint32_t i = 0; i < na; ++i) {
    auto k = r.digest();
    s.addresses.emplace(k, get_address_record(r));
  }
  auto nc = r.u32();
  for (std::uint32_t i = 0; i < nc; ++i) {
    auto c = get_token_class(r);
    s.classes.emplace(c.id, std::move(c));
  }
  auto nr = r.u32();
  for (std::uint32_t i = 0; i < nr; ++i) {
    auto role = r.str();
    auto& holders = s.roles.grants[role];
    auto nh = r.u32();
    for (std::uint32_t j = 0; j < nh; ++j) {
      auto holder = r.digest();
      auto& scopes = holders[holder];
      auto nsc = r.u32();
      for (std::uint32_t k = 0; k < nsc; ++k) scopes.insert(r.str());
    }
  }
  auto np = r.u32();
  for (std::uint32_t i = 0; i < np; ++i) {
    auto p = get_pool(r);
    s.pools.emplace(p.id, std::move(p));
  }
  auto ncu = r.u32();
  for (std::uint32_t i = 0; i < ncu; ++i) {
    auto c = get_curve(r);
    s.curves.emplace(c.id, std::move(c));
  }
  auto nru = r.u32();
  for (std::uint32_t i = 0; i < nru; ++i) {
    auto p = get_rule(r);
    s.rules.emplace(p.id, std::move(p));
  }
  auto nap = r.u32();
  for (std::uint32_t i = 0; i < nap; ++i) {
    auto rule = r.str();
    auto& per = s.appropriations[rule];
    auto nac = r.u32();
    for (std::uint32_t j = 0; j < nac; ++j) {
      auto who = r.digest();
      auto& hist = per[who];
      auto nh = r.u32();
      hist.resize(nh);
      for (auto& e : hist) {
        e.first = r.u64();
        e.second = r.i64();
      }
    }
  }
  auto nav = r.u32();
  for (std::uint32_t i = 0; i < nav; ++i) {
    auto a = get_approval(r);
    s.approvals.emplace(a.id, std::move(a));
  }
  auto npo = r.u32();
  for (std::uint32_t i = 0; i < npo; ++i) {
    DistributionPolicy p;
    p.id = r.str();
    p.pool = r.str();
    p.weight_class = r.str();
    s.policies.emplace(p.id, std::move(p));
  }
  auto nin = r.u32();
  for (std::uint32_t i = 0; i < nin; ++i) {
    IncentiveRule ir;
    ir.id = r.str();
    ir.trigger = r.str();
    ir.reward = r.i64();
    ir.reward_class = r.str();
    s.incentives.emplace(ir.id, std::move(ir));
  }
  auto nfi = r.u32();
  for (std::uint32_t i = 0; i < nfi; ++i) {
    auto id = r.str();
    auto seq = r.u64();
    s.fired_incentives.emplace(id, seq);
  }
  auto nt = r.u32();
  for (std::uint32_t i = 0; i < nt; ++i) {
    auto t = get_tender(r);
    s.tenders.emplace(t.id, std::move(t));
  }
  auto nm = r.u32();
  for (std::uint32_t i = 0; i < nm; ++i) {
    auto m = get_market(r);
    s.markets.emplace(m.id, std::move(m));
  }
  auto npr = r.u32();
  for (std::uint32_t i = 0; i < npr; ++i) {
    auto p = get_proposal(r);
    s.proposals.emplace(p.id, std::move(p));
  }
  auto nrg = r.u32();
  for (std::uint32_t i = 0; i < nrg; ++i) {
    auto g = get_registry(r);
    s.registries.emplace(g.id, std::move(g));
  }
  auto nco = r.u32();
  for (std::uint32_t i = 0; i < nco; ++i) {
    auto c = get_commitment(r);
    s.commitments.emplace(c.id, std::move(c));
  }
  auto nrv = r.u32();
  for (std::uint32_t i = 0; i < nrv; ++i) {
    auto v = get_review(r);
    s.reviews.emplace(v.id, std::move(v));
  }
  auto npp = r.u32();
  for (std::uint32_t i = 0; i < npp; ++i) s.ppc_reported.insert(r.u64());
  auto nvi = r.u32();
  for (std::uint32_t i = 0; i < nvi; ++i) {
    auto who = r.digest();
    auto& vec = s.violations[who];
    auto nv = r.u32();
    vec.resize(nv);
    for (auto& v : vec) {
      v.kind = static_cast<ViolationKind>(r.u8());
      v.at = r.u64();
      v.scope = get_opt_str(r);
      v.seq = r.u64();
    }
  }
  auto nsa = r.u32();
  for (std::uint32_t i = 0; i < nsa; ++i) {
    auto who = r.digest();
    auto& vec = s.sanctions[who];
    auto ns = r.u32();
    vec.resize(ns);
    for (auto& a : vec) {
      a.step = r.u32();
      a.at = r.u64();
      a.seq = r.u64();
    }
  }
  auto nrr = r.u32();
  for (std::uint32_t i = 0; i < nrr; ++i) {
    auto who = r.digest();
    RewardReduction rr;
    rr.share = r.i64();
    rr.until = r.u64();
    s.reward_reductions.emplace(who, rr);
  }
  auto nd = r.u32();
  for (std::uint32_t i = 0; i < nd; ++i) {
    auto d = get_dispute(r);
    s.disputes.emplace(d.id, std::move(d));
  }
  auto no = r.u32();
  for (std::uint32_t i = 0; i < no; ++i) {
    auto n = get_node(r);
    s.org.emplace(n.id, std::move(n));
  }
  s.org_root = r.str();
  auto ndl = r.u32();
  for (std::uint32_t i = 0; i < ndl; ++i) {
    auto from = r.str();
    auto to = r.str();
    auto kind = r.str();
    s.delegations.emplace(from, to, kind);
  }
  return s;
}

}  // namespace commons
