#include "commons/concept_map.hpp"

#include <algorithm>
#include <set>

namespace commons::concept_map {

namespace {

ConceptMap build() {
  ConceptMap m;

  m.principles = {
      {"1", "Clearly defined boundaries", {"1a", "1b"},
       "Participating firms collectively determine who is a risk/reward partner (1a); the "
       "sponsor and team define which parts of scope and budget are open to all (1b)."},
      {"2", "Congruence with local conditions and between appropriation and provision", {"2a",
       "2b"},
       "Trade contractors join early for their knowledge of local conditions (2a); risk/reward "
       "participation is weighted by cost structure, involvement, and influence (2b)."},
      {"3", "Collective-choice arrangements", {},
       "Signatories of the multiparty contract vote on decisions that concern their work and "
       "expertise."},
      {"4", "Monitoring of the users and the resources", {"4a", "4b"},
       "Teams track cost targets and weekly withdrawals openly (4a); promised work is tracked "
       "through the publicly reported PPC metric (4b)."},
      {"5", "Graduated sanctions", {},
       "Sanctions escalate with continued non-conformance or PPC underperformance, up to "
       "removal of participants or firms."},
      {"6", "Conflict-resolution mechanisms", {},
       "Participants craft dispute resolution strategies intended to avoid costly litigation."},
      {"7", "Minimal recognition of rights to organize", {},
       "Collective decision procedures let the team override the wishes of the project "
       "sponsor."},
      {"8", "Nested enterprises", {},
       "Governance activities are organized into multiple layers of hierarchy."},
  };

  m.mechanisms = {
      {"M1", "Identity, ownership, and access rights based on addresses and tokens", "1a"},
      {"M2", "Tokenization of the resources", "1b"},
      {"M3", "Decentralized markets to match supply and demand of local needs and conditions",
       "2a"},
      {"M4", "Formalizing appropriation and provision rules with smart contracts", "2b"},
      {"M5", "Decentralized proposal and voting platforms", "3"},
      {"M6", "Decentralized prediction markets", "3"},
      {"M7", "Transparent record and automation of transactions", "4a"},
      {"M8", "Digital signatures for tamper-proof commitments", "4b"},
      {"M9", "Reputation tokens", "4b"},
      {"M10", "Decentralized peer-review mechanisms", "4b"},
      {"M11", "Transparent and self-enforcing sanctions", "5"},
      {"M12", "Decentralized jurisdiction systems", "6"},
      {"M13", "Ensure decisions are made by affected parties", "7"},
      {"M14", "Bottom-up interaction among multiple hierarchical levels", "8"},
  };

  m.applications = {
      {"M1-1", "Scalable management of user identities and rights", "M1", "1a"},
      {"M1-2", "Machine participation", "M1", "1a"},
      {"M2-1", "Representation and ownership of project resources", "M2", "1b"},
      {"M2-2", "Decentralized funding and investment mechanisms", "M2", "1b"},
      {"M3-1",
       "Non-rent seeking and unrestricted matching of project needs with local conditions",
       "M3", "2a"},
      {"M4-1", "Transparent logic for the appropriation and access to resources", "M4", "2b"},
      {"M4-2", "Scalable and self-enforcing shared risk and rewards", "M4", "2b"},
      {"M4-3", "New incentive structures", "M4", "2b"},
      {"M5-1", "Scaling of collective choices", "M5", "3"},
      {"M5-2", "Definition of voting rights for intended power distributions", "M5", "3"},
      {"M6-1", "Gamified and scalable sourcing of local actors' knowledge", "M6", "3"},
      {"M7-1", "Transparent user actions and resource flows with predictive automation", "M7",
       "4a"},
      {"M7-2", "Transaction history enables reaction to events and learning from past decisions",
       "M7", "4a"},
      {"M8-1", "Smart legal contracts", "M8", "4b"},
      {"M9-1", "Reputation tokens for special rights or for credentials", "M9", "4b"},
      {"M10-1", "Peer-review for project progress, quality, and cost", "M10", "4b"},
      {"M11-1", "Token-based sanctioning", "M11", "5"},
      {"M11-2", "Social sanctioning through transparent action", "M11", "5"},
      {"M12-1", "Smart contract based mini courts for fast and transparent conflict resolution",
       "M12", "6"},
      {"M12-2", "Token-based dispute participation to ensure skin in the game", "M12", "6"},
      {"M13-1",
       "Smart contracts ensure that powerful parties cannot solely enforce collective choices "
       "and conflict resolution",
       "M13", "7"},
      {"M14-1", "Smart contracts coordinate decision making among organizational tiers", "M14",
       "8"},
  };

  // Dependencies explicitly described alongside the applications; the full
  // picture has more arrows than anyone has written down.
  const std::vector<std::pair<std::string, std::vector<std::string>>> deps = {
      {"M1-1", {"M2-1", "M3-1", "M4-1", "M4-2", "M5-2", "M7-1", "M8-1", "M10-1", "M13-1",
                "M14-1"}},
      {"M1-2", {"M3-1", "M8-1", "M4-2"}},
      {"M2-1", {"M7-1"}},
      {"M2-2", {"M4-3", "M7-1"}},
      {"M4-1", {"M2-1"}},
      {"M4-3", {"M3-1", "M5-2", "M12-2", "M4-2", "M11-1"}},
      {"M5-1", {"M14-1", "M10-1", "M4-1", "M4-3", "M2-1"}},
      {"M5-2", {"M14-1"}},
      {"M6-1", {"M3-1", "M4-3"}},
      {"M7-1", {"M11-2", "M4-3", "M5-1", "M12-1", "M14-1"}},
      {"M7-2", {"M1-1", "M2-1", "M3-1", "M4-1", "M4-3", "M5-2", "M8-1", "M10-1", "M12-1"}},
      {"M9-1", {"M4-3", "M5-2", "M3-1"}},
      {"M10-1", {"M4-3", "M11-1"}},
      {"M13-1", {"M5-2", "M12-1", "M14-1"}},
  };
  for (const auto& [from, tos] : deps)
    for (const auto& to : tos) m.edges.push_back({from, to});

  return m;
}

}  // namespace

const ConceptMap& builtin() {
  static const ConceptMap map = build();
  return map;
}

std::vector<std::string> validate(const ConceptMap& map) {
  std::vector<std::string> out;

  if (map.principles.size() != 8)
    out.push_back("expected 8 principles, found " + std::to_string(map.principles.size()));
  if (map.mechanisms.size() != 14)
    out.push_back("expected 14 mechanisms, found " + std::to_string(map.mechanisms.size()));
  if (map.applications.size() != 22)
    out.push_back("expected 22 applications, found " + std::to_string(map.applications.size()));

  std::set<std::string> principle_ids;  // principal ids plus sub ids
  for (const auto& p : map.principles) {
    if (!principle_ids.insert(p.id).second) out.push_back("duplicate principle " + p.id);
    for (const auto& sub : p.subs)
      if (!principle_ids.insert(sub).second) out.push_back("duplicate sub-principle " + sub);
  }

  std::set<std::string> mech_ids;
  for (const auto& mech : map.mechanisms) {
    if (!mech_ids.insert(mech.id).second) out.push_back("duplicate mechanism " + mech.id);
    if (mech.principle.empty() || !principle_ids.contains(mech.principle))
      out.push_back(mech.id + " maps to unknown principle '" + mech.principle + "'");
  }

  std::set<std::string> app_ids;
  std::set<std::string> covered_mechs;
  for (const auto& app : map.applications) {
    if (!app_ids.insert(app.id).second) out.push_back("duplicate application " + app.id);
    if (!mech_ids.contains(app.mechanism))
      out.push_back(app.id + " names unknown mechanism " + app.mechanism);
    else
      covered_mechs.insert(app.mechanism);
    if (!principle_ids.contains(app.principle))
      out.push_back(app.id + " names unknown principle " + app.principle);
  }
  for (const auto& mech : map.mechanisms)
    if (!covered_mechs.contains(mech.id))
      out.push_back(mech.id + " has no application");

  for (const auto& e : map.edges) {
    if (!app_ids.contains(e.from)) out.push_back("edge from unknown application " + e.from);
    if (!app_ids.contains(e.to)) out.push_back("edge to unknown application " + e.to);
    if (e.from == e.to) out.push_back("self-edge on " + e.from);
  }
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& e : map.edges)
    if (!seen.insert({e.from, e.to}).second)
      out.push_back("duplicate edge " + e.from + " -> " + e.to);

  return out;
}

bool is_mechanism(const std::string& id) {
  const auto& m = builtin().mechanisms;
  return std::any_of(m.begin(), m.end(), [&](const Mechanism& x) { return x.id == id; });
}

bool is_application(const std::string& id) { return find_application(id) != nullptr; }

const Application* find_application(const std::string& id) {
  for (const auto& app : builtin().applications)
    if (app.id == id) return &app;
  return nullptr;
}

}  // namespace commons::concept_map
