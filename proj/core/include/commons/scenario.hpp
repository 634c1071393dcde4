#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "commons/commands.hpp"
#include "commons/keystore.hpp"
#include "commons/support/result.hpp"
#include "commons/types.hpp"
#include "commons/world.hpp"

namespace commons {

enum class PolicyKind : std::uint8_t { Honest = 0, Opportunistic = 1, Deterrable = 2 };

std::string_view policy_kind_name(PolicyKind k);

struct AgentSpec {
  std::string actor;
  PolicyKind policy = PolicyKind::Honest;
  Ppm greed = 0;             // share of the remaining reserve targeted per tick
  Ppm deterrence = kPpmOne;  // greed multiplier per newly observed sanction
};

struct ProjectSpec {
  PoolId pool;
  Amount packages = 0;
  Amount package_cost = 1;
  RuleId rule;           // appropriation rule agents draw under
  Tick commit_lead = 2;  // promised tick offset for agent commitments
};

struct ScriptEvent {
  Tick at = 0;
  std::string author;  // actor name
  Command cmd;
};

struct ClassSpec {
  ClassId id;
  std::string display;
  bool transferable = true;
};

struct ActorSpec {
  std::string name;
  ActorKind kind = ActorKind::Human;
  std::vector<std::pair<RoleName, std::optional<NodeId>>> roles;
  std::map<ClassId, Amount> balances;
};

struct PoolSpec {
  PoolId id;
  ClassId currency;
  Amount initial = 0;  // minted into the pool escrow at genesis
};

struct CurveSpec {
  CurveId id;
  ClassId token;
  ClassId currency;
  std::int64_t p0_num = 0;
  std::int64_t p0_den = 1;
  std::int64_t k_num = 0;
  std::int64_t k_den = 1;
  Ppm tribute_in = 0;
  Ppm tribute_out = 0;
  PoolId tribute_pool;
};

struct RegistrySpec {
  RegistryId id;
  ClassId stake_class;
  Amount min_stake = 1;
  Tick apply_window = 1;
  Tick vote_window = 1;
};

struct NodeSpec {
  NodeId id;
  std::optional<NodeId> parent;
  std::vector<std::string> members;  // actor names
  std::vector<DecisionKind> mandates;
};

/// A fully resolved simulation document: every name cross-checked, every
/// address derived under the effective seed. Identical (document, seed)
/// pairs resolve to identical scenarios.
struct Scenario {
  std::string name;
  std::uint64_t seed = 0;
  Tick ticks = 0;
  std::array<bool, kMechanismCount + 1> mech{};
  Config cfg;

  std::vector<ClassSpec> classes;
  std::vector<ActorSpec> actors;
  std::vector<PoolSpec> pools;
  std::vector<CurveSpec> curves;
  std::vector<RuleProgramDef> rules;
  std::vector<DistributionPolicy> policies;
  std::vector<IncentiveRule> incentives;
  std::vector<RegistrySpec> registries;
  std::vector<NodeSpec> org;

  std::vector<AgentSpec> agents;
  std::optional<ProjectSpec> project;
  std::vector<ScriptEvent> script;

  Digest32 source_digest{};  // sha256 of the document bytes
};

namespace scenario {

/// Reserved machine actor that authors tick advances; always present.
inline constexpr std::string_view kSchedulerName = "scheduler";

AddressId actor_address(std::uint64_t seed, const std::string& name);

/// Parse and cross-check a scenario document. Errors are path-qualified
/// (`pools[1].currency: unknown class "x"`). `seed_override` replaces the
/// document seed before any name resolution.
Result<Scenario> parse(const std::string& text,
                       std::optional<std::uint64_t> seed_override = std::nullopt);
Result<Scenario> load(const std::filesystem::path& file,
                      std::optional<std::uint64_t> seed_override = std::nullopt);

/// Genesis world for a parsed scenario; registers the scheduler and every
/// actor in `ks`. Infallible: parse() has already rejected bad documents.
WorldState build_genesis(const Scenario& s, Keystore& ks);

}  // namespace scenario
}  // namespace commons
