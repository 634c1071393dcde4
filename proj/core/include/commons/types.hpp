#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>

#include "commons/support/bytes.hpp"
#include "commons/support/crypto.hpp"

namespace commons {

using Tick = std::uint64_t;
using Amount = std::int64_t;
using Seq = std::uint64_t;

/// 32-byte public-key-derived identifier. Escrow accounts (pools, market
/// and court deposits) derive theirs from the owning object id instead of
/// a signing key and never author events.
using AddressId = Digest32;

enum class ActorKind : std::uint8_t { Human = 0, Machine = 1, Firm = 2 };

std::string_view actor_kind_name(ActorKind k);

// Symbolic identifiers. Plain strings keep scenario files readable and the
// canonical map ordering obvious.
using ClassId = std::string;
using PoolId = std::string;
using CurveId = std::string;
using RuleId = std::string;
using PolicyId = std::string;
using ProposalId = std::string;
using TenderId = std::string;
using MarketId = std::string;
using DisputeId = std::string;
using RegistryId = std::string;
using CommitmentId = std::string;
using ReviewRoundId = std::string;
using NodeId = std::string;
using RoleName = std::string;
using DecisionKind = std::string;

/// Role scope: a named enterprise node, or the whole world.
struct RoleScope {
  std::optional<NodeId> node;  // nullopt == global

  bool global() const { return !node.has_value(); }
  auto operator<=>(const RoleScope&) const = default;
};

inline RoleScope global_scope() { return RoleScope{}; }
inline RoleScope node_scope(NodeId id) { return RoleScope{std::move(id)}; }

/// Parts-per-million fixed-point for fractions that must stay exact in
/// integer arithmetic (fees, greed, slash percentages).
using Ppm = std::int64_t;
constexpr Ppm kPpmOne = 1'000'000;

inline Amount ppm_floor(Amount value, Ppm ppm) {
  return static_cast<Amount>((static_cast<__int128>(value) * ppm) / kPpmOne);
}

inline Amount ppm_ceil(Amount value, Ppm ppm) {
  __int128 n = static_cast<__int128>(value) * ppm;
  return static_cast<Amount>((n + kPpmOne - 1) / kPpmOne);
}

}  // namespace commons
