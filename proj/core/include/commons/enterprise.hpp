#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "commons/support/result.hpp"
#include "commons/types.hpp"

namespace commons {

struct WorldState;

struct OrgNode {
  NodeId id;
  std::optional<NodeId> parent;  // nullopt only for the root
  std::set<AddressId> members;
  std::set<DecisionKind> mandates;
};

using DelegationKey = std::tuple<NodeId, NodeId, DecisionKind>;  // from, to, kind

namespace enterprise {

bool is_ancestor(const WorldState& w, const NodeId& anc, const NodeId& node);  // reflexive

/// Members of the node and all its descendants.
std::set<AddressId> subtree_members(const WorldState& w, const NodeId& node);

bool is_subtree_member(const WorldState& w, const NodeId& node, const AddressId& who);

/// Own mandate or one received by delegation.
bool has_mandate(const WorldState& w, const NodeId& node, const DecisionKind& kind);

/// Smallest competent node: contains every affected address in its subtree,
/// holds the mandate, and no qualifying strict descendant exists. Ties break
/// toward the smaller node id.
Result<NodeId> route_decision(const WorldState& w, const DecisionKind& kind,
                              const std::vector<AddressId>& affected);

/// Nearest strict ancestor of `node` holding the mandate.
Result<NodeId> escalation_target(const WorldState& w, const NodeId& node,
                                 const DecisionKind& kind);

Status delegate(WorldState& w, const AddressId& actor, const NodeId& from, const NodeId& to,
                const DecisionKind& kind);
Status revoke_delegation(WorldState& w, const AddressId& actor, const NodeId& from,
                         const NodeId& to, const DecisionKind& kind);

}  // namespace enterprise
}  // namespace commons
