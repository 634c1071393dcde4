#include "commons/enterprise.hpp"

#include <algorithm>

#include "commons/world.hpp"

namespace commons::enterprise {

bool is_ancestor(const WorldState& w, const NodeId& anc, const NodeId& node) {
  std::optional<NodeId> cur = node;
  while (cur) {
    if (*cur == anc) return true;
    auto it = w.org.find(*cur);
    if (it == w.org.end()) return false;
    cur = it->second.parent;
  }
  return false;
}

std::set<AddressId> subtree_members(const WorldState& w, const NodeId& node) {
  std::set<AddressId> out;
  for (const auto& [id, n] : w.org) {
    if (!is_ancestor(w, node, id)) continue;
    out.insert(n.members.begin(), n.members.end());
  }
  return out;
}

bool is_subtree_member(const WorldState& w, const NodeId& node, const AddressId& who) {
  for (const auto& [id, n] : w.org)
    if (n.members.contains(who) && is_ancestor(w, node, id)) return true;
  return false;
}

bool has_mandate(const WorldState& w, const NodeId& node, const DecisionKind& kind) {
  auto it = w.org.find(node);
  if (it == w.org.end()) return false;
  if (it->second.mandates.contains(kind)) return true;
  for (const auto& key : w.delegations) {
    const auto& [from, to, k] = key;
    if (to != node || k != kind) continue;
    auto fit = w.org.find(from);
    if (fit != w.org.end() && fit->second.mandates.contains(kind)) return true;
  }
  return false;
}

Result<NodeId> route_decision(const WorldState& w, const DecisionKind& kind,
                              const std::vector<AddressId>& affected) {
  if (affected.empty()) return Error{Errc::InvalidPayload, "nobody affected"};

  auto qualifies = [&](const NodeId& id) {
    if (!has_mandate(w, id, kind)) return false;
    return std::all_of(affected.begin(), affected.end(),
                       [&](const AddressId& who) { return is_subtree_member(w, id, who); });
  };

  std::optional<NodeId> best;
  for (const auto& [id, node] : w.org) {
    if (!qualifies(id)) continue;
    bool minimal = true;
    for (const auto& [other, n2] : w.org) {
      if (other == id) continue;
      if (is_ancestor(w, id, other) && qualifies(other)) {
        minimal = false;
        break;
      }
    }
    if (!minimal) continue;
    if (!best || id < *best) best = id;
  }
  if (!best) return Error{Errc::NoCompetentNode, kind};
  return *best;
}

Result<NodeId> escalation_target(const WorldState& w, const NodeId& node,
                                 const DecisionKind& kind) {
  auto it = w.org.find(node);
  if (it == w.org.end()) return Error{Errc::UnknownNode, node};
  std::optional<NodeId> cur = it->second.parent;
  while (cur) {
    if (has_mandate(w, *cur, kind)) return *cur;
    auto pit = w.org.find(*cur);
    if (pit == w.org.end()) break;
    cur = pit->second.parent;
  }
  return Error{Errc::AtRoot, node};
}

Status delegate(WorldState& w, const AddressId&, const NodeId& from, const NodeId& to,
                const DecisionKind& kind) {
  auto fit = w.org.find(from);
  if (fit == w.org.end()) return Error{Errc::UnknownNode, from};
  if (!w.org.contains(to)) return Error{Errc::UnknownNode, to};
  if (from == to) return Error{Errc::InvalidPayload, "self-delegation"};
  if (kind.empty()) return Error{Errc::InvalidPayload, "empty decision kind"};
  // Only a node's own mandate travels; received mandates do not re-delegate.
  if (!fit->second.mandates.contains(kind)) return Error{Errc::NoMandate, from + "/" + kind};
  auto [ignore, inserted] = w.delegations.insert(DelegationKey{from, to, kind});
  if (!inserted) return Error{Errc::DuplicateEntry, "delegation exists"};
  return ok_status();
}

Status revoke_delegation(WorldState& w, const AddressId&, const NodeId& from, const NodeId& to,
                         const DecisionKind& kind) {
  if (w.delegations.erase(DelegationKey{from, to, kind}) == 0)
    return Error{Errc::UnknownNode, "no such delegation"};
  return ok_status();
}

}  // namespace commons::enterprise
