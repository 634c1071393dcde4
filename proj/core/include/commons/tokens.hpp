#pragma once

#include <map>
#include <set>
#include <string>

#include "commons/support/result.hpp"
#include "commons/types.hpp"

namespace commons {

struct WorldState;

/// A token class. Balances are part of the class record so the supply
/// invariant (sum of balances == total_supply) is local to one struct.
struct TokenClass {
  ClassId id;
  std::string display;
  bool transferable = true;  // reputation and membership are soulbound
  Amount total_supply = 0;
  std::map<AddressId, Amount> balances;
};

struct AddressRecord {
  ActorKind kind = ActorKind::Human;
  std::string name;
  std::optional<crypto::PublicKey> pubkey;
  bool removed = false;  // set by the Removal sanction step
};

/// role -> holder -> scopes. The empty string is the global scope; node ids
/// are validated non-empty at genesis so the encoding is unambiguous.
struct RoleTable {
  std::map<RoleName, std::map<AddressId, std::set<std::string>>> grants;
};

namespace tokens {

Amount balance(const WorldState& w, const ClassId& cls, const AddressId& who);

Status mint(WorldState& w, const ClassId& cls, const AddressId& to, Amount amount);
Status burn(WorldState& w, const ClassId& cls, const AddressId& from, Amount amount);
Status transfer(WorldState& w, const AddressId& from, const ClassId& cls, const AddressId& to,
                Amount amount);

Status grant_role(WorldState& w, const AddressId& holder, const RoleName& role,
                  const RoleScope& scope);
Status revoke_role(WorldState& w, const AddressId& holder, const RoleName& role,
                   const RoleScope& scope);

/// Role check. A global grant satisfies any scope; a node grant satisfies
/// that node and is widened by has_role_at to the node's subtree.
bool has_role(const WorldState& w, const AddressId& who, const RoleName& role);
bool has_role_global(const WorldState& w, const AddressId& who, const RoleName& role);
bool has_role_at(const WorldState& w, const AddressId& who, const RoleName& role,
                 const NodeId& node);

/// Membership gate: holds the membership class and has not been removed.
/// Always true while the membership mechanism is switched off.
bool check_access(const WorldState& w, const AddressId& who);

}  // namespace tokens
}  // namespace commons
