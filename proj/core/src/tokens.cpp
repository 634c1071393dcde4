#include "commons/tokens.hpp"

#include "commons/world.hpp"

namespace commons::tokens {

namespace {

Result<TokenClass*> find_class(WorldState& w, const ClassId& cls) {
  auto it = w.classes.find(cls);
  if (it == w.classes.end()) return Error{Errc::UnknownClass, cls};
  return &it->second;
}

Status require_address(const WorldState& w, const AddressId& who) {
  if (!w.addresses.count(who)) return Error{Errc::UnknownAddress, short_hex(who)};
  return ok_status();
}

}  // namespace

Amount balance(const WorldState& w, const ClassId& cls, const AddressId& who) {
  auto it = w.classes.find(cls);
  if (it == w.classes.end()) return 0;
  auto b = it->second.balances.find(who);
  return b == it->second.balances.end() ? 0 : b->second;
}

Status mint(WorldState& w, const ClassId& cls, const AddressId& to, Amount amount) {
  auto c = find_class(w, cls);
  if (!c.ok()) return c.error();
  if (auto s = require_address(w, to); !s.ok()) return s;
  if (amount <= 0) return Error{Errc::InvalidPayload, "non-positive mint"};
  c.value()->balances[to] += amount;
  c.value()->total_supply += amount;
  return ok_status();
}

Status burn(WorldState& w, const ClassId& cls, const AddressId& from, Amount amount) {
  auto c = find_class(w, cls);
  if (!c.ok()) return c.error();
  if (auto s = require_address(w, from); !s.ok()) return s;
  if (amount <= 0) return Error{Errc::InvalidPayload, "non-positive burn"};
  auto it = c.value()->balances.find(from);
  Amount held = it == c.value()->balances.end() ? 0 : it->second;
  if (held < amount) return Error{Errc::Insufficient, cls};
  // Zero balances are erased, never stored: one canonical encoding per state.
  if (held == amount) c.value()->balances.erase(it);
  else it->second -= amount;
  c.value()->total_supply -= amount;
  return ok_status();
}

Status transfer(WorldState& w, const AddressId& from, const ClassId& cls, const AddressId& to,
                Amount amount) {
  auto c = find_class(w, cls);
  if (!c.ok()) return c.error();
  if (!c.value()->transferable) return Error{Errc::NonTransferable, cls};
  if (auto s = require_address(w, to); !s.ok()) return s;
  if (amount <= 0) return Error{Errc::InvalidPayload, "non-positive transfer"};
  auto it = c.value()->balances.find(from);
  Amount held = it == c.value()->balances.end() ? 0 : it->second;
  if (held < amount) return Error{Errc::Insufficient, cls};
  if (held == amount) c.value()->balances.erase(it);
  else it->second -= amount;
  c.value()->balances[to] += amount;
  return ok_status();
}

Status grant_role(WorldState& w, const AddressId& holder, const RoleName& role,
                  const RoleScope& scope) {
  if (auto s = require_address(w, holder); !s.ok()) return s;
  if (scope.node && !w.org.count(*scope.node)) return Error{Errc::UnknownNode, *scope.node};
  w.roles.grants[role][holder].insert(scope.node.value_or(""));
  return ok_status();
}

Status revoke_role(WorldState& w, const AddressId& holder, const RoleName& role,
                   const RoleScope& scope) {
  auto r = w.roles.grants.find(role);
  if (r == w.roles.grants.end()) return Error{Errc::InvalidPayload, "no such grant"};
  auto h = r->second.find(holder);
  if (h == r->second.end() || !h->second.erase(scope.node.value_or("")))
    return Error{Errc::InvalidPayload, "no such grant"};
  if (h->second.empty()) r->second.erase(h);
  if (r->second.empty()) w.roles.grants.erase(r);
  return ok_status();
}

bool has_role(const WorldState& w, const AddressId& who, const RoleName& role) {
  auto r = w.roles.grants.find(role);
  if (r == w.roles.grants.end()) return false;
  auto h = r->second.find(who);
  return h != r->second.end() && !h->second.empty();
}

bool has_role_global(const WorldState& w, const AddressId& who, const RoleName& role) {
  auto r = w.roles.grants.find(role);
  if (r == w.roles.grants.end()) return false;
  auto h = r->second.find(who);
  return h != r->second.end() && h->second.count("");
}

bool has_role_at(const WorldState& w, const AddressId& who, const RoleName& role,
                 const NodeId& node) {
  auto r = w.roles.grants.find(role);
  if (r == w.roles.grants.end()) return false;
  auto h = r->second.find(who);
  if (h == r->second.end()) return false;
  if (h->second.count("")) return true;
  for (const auto& granted : h->second)
    if (enterprise::is_ancestor(w, granted, node)) return true;
  return false;
}

bool check_access(const WorldState& w, const AddressId& who) {
  if (!w.mechanism_on(1)) return true;
  auto it = w.addresses.find(who);
  if (it == w.addresses.end() || it->second.removed) return false;
  return balance(w, w.cfg.membership_class, who) >= 1;
}

}  // namespace commons::tokens
