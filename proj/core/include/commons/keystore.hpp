#pragma once

#include <map>
#include <optional>
#include <string>

#include "commons/support/crypto.hpp"
#include "commons/types.hpp"

namespace commons {

/// Holds the signing keys of scripted actors. Keys derive deterministically
/// from the world seed and the actor name, so a scenario re-run under the
/// same seed produces byte-identical events.
class Keystore {
 public:
  AddressId add_actor(std::uint64_t world_seed, const std::string& name);

  const crypto::KeyPair* find(const AddressId& who) const;
  std::optional<AddressId> by_name(const std::string& name) const;

  crypto::Signature sign(const AddressId& who, const Bytes& preimage) const;  // throws on unknown

 private:
  std::map<AddressId, crypto::KeyPair> keys_;
  std::map<std::string, AddressId> names_;
};

/// The public key an actor name derives to, without retaining the secret.
crypto::PublicKey derive_actor_key(std::uint64_t world_seed, const std::string& name);

}  // namespace commons
