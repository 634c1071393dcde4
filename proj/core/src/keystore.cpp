#include "commons/keystore.hpp"

#include <algorithm>
#include <stdexcept>

namespace commons {

namespace {

// seed32 = sha256("addr-key" || u64be(world_seed) || name)
crypto::Seed actor_seed(std::uint64_t world_seed, const std::string& name) {
  Bytes pre;
  const char tag[] = "addr-key";
  pre.insert(pre.end(), tag, tag + 8);
  for (int i = 7; i >= 0; --i) pre.push_back(static_cast<Byte>((world_seed >> (8 * i)) & 0xff));
  pre.insert(pre.end(), name.begin(), name.end());
  Digest32 d = crypto::sha256(pre);
  crypto::Seed seed{};
  std::copy(d.v.begin(), d.v.end(), seed.begin());
  return seed;
}

}  // namespace

AddressId Keystore::add_actor(std::uint64_t world_seed, const std::string& name) {
  auto kp = crypto::keypair_from_seed(actor_seed(world_seed, name));
  Bytes pub(kp.pub.begin(), kp.pub.end());
  AddressId id = crypto::sha256(pub);
  keys_[id] = kp;
  names_[name] = id;
  return id;
}

const crypto::KeyPair* Keystore::find(const AddressId& who) const {
  auto it = keys_.find(who);
  return it == keys_.end() ? nullptr : &it->second;
}

std::optional<AddressId> Keystore::by_name(const std::string& name) const {
  auto it = names_.find(name);
  if (it == names_.end()) return std::nullopt;
  return it->second;
}

crypto::Signature Keystore::sign(const AddressId& who, const Bytes& preimage) const {
  const auto* kp = find(who);
  if (!kp) throw std::out_of_range("keystore: unknown address");
  return crypto::sign(preimage, kp->sec);
}

crypto::PublicKey derive_actor_key(std::uint64_t world_seed, const std::string& name) {
  return crypto::keypair_from_seed(actor_seed(world_seed, name)).pub;
}

}  // namespace commons
