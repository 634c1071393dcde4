#include "commons/support/crypto.hpp"

#include <sodium.h>

#include <mutex>
#include <stdexcept>

namespace commons::crypto {

namespace {
void ensure_sodium() {
  static std::once_flag once;
  std::call_once(once, [] {
    if (sodium_init() < 0) throw std::runtime_error("sodium_init failed");
  });
}
}  // namespace

Digest32 sha256(const Bytes& data) {
  ensure_sodium();
  Digest32 out;
  crypto_hash_sha256(out.v.data(), data.data(), data.size());
  return out;
}

Digest32 sha256(std::string_view data) {
  return sha256(Bytes(data.begin(), data.end()));
}

KeyPair keypair_from_seed(const Seed& seed) {
  ensure_sodium();
  KeyPair kp;
  crypto_sign_seed_keypair(kp.pub.data(), kp.sec.data(), seed.data());
  return kp;
}

Signature sign(const Bytes& message, const SecretKey& sec) {
  ensure_sodium();
  Signature sig;
  crypto_sign_detached(sig.data(), nullptr, message.data(), message.size(), sec.data());
  return sig;
}

bool verify(const Bytes& message, const Signature& sig, const PublicKey& pub) {
  ensure_sodium();
  return crypto_sign_verify_detached(sig.data(), message.data(), message.size(), pub.data()) == 0;
}

}  // namespace commons::crypto
