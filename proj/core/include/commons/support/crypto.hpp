#pragma once

#include <array>

#include "commons/support/bytes.hpp"

namespace commons::crypto {

using PublicKey = std::array<Byte, 32>;
using SecretKey = std::array<Byte, 64>;
using Signature = std::array<Byte, 64>;
using Seed = std::array<Byte, 32>;

Digest32 sha256(const Bytes& data);
Digest32 sha256(std::string_view data);

struct KeyPair {
  PublicKey pub{};
  SecretKey sec{};
};

/// Ed25519 keypair derived deterministically from a 32-byte seed.
KeyPair keypair_from_seed(const Seed& seed);

Signature sign(const Bytes& message, const SecretKey& sec);
bool verify(const Bytes& message, const Signature& sig, const PublicKey& pub);

}  // namespace commons::crypto
