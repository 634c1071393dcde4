#pragma once

#include <filesystem>
#include <vector>

#include "commons/commands.hpp"
#include "commons/support/crypto.hpp"
#include "commons/support/result.hpp"
#include "commons/types.hpp"

namespace commons {

struct SignedEvent {
  Seq seq = 0;  // position in the log
  AddressId author{};
  Tick tick = 0;
  Command payload;
  crypto::Signature sig{};
};

/// Signature preimage. Binding the genesis digest in keeps events from one
/// world from being spliced into another.
Bytes event_preimage(const Digest32& genesis, Seq seq, const AddressId& author, Tick tick,
                     const Command& payload);

Bytes encode_event(const SignedEvent& ev);
Result<SignedEvent> decode_event(const Bytes& raw);

/// Append-only event log. On disk: first line the genesis digest in hex,
/// then one canonical event per line, hex-encoded. Round-trips bit-exactly.
struct EventLog {
  Digest32 genesis{};
  std::vector<SignedEvent> events;

  Status save(const std::filesystem::path& path) const;
  static Result<EventLog> load(const std::filesystem::path& path);
};

}  // namespace commons
