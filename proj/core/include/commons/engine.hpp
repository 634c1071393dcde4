#pragma once

#include "commons/keystore.hpp"
#include "commons/ledger.hpp"
#include "commons/support/result.hpp"
#include "commons/world.hpp"

namespace commons {

/// Dispatch one authored command into the state. This is the whole state
/// transition function: guards, module logic, and follow-on effects
/// (expiring commitments, automatic sanctions, incentive mints). Mutates
/// `w` only on success paths inside module calls; the engine wraps it in
/// copy-then-commit so callers never observe partial application.
Status apply_command(WorldState& w, const AddressId& author, const Command& cmd);

/// Structural validation shared by live submission and replay: signature,
/// sequence, tick discipline. Applies on success.
Status fold_event(WorldState& w, const Digest32& genesis, const SignedEvent& ev);

class Engine {
 public:
  explicit Engine(WorldState genesis);

  const WorldState& state() const { return state_; }
  const EventLog& log() const { return log_; }
  const Digest32& genesis_digest() const { return log_.genesis; }
  const WorldState& genesis_state() const { return genesis_state_; }

  /// Copy-then-commit: a rejected event leaves state and log untouched.
  Status submit(const SignedEvent& ev);

  /// Sign `cmd` as `author` at the current tick and submit.
  Result<SignedEvent> act(const Keystore& ks, const AddressId& author, Command cmd);

 private:
  WorldState genesis_state_;
  WorldState state_;
  EventLog log_;
};

/// Fold a whole log from its genesis state. The genesis state hash must
/// match the log's genesis digest. Errors carry the failing position.
Result<WorldState> replay(const EventLog& log, WorldState genesis);

}  // namespace commons
