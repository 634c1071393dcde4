#pragma once

#include <cassert>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

namespace commons {

/// Rejection codes shared across modules. A rejected governance action is a
/// normal outcome, not an exception; exceptions are reserved for broken
/// input encodings and I/O.
enum class Errc {
  BadSignature,
  UnknownAuthor,
  InvalidPayload,
  CorruptLog,
  BadTick,
  Unauthorized,
  AccessDenied,
  ScopeDenied,
  UnknownClass,
  UnknownAddress,
  UnknownPool,
  UnknownCurve,
  UnknownRule,
  UnknownPolicy,
  UnknownProposal,
  UnknownTender,
  UnknownMarket,
  UnknownDispute,
  UnknownRegistry,
  UnknownCommitment,
  UnknownReviewRound,
  UnknownNode,
  Insufficient,
  NonTransferable,
  ZeroSpend,
  NoApproval,
  InsufficientReserve,
  NoBids,
  NotYetDeadline,
  AlreadyClosed,
  MarketClosed,
  MachineVoter,
  OutsideWindow,
  NotPassed,
  AlreadyExecuted,
  InsufficientStake,
  DuplicateEntry,
  DoubleVote,
  TooFewJurors,
  AlreadyFinal,
  IncompleteScores,
  SelfReview,
  OutOfOrder,
  NotAncestor,
  NoMandate,
  AtRoot,
  NoCompetentNode,
  DuplicateId,
  InvalidScenario,
  MechanismDisabled,
};

std::string_view errc_name(Errc c);

struct Error {
  Errc code;
  std::string detail;

  std::string to_string() const;
};

/// Minimal value-or-error result. `ok()` before access; moves out on value().
template <class T>
class Result {
 public:
  Result(T value) : value_(std::move(value)) {}  // NOLINT(google-explicit-constructor)
  Result(Error err) : error_(std::move(err)) {}  // NOLINT(google-explicit-constructor)
  Result(Errc code, std::string detail = {}) : error_(Error{code, std::move(detail)}) {}

  bool ok() const { return value_.has_value(); }
  explicit operator bool() const { return ok(); }

  const T& value() const& {
    assert(ok());
    return *value_;
  }
  T&& value() && {
    assert(ok());
    return std::move(*value_);
  }

  const Error& error() const {
    assert(!ok());
    return *error_;
  }

 private:
  std::optional<T> value_;
  std::optional<Error> error_;
};

struct Unit {};
using Status = Result<Unit>;

inline Status ok_status() { return Status(Unit{}); }

}  // namespace commons
