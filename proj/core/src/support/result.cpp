#include "commons/support/result.hpp"

namespace commons {

std::string_view errc_name(Errc c) {
  switch (c) {
    case Errc::BadSignature: return "BadSignature";
    case Errc::UnknownAuthor: return "UnknownAuthor";
    case Errc::InvalidPayload: return "InvalidPayload";
    case Errc::CorruptLog: return "CorruptLog";
    case Errc::BadTick: return "BadTick";
    case Errc::Unauthorized: return "Unauthorized";
    case Errc::AccessDenied: return "AccessDenied";
    case Errc::ScopeDenied: return "ScopeDenied";
    case Errc::UnknownClass: return "UnknownClass";
    case Errc::UnknownAddress: return "UnknownAddress";
    case Errc::UnknownPool: return "UnknownPool";
    case Errc::UnknownCurve: return "UnknownCurve";
    case Errc::UnknownRule: return "UnknownRule";
    case Errc::UnknownPolicy: return "UnknownPolicy";
    case Errc::UnknownProposal: return "UnknownProposal";
    case Errc::UnknownTender: return "UnknownTender";
    case Errc::UnknownMarket: return "UnknownMarket";
    case Errc::UnknownDispute: return "UnknownDispute";
    case Errc::UnknownRegistry: return "UnknownRegistry";
    case Errc::UnknownCommitment: return "UnknownCommitment";
    case Errc::UnknownReviewRound: return "UnknownReviewRound";
    case Errc::UnknownNode: return "UnknownNode";
    case Errc::Insufficient: return "Insufficient";
    case Errc::NonTransferable: return "NonTransferable";
    case Errc::ZeroSpend: return "ZeroSpend";
    case Errc::NoApproval: return "NoApproval";
    case Errc::InsufficientReserve: return "InsufficientReserve";
    case Errc::NoBids: return "NoBids";
    case Errc::NotYetDeadline: return "NotYetDeadline";
    case Errc::AlreadyClosed: return "AlreadyClosed";
    case Errc::MarketClosed: return "MarketClosed";
    case Errc::MachineVoter: return "MachineVoter";
    case Errc::OutsideWindow: return "OutsideWindow";
    case Errc::NotPassed: return "NotPassed";
    case Errc::AlreadyExecuted: return "AlreadyExecuted";
    case Errc::InsufficientStake: return "InsufficientStake";
    case Errc::DuplicateEntry: return "DuplicateEntry";
    case Errc::DoubleVote: return "DoubleVote";
    case Errc::TooFewJurors: return "TooFewJurors";
    case Errc::AlreadyFinal: return "AlreadyFinal";
    case Errc::IncompleteScores: return "IncompleteScores";
    case Errc::SelfReview: return "SelfReview";
    case Errc::OutOfOrder: return "OutOfOrder";
    case Errc::NotAncestor: return "NotAncestor";
    case Errc::NoMandate: return "NoMandate";
    case Errc::AtRoot: return "AtRoot";
    case Errc::NoCompetentNode: return "NoCompetentNode";
    case Errc::DuplicateId: return "DuplicateId";
    case Errc::InvalidScenario: return "InvalidScenario";
    case Errc::MechanismDisabled: return "MechanismDisabled";
  }
  return "Unknown";
}

std::string Error::to_string() const {
  std::string s{errc_name(code)};
  if (!detail.empty()) {
    s += ": ";
    s += detail;
  }
  return s;
}

}  // namespace commons
