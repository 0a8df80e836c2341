#include "theoria/error.hpp"

namespace theoria {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::IncompatibleFactories: return "IncompatibleFactories";
    case ErrorKind::ArityMismatch: return "ArityMismatch";
    case ErrorKind::KindMismatch: return "KindMismatch";
    case ErrorKind::UnknownExtension: return "UnknownExtension";
    case ErrorKind::DuplicateExtension: return "DuplicateExtension";
    case ErrorKind::InvalidSignature: return "InvalidSignature";
    case ErrorKind::SyntaxError: return "SyntaxError";
    case ErrorKind::UnknownOperator: return "UnknownOperator";
    case ErrorKind::UnknownType: return "UnknownType";
    case ErrorKind::DuplicateName: return "DuplicateName";
    case ErrorKind::InvalidNotation: return "InvalidNotation";
    case ErrorKind::TypeError: return "TypeError";
    case ErrorKind::UnresolvedTypeParam: return "UnresolvedTypeParam";
    case ErrorKind::InconsistentSpecialisation: return "InconsistentSpecialisation";
    case ErrorKind::NotExpandable: return "NotExpandable";
    case ErrorKind::RuleNotApplicable: return "RuleNotApplicable";
    case ErrorKind::InvalidPosition: return "InvalidPosition";
    case ErrorKind::DirectionNotAllowed: return "DirectionNotAllowed";
    case ErrorKind::UnknownRule: return "UnknownRule";
    case ErrorKind::UnknownNode: return "UnknownNode";
    case ErrorKind::NodeNotPending: return "NodeNotPending";
    case ErrorKind::BudgetExceeded: return "BudgetExceeded";
    case ErrorKind::CorruptProof: return "CorruptProof";
    case ErrorKind::InvalidTheory: return "InvalidTheory";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::UnknownObligation: return "UnknownObligation";
  }
  return "Error";
}

}  // namespace theoria
