#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace theoria {

// Every failure raised by the kernel. `kind` is stable and is what the CLI and
// the HTTP service report; `subject` names the offending item when there is one
// (an extension name, a rule name, a node id).
enum class ErrorKind {
  IncompatibleFactories,
  ArityMismatch,
  KindMismatch,
  UnknownExtension,
  DuplicateExtension,
  InvalidSignature,
  SyntaxError,
  UnknownOperator,
  UnknownType,
  DuplicateName,
  InvalidNotation,
  TypeError,
  UnresolvedTypeParam,
  InconsistentSpecialisation,
  NotExpandable,
  RuleNotApplicable,
  InvalidPosition,
  DirectionNotAllowed,
  UnknownRule,
  UnknownNode,
  NodeNotPending,
  BudgetExceeded,
  CorruptProof,
  InvalidTheory,
  IoError,
  UnknownObligation,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string subject, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message),
        kind_(kind),
        subject_(std::move(subject)),
        message_(message) {}

  Error(ErrorKind kind, const std::string& message) : Error(kind, "", message) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& subject() const noexcept { return subject_; }
  const std::string& message() const noexcept { return message_; }  // what() without the kind

 private:
  ErrorKind kind_;
  std::string subject_;
  std::string message_;
};

}  // namespace theoria
