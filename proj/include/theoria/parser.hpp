#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "theoria/error.hpp"
#include "theoria/formula.hpp"
#include "theoria/theory.hpp"

namespace theoria {

// Offsets are in code points from the start of the file.
struct SourceSpan {
  std::string file;
  std::size_t start = 0;
  std::size_t end = 0;
};

class ParseError : public Error {
 public:
  ParseError(ErrorKind kind, SourceSpan span, std::string subject, const std::string& message)
      : Error(kind, std::move(subject),
              (span.file.empty() ? "" : span.file + ":") + std::to_string(span.start) + ": " +
                  message),
        span_(std::move(span)) {}

  const SourceSpan& span() const noexcept { return span_; }

 private:
  SourceSpan span_;
};

// Names that may appear as types besides extension types: type parameters
// (theories, rules) and carrier sets (sequents).
struct TypeScope {
  std::set<std::string> type_params;
  std::set<std::string> given_sets;
};

// Parses a predicate or expression. Extension names resolve against `factory`;
// infix extension operators may be written by name or by declared symbol, and
// the prefix form `op(a, b)` is always accepted.
// Throws ParseError (SyntaxError, UnknownOperator, UnknownType).
Formula parse_formula(std::string_view text, const FactoryPtr& factory,
                      const TypeScope& scope = {});

Type parse_type(std::string_view text, const FactoryPtr& factory, const TypeScope& scope = {});

// Theory files (.thy). Declarations are read in order; a name is visible only
// after its declaration, except that a datatype sees itself and an operator
// its own signature. Throws ParseError, DuplicateName, InvalidNotation.
Theory parse_theory(std::string_view text, const std::vector<FactoryPtr>& imports,
                    const std::string& file = "");

// Name and import list of a theory file, read from its header lines only.
struct TheoryHeader {
  std::string name;
  std::vector<std::string> imports;
};
TheoryHeader read_theory_header(std::string_view text, const std::string& file = "");

std::string print_theory(const Theory& t);

// Sequent files (.seq).
struct SequentEntry {
  std::string name;
  std::vector<std::string> given_sets;
  std::vector<NamedFormula> hypotheses;
  Formula goal;
};

struct SequentFile {
  std::vector<std::string> theories;
  std::vector<SequentEntry> entries;
};

std::vector<std::string> read_sequent_theories(std::string_view text, const std::string& file = "");
SequentFile parse_sequent_file(std::string_view text, const FactoryPtr& factory,
                               const std::string& file = "");
std::string print_sequent_file(const SequentFile& file);

}  // namespace theoria
