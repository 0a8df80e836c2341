#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "theoria/type.hpp"

namespace theoria {

enum class Notation { Prefix, Infix };
enum class FormulaKind { Expression, Predicate };

struct TypedName {
  std::string name;
  Type type;
  friend bool operator==(const TypedName&, const TypedName&) = default;
};

struct ConstructorSig {
  std::string name;
  std::vector<TypedName> destructors;
  friend bool operator==(const ConstructorSig&, const ConstructorSig&) = default;
};

struct DatatypeSig {
  std::string name;
  std::vector<std::string> type_params;
  std::vector<ConstructorSig> constructors;

  Type instance_type() const;  // Name(T1, ..., Tn) over its own parameters
};

struct AxiomaticTypeSig {
  std::string name;
};

struct OperatorSig {
  std::string name;
  Notation notation = Notation::Prefix;
  FormulaKind formula_kind = FormulaKind::Expression;
  std::vector<TypedName> args;
  std::optional<Type> result;  // absent for predicate operators
  bool associative = false;
  bool commutative = false;
  std::optional<std::string> symbol;

  bool is_predicate() const { return formula_kind == FormulaKind::Predicate; }
};

using ExtensionSignature = std::variant<DatatypeSig, AxiomaticTypeSig, OperatorSig>;

const std::string& signature_name(const ExtensionSignature& sig);

// Structural signature equality. Constructors, destructors and arguments are
// compared in order. Operator definitions never take part; notation, result,
// properties and symbol do, since each of them changes parsing or matching.
bool signature_equal(const ExtensionSignature& a, const ExtensionSignature& b);

// Throws InvalidSignature when an operator signature breaks the notation rules:
// INFIX needs two or more arguments, associativity needs a binary infix
// operator closed over one type.
void check_signature(const ExtensionSignature& sig);

// Canonical text used for content-addressed factory ids and diagnostics.
std::string canonical_text(const ExtensionSignature& sig);

}  // namespace theoria
