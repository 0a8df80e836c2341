#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "theoria/factory.hpp"
#include "theoria/formula.hpp"
#include "theoria/typing.hpp"

namespace theoria {

struct NamedFormula {
  std::string name;
  Formula formula;
};

struct DirectDefinition {
  Formula body;
};

struct InductiveCase {
  std::string constructor;
  std::vector<std::string> binders;  // one per destructor of the constructor
  Formula body;
};

// Case analysis over one datatype-typed argument, the scrutinee.
struct InductiveDefinition {
  std::string scrutinee;
  std::vector<InductiveCase> cases;
};

struct AxiomaticDefinition {
  std::vector<std::string> defining_axioms;
};

struct OperatorDef {
  OperatorSig signature;
  std::variant<DirectDefinition, InductiveDefinition, AxiomaticDefinition> definition;
  std::optional<Formula> wd_condition;  // over the declared argument names

  bool is_axiomatic() const { return std::holds_alternative<AxiomaticDefinition>(definition); }
};

struct RewriteCase {
  Formula condition;  // ⊤ for unconditional rules
  Formula rhs;
};

struct RewriteRule {
  std::string name;
  Formula lhs;
  std::vector<RewriteCase> cases;
  bool complete = true;
  bool automatic = false;

  bool unconditional() const {
    return cases.size() == 1 && cases.front().condition.tag() == Tag::True;
  }
};

enum class Applicability { Forward, Backward, Both };
std::string_view to_string(Applicability a);

struct InferenceRule {
  std::string name;
  std::vector<Formula> givens;
  Formula infer;
  Applicability applicability = Applicability::Both;
  bool automatic = false;

  bool allows_forward() const { return applicability != Applicability::Backward; }
  bool allows_backward() const { return applicability != Applicability::Forward; }
};

// A parsed theory. `factory` is the one its formulas were read with: the union
// of the imported factories and this theory's own extensions.
struct Theory {
  std::string name;
  std::vector<std::string> imports;
  std::vector<std::string> type_params;
  std::vector<DatatypeSig> datatypes;
  std::vector<AxiomaticTypeSig> axiomatic_types;
  std::vector<OperatorDef> operators;
  std::vector<RewriteRule> rewrite_rules;
  std::vector<InferenceRule> inference_rules;
  std::vector<NamedFormula> axioms;
  FactoryPtr factory;

  const OperatorDef* find_operator(const std::string& name) const;
  const RewriteRule* find_rewrite(const std::string& name) const;
  const InferenceRule* find_inference(const std::string& name) const;
  std::vector<ExtensionSignature> own_signatures() const;
};

using TheoryPtr = std::shared_ptr<const Theory>;

struct Diagnostic {
  std::string code;     // IncompleteInduction, UnboundRhsVariable, TypeError, ...
  std::string subject;  // the rule, operator or axiom concerned
  std::string detail;

  friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

// Empty iff the theory is well-formed and every formula in it typechecks.
std::vector<Diagnostic> validate_theory(const Theory& t);

// A copy with every formula typechecked: definitions against their arguments,
// rule formulas jointly per rule with leftover types generalized to fresh type
// parameters. Throws InvalidTheory carrying the first diagnostic.
Theory elaborate_theory(const Theory& t);

// Union of the imports plus the theory's own signatures.
// Throws IncompatibleFactories, DuplicateExtension.
FactoryPtr compile_factory(const Theory& t, const std::vector<FactoryPtr>& imports);

// Non-emptiness and maximality for each axiomatic type, in declaration order,
// followed by the user axioms. All formulas are typechecked.
std::vector<NamedFormula> generated_axioms(const Theory& t);

// Unfolds one application of a directly or inductively defined operator of `t`.
// Throws NotExpandable.
Formula expand_definition_formula(const Formula& app, const Theory& t);

// The environment a theory's own formulas are typed in: its type parameters.
TypeEnvironment theory_environment(const Theory& t);

}  // namespace theoria
