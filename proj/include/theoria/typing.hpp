#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "theoria/formula.hpp"
#include "theoria/type.hpp"

namespace theoria {

// Types of free identifiers, in-scope type parameters and declared carrier
// sets. A type parameter T or carrier set S used as an expression denotes the
// set of all its values, of type ℙ(T) / ℙ(S).
struct TypeEnvironment {
  std::map<std::string, Type> vars;
  std::set<std::string> type_params;
  std::set<std::string> given_sets;

  bool declares(const std::string& name) const {
    return vars.count(name) || type_params.count(name) || given_sets.count(name);
  }
};

struct TypecheckOptions {
  // Leftover inference variables become fresh type parameters instead of
  // raising UnresolvedTypeParam. Used for theory rules, which are polymorphic.
  bool generalize = false;
};

// Annotates every expression node with its type. Undeclared free identifiers
// are inferred. Throws TypeError, UnresolvedTypeParam.
Formula typecheck(const Formula& f, const TypeEnvironment& env);

// Typechecks several formulas sharing one set of free identifiers. Inferred
// types of undeclared identifiers (and generalized parameters) are added to `env`.
std::vector<Formula> typecheck_together(const std::vector<Formula>& formulas,
                                        TypeEnvironment& env,
                                        const TypecheckOptions& options = {});

// Type of a typechecked expression; throws TypeError when missing.
const Type& type_of(const Formula& expr);

// Simultaneous substitution of type parameters by types and free identifiers
// by expressions. Also the result of pattern matching.
struct Specialisation {
  std::map<std::string, Type> types;
  std::map<std::string, Formula> vars;
  // Factory used to turn types back into set expressions (e.g. T := List(ℤ)
  // where T is used as a set). Optional.
  FactoryPtr factory;

  bool empty() const { return types.empty() && vars.empty(); }
  friend bool operator==(const Specialisation& a, const Specialisation& b) {
    return a.types == b.types && a.vars == b.vars;
  }
};

Type apply_type(const Type& t, const Specialisation& s);

// Environment after specialisation: substituted identifiers are replaced by the
// free identifiers of their images, remaining types are specialised.
TypeEnvironment apply_env(const TypeEnvironment& env, const Specialisation& s);

// Throws InconsistentSpecialisation(name) when the domains overlap, a type
// parameter names a carrier set of `env`, or an image's type differs from the
// specialised declared type.
void check_consistent(const Specialisation& s, const TypeEnvironment& env);

// Capture-avoiding simultaneous substitution. Bound identifiers that would
// capture a free identifier of an image are renamed by appending primes.
Formula specialise(const Formula& f, const Specialisation& s, const TypeEnvironment& env);

// s2 applied after s1, as one specialisation.
Specialisation compose(const Specialisation& s1, const Specialisation& s2,
                       const TypeEnvironment& env);

// The set expression denoting all values of `t`: ℤ, BOOL, ℙ(..), ..×.., List(..), S.
Formula type_to_expression(const Type& t, const FactoryPtr& factory);
// Inverse of type_to_expression on typechecked type expressions.
std::optional<Type> expression_to_type(const Formula& expr);

std::string fresh_name(const std::string& base, const std::set<std::string>& avoid);

}  // namespace theoria
