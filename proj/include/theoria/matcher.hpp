#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "theoria/formula.hpp"
#include "theoria/typing.hpp"

namespace theoria {

// A typechecked formula whose free identifiers and type parameters are the
// unknowns of a match. `env` records them: vars with their declared types,
// type_params for the type unknowns.
struct Pattern {
  Formula formula;
  TypeEnvironment env;
};

// Unknowns: every free identifier of `f` that does not name one of
// `type_params`, plus the type parameters themselves.
Pattern make_pattern(const Formula& f, const std::set<std::string>& type_params);

// Pattern whose unknowns are given explicitly (several formulas of one rule
// share them). Types of `vars` are read off the formula.
Pattern make_pattern(const Formula& f, const TypeEnvironment& env);

// Type unknowns in `unknowns` bind to arbitrary types; existing bindings must agree.
bool match_type(const Type& pattern, const Type& subject, const std::set<std::string>& unknowns,
                std::map<std::string, Type>& bindings);

// First match, or nullopt. On success specialise(p.formula, s, p.env) equals
// `subject`. `seed` pre-binds unknowns (used to extend an earlier match).
std::optional<Specialisation> match(const Pattern& p, const Formula& subject,
                                    const Specialisation& seed = {});

// Greedy associative matching of operand lists of one flattened operator:
// leftmost minimal take with backtracking; a trailing unknown absorbs the rest.
// `subject_node` supplies the operator used to rebuild runs of operands.
std::optional<Specialisation> match_assoc(const Pattern& pattern_node, const Formula& subject_node,
                                          const Specialisation& seed = {});

}  // namespace theoria
