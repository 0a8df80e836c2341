#include "theoria/theory.hpp"

#include <algorithm>

#include "theoria/error.hpp"
#include "theoria/matcher.hpp"
#include "theoria/parser.hpp"
#include "theoria/printer.hpp"

namespace theoria {

std::string_view to_string(Applicability a) {
  switch (a) {
    case Applicability::Forward: return "forward";
    case Applicability::Backward: return "backward";
    case Applicability::Both: return "both";
  }
  return "both";
}

const OperatorDef* Theory::find_operator(const std::string& n) const {
  for (const auto& op : operators)
    if (op.signature.name == n) return &op;
  return nullptr;
}

const RewriteRule* Theory::find_rewrite(const std::string& n) const {
  for (const auto& r : rewrite_rules)
    if (r.name == n) return &r;
  return nullptr;
}

const InferenceRule* Theory::find_inference(const std::string& n) const {
  for (const auto& r : inference_rules)
    if (r.name == n) return &r;
  return nullptr;
}

std::vector<ExtensionSignature> Theory::own_signatures() const {
  std::vector<ExtensionSignature> out;
  for (const auto& d : datatypes) out.emplace_back(d);
  for (const auto& a : axiomatic_types) out.emplace_back(a);
  for (const auto& op : operators) out.emplace_back(op.signature);
  return out;
}

TypeEnvironment theory_environment(const Theory& t) {
  TypeEnvironment env;
  env.type_params.insert(t.type_params.begin(), t.type_params.end());
  return env;
}

namespace {

std::string show(const Formula& f) { return print_formula(f, PrintMode::Unicode); }

bool mentions_operator(const Formula& f, const std::string& op) {
  if (f.tag() == Tag::ExtOp && f.name() == op) return true;
  return std::any_of(f.children().begin(), f.children().end(),
                     [&](const Formula& c) { return mentions_operator(c, op); });
}

std::set<std::string> free_vars(const Formula& f, const TypeEnvironment& env) {
  std::set<std::string> out;
  for (const auto& n : free_identifiers(f))
    if (!env.type_params.count(n) && !env.given_sets.count(n)) out.insert(n);
  return out;
}

class Elaborator {
 public:
  explicit Elaborator(const Theory& t) : t_(t), out_(t) {}

  std::vector<Diagnostic> run() {
    for (auto& op : out_.operators) operator_def(op);
    for (auto& a : out_.axioms) axiom(a);
    for (auto& r : out_.rewrite_rules) rewrite(r);
    for (auto& r : out_.inference_rules) inference(r);
    return std::move(diags_);
  }

  Theory& result() { return out_; }

 private:
  void report(std::string code, std::string subject, std::string detail) {
    diags_.push_back({std::move(code), std::move(subject), std::move(detail)});
  }

  // Typechecks jointly; reports and returns false on failure.
  bool check(std::vector<Formula*> formulas, TypeEnvironment& env, bool generalize,
             const std::string& subject) {
    std::vector<Formula> in;
    for (auto* f : formulas) in.push_back(*f);
    try {
      auto typed = typecheck_together(in, env, {generalize});
      for (std::size_t i = 0; i < formulas.size(); ++i) *formulas[i] = typed[i];
      return true;
    } catch (const Error& e) {
      report(std::string(to_string(e.kind())), subject, e.message());
      return false;
    }
  }

  TypeEnvironment arg_env(const OperatorSig& sig) const {
    TypeEnvironment env = theory_environment(t_);
    for (const auto& a : sig.args) env.vars.emplace(a.name, a.type);
    return env;
  }

  void body_checks(const OperatorSig& sig, Formula& body, TypeEnvironment env,
                   const std::string& where) {
    for (const auto& v : free_vars(body, env))
      if (!env.vars.count(v))
        report("UnboundDefinitionVariable", sig.name,
               where + " mentions '" + v + "', which is not an argument");
    if (!check({&body}, env, false, sig.name)) return;
    if (sig.is_predicate() != body.is_predicate()) {
      report("ResultKindMismatch", sig.name,
             where + " must be a " + (sig.is_predicate() ? "predicate" : "expression"));
    } else if (sig.result && *body.type() != *sig.result) {
      report("ResultTypeMismatch", sig.name,
             where + " has type " + body.type()->to_string() + ", expected " +
                 sig.result->to_string());
    }
  }

  void operator_def(OperatorDef& op) {
    const OperatorSig& sig = op.signature;
    if (op.wd_condition) {
      TypeEnvironment env = arg_env(sig);
      for (const auto& v : free_vars(*op.wd_condition, env))
        if (!env.vars.count(v))
          report("UnboundDefinitionVariable", sig.name,
                 "wd condition mentions '" + v + "', which is not an argument");
      if (check({&*op.wd_condition}, env, false, sig.name) && !op.wd_condition->is_predicate())
        report("ResultKindMismatch", sig.name, "wd condition must be a predicate");
    }
    if (auto* d = std::get_if<DirectDefinition>(&op.definition)) {
      if (mentions_operator(d->body, sig.name))
        report("RecursiveDirectDefinition", sig.name, "direct definition refers to itself");
      body_checks(sig, d->body, arg_env(sig), "definition");
    } else if (auto* ind = std::get_if<InductiveDefinition>(&op.definition)) {
      inductive(sig, *ind);
    }
  }

  void inductive(const OperatorSig& sig, InductiveDefinition& ind) {
    auto arg = std::find_if(sig.args.begin(), sig.args.end(),
                            [&](const TypedName& a) { return a.name == ind.scrutinee; });
    if (arg == sig.args.end()) {
      report("InvalidScrutinee", sig.name, "'" + ind.scrutinee + "' is not an argument");
      return;
    }
    const DatatypeSig* dt = arg->type.kind() == Type::Kind::Datatype
                                ? t_.factory->find_datatype(arg->type.name())
                                : nullptr;
    if (!dt) {
      report("InvalidScrutinee", sig.name,
             "'" + ind.scrutinee + "' must have a datatype type, not " + arg->type.to_string());
      return;
    }
    std::map<std::string, Type> inst;
    for (std::size_t i = 0; i < dt->type_params.size(); ++i)
      inst.emplace(dt->type_params[i], arg->type.args()[i]);

    std::set<std::string> covered;
    for (auto& c : ind.cases) {
      auto ctor = std::find_if(dt->constructors.begin(), dt->constructors.end(),
                               [&](const ConstructorSig& k) { return k.name == c.constructor; });
      if (ctor == dt->constructors.end()) {
        report("InvalidCase", sig.name,
               "'" + c.constructor + "' is not a constructor of " + dt->name);
        continue;
      }
      if (!covered.insert(c.constructor).second) {
        report("DuplicateCase", sig.name, c.constructor);
        continue;
      }
      if (c.binders.size() != ctor->destructors.size()) {
        report("CaseArity", sig.name,
               "case '" + c.constructor + "' needs " + std::to_string(ctor->destructors.size()) +
                   " binder(s)");
        continue;
      }
      TypeEnvironment env = theory_environment(t_);
      for (const auto& a : sig.args)
        if (a.name != ind.scrutinee) env.vars.emplace(a.name, a.type);
      bool clash = false;
      for (std::size_t i = 0; i < c.binders.size(); ++i) {
        if (!env.vars.emplace(c.binders[i], ctor->destructors[i].type.substitute_params(inst)).second ||
            env.type_params.count(c.binders[i])) {
          report("DuplicateName", sig.name, "binder '" + c.binders[i] + "' is already in scope");
          clash = true;
        }
      }
      if (!clash) body_checks(sig, c.body, env, "case '" + c.constructor + "'");
    }
    for (const auto& k : dt->constructors)
      if (!covered.count(k.name)) report("IncompleteInduction", sig.name, k.name);
  }

  void axiom(NamedFormula& a) {
    TypeEnvironment env = theory_environment(t_);
    if (check({&a.formula}, env, true, a.name) && !a.formula.is_predicate())
      report("KindMismatch", a.name, "an axiom must be a predicate");
  }

  void rewrite(RewriteRule& r) {
    if (r.lhs.tag() == Tag::Ident) report("LhsIsVariable", r.name, "left-hand side is a variable");
    if (r.cases.size() == 1 && r.cases[0].condition.tag() == Tag::True && !r.complete)
      report("IncompleteUnconditional", r.name, "an unconditional rule is always complete");
    std::vector<Formula*> all{&r.lhs};
    for (auto& c : r.cases) {
      all.push_back(&c.condition);
      all.push_back(&c.rhs);
    }
    TypeEnvironment env = theory_environment(t_);
    if (!check(all, env, true, r.name)) return;
    const auto lhs_vars = free_vars(r.lhs, env);
    for (const auto& c : r.cases) {
      if (!c.condition.is_predicate())
        report("KindMismatch", r.name, "condition '" + show(c.condition) + "' is not a predicate");
      for (const auto& v : free_vars(c.condition, env))
        if (!lhs_vars.count(v)) report("UnboundConditionVariable", r.name, v);
      for (const auto& v : free_vars(c.rhs, env))
        if (!lhs_vars.count(v)) report("UnboundRhsVariable", r.name, v);
      if (c.rhs.is_predicate() != r.lhs.is_predicate()) {
        report("RhsKindMismatch", r.name, "'" + show(c.rhs) + "' and the lhs differ in kind");
      } else if (r.lhs.type() && *c.rhs.type() != *r.lhs.type()) {
        report("RhsTypeMismatch", r.name,
               "'" + show(c.rhs) + "' has type " + c.rhs.type()->to_string() + ", lhs has " +
                   r.lhs.type()->to_string());
      }
    }
  }

  void inference(InferenceRule& r) {
    std::vector<Formula*> all;
    for (auto& g : r.givens) all.push_back(&g);
    all.push_back(&r.infer);
    TypeEnvironment env = theory_environment(t_);
    if (!check(all, env, true, r.name)) return;
    for (const auto* f : all)
      if (!f->is_predicate()) report("KindMismatch", r.name, "'" + show(*f) + "' is not a predicate");
  }

  const Theory& t_;
  Theory out_;
  std::vector<Diagnostic> diags_;
};

}  // namespace

std::vector<Diagnostic> validate_theory(const Theory& t) {
  std::vector<Diagnostic> out;
  std::set<std::string> names;
  auto claim = [&](const std::string& n) {
    if (!names.insert(n).second) out.push_back({"DuplicateName", n, "declared more than once"});
  };
  for (const auto& p : t.type_params) claim(p);
  for (const auto& d : t.datatypes) {
    claim(d.name);
    for (const auto& c : d.constructors) {
      claim(c.name);
      for (const auto& x : c.destructors) claim(x.name);
    }
  }
  for (const auto& a : t.axiomatic_types) claim(a.name);
  for (const auto& o : t.operators) claim(o.signature.name);
  for (const auto& a : t.axioms) claim(a.name);
  for (const auto& r : t.rewrite_rules) claim(r.name);
  for (const auto& r : t.inference_rules) claim(r.name);
  auto more = Elaborator(t).run();
  out.insert(out.end(), more.begin(), more.end());
  return out;
}

Theory elaborate_theory(const Theory& t) {
  Elaborator e(t);
  auto diags = e.run();
  if (!diags.empty())
    throw Error(ErrorKind::InvalidTheory, t.name,
                "theory " + t.name + ": " + diags[0].code + " in '" + diags[0].subject +
                    "': " + diags[0].detail);
  return std::move(e.result());
}

FactoryPtr compile_factory(const Theory& t, const std::vector<FactoryPtr>& imports) {
  FactoryPtr out = FormulaFactory::core();
  for (const auto& f : imports) out = factory_union(out, f);
  auto own = t.own_signatures();
  if (own.empty()) return out;
  return factory_union(out, FormulaFactory::make(std::move(own)));
}

std::vector<NamedFormula> generated_axioms(const Theory& t) {
  std::vector<NamedFormula> out;
  const TypeEnvironment env = theory_environment(t);
  for (const auto& a : t.axiomatic_types) {
    out.push_back({a.name + ".non_emptiness",
                   typecheck(parse_formula(a.name + " ≠ ∅", t.factory), env)});
    out.push_back({a.name + ".maximality",
                   typecheck(parse_formula("∀x· x ∈ " + a.name, t.factory), env)});
  }
  for (const auto& a : t.axioms) {
    TypeEnvironment scratch = env;
    out.push_back({a.name, typecheck_together({a.formula}, scratch, {true}).front()});
  }
  return out;
}

Formula expand_definition_formula(const Formula& app, const Theory& t) {
  auto not_expandable = [&](const std::string& why) {
    return Error(ErrorKind::NotExpandable, app.tag() == Tag::ExtOp ? app.name() : show(app),
                 "'" + show(app) + "' " + why);
  };
  if (app.tag() != Tag::ExtOp) throw not_expandable("is not an operator application");
  const OperatorDef* op = t.find_operator(app.name());
  if (!op) throw not_expandable("is not defined in theory " + t.name);
  const OperatorSig& sig = op->signature;
  if (op->is_axiomatic()) throw not_expandable("is defined axiomatically");
  if (sig.associative && app.arity() != 2) {
    // a flattened chain: unfold the leftmost pair
    Formula head = assoc_run(app, 0, 2);
    std::vector<Formula> rest{expand_definition_formula(head, t)};
    for (std::size_t i = 2; i < app.arity(); ++i) rest.push_back(app.child(i));
    return mk_node(Tag::ExtOp, std::move(rest), app.payload(), app.factory());
  }

  TypeEnvironment env = theory_environment(t);
  Specialisation s;
  s.factory = factory_union(t.factory, app.factory());
  std::set<std::string> sig_params;
  for (const auto& a : sig.args) a.type.collect_params(sig_params);
  if (sig.result) sig.result->collect_params(sig_params);
  for (std::size_t i = 0; i < sig.args.size(); ++i) {
    if (!app.child(i).type() ||
        !match_type(sig.args[i].type, *app.child(i).type(), sig_params, s.types))
      throw not_expandable("is not typechecked against the signature of " + sig.name);
  }

  Formula body;
  if (const auto* d = std::get_if<DirectDefinition>(&op->definition)) {
    body = d->body;
    for (std::size_t i = 0; i < sig.args.size(); ++i) {
      env.vars.emplace(sig.args[i].name, sig.args[i].type);
      s.vars.emplace(sig.args[i].name, app.child(i));
    }
  } else {
    const auto& ind = std::get<InductiveDefinition>(op->definition);
    std::size_t k = 0;
    while (k < sig.args.size() && sig.args[k].name != ind.scrutinee) ++k;
    if (k == sig.args.size()) throw not_expandable("has an invalid inductive definition");
    const Formula& scrutinee = app.child(k);
    if (scrutinee.tag() != Tag::Constructor)
      throw not_expandable("has argument '" + show(scrutinee) + "' that is not a constructor term");
    auto c = std::find_if(ind.cases.begin(), ind.cases.end(),
                          [&](const InductiveCase& x) { return x.constructor == scrutinee.name(); });
    if (c == ind.cases.end()) throw not_expandable("has no case for " + scrutinee.name());
    auto ref = t.factory->find_constructor(c->constructor);
    const DatatypeSig* dt = ref->datatype;
    std::map<std::string, Type> inst;
    for (std::size_t i = 0; i < dt->type_params.size(); ++i)
      inst.emplace(dt->type_params[i], sig.args[k].type.args()[i]);
    body = c->body;
    for (std::size_t i = 0; i < sig.args.size(); ++i) {
      if (i == k) continue;
      env.vars.emplace(sig.args[i].name, sig.args[i].type);
      s.vars.emplace(sig.args[i].name, app.child(i));
    }
    const auto& ctor = dt->constructors[ref->constructor];
    for (std::size_t i = 0; i < c->binders.size(); ++i) {
      env.vars.emplace(c->binders[i], ctor.destructors[i].type.substitute_params(inst));
      s.vars.emplace(c->binders[i], scrutinee.child(i));
    }
  }
  // The stored body may be untyped; type it against the declared arguments.
  TypeEnvironment scratch = env;
  body = typecheck_together({body}, scratch).front();
  // Signature parameters not fixed by the arguments stay as they are.
  for (const auto& p : sig_params) s.types.emplace(p, Type::param(p));
  Formula out = specialise(body, s, env);
  return out;
}

}  // namespace theoria
