// One pass/fail line per acceptance criterion; exit status 1 if any fails.

#include <functional>
#include <iostream>
#include <sstream>

#include "generators.hpp"
#include "support.hpp"

#include "theoria/service.hpp"

using namespace test;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

Type rel() { return Type::power(Type::product(Type::integer(), Type::integer())); }

std::map<std::string, std::string> shown(const Specialisation& s) {
  std::map<std::string, std::string> out;
  for (const auto& [v, e] : s.vars) out[v] = show(e);
  return out;
}

Pattern rule_pattern(const std::string& text) {
  TypeEnvironment env;
  auto f = typecheck_together({parse(text)}, env, TypecheckOptions{true});
  return make_pattern(f[0], env.type_params);
}

Outcome golden_matching() {
  TypeEnvironment env;
  env.vars = {{"g", rel()}, {"h", rel()}, {"y", Type::integer()}, {"c", Type::integer()}};
  Formula subject = typed("g;h;{y ↦ c}", env);
  auto m1 = match(rule_pattern("f;{x ↦ c}"), subject);
  auto m2 = match(rule_pattern("e;f"), subject);
  const std::map<std::string, std::string> want1{{"f", "g;h"}, {"x", "y"}, {"c", "c"}};
  const std::map<std::string, std::string> want2{{"e", "g"}, {"f", "h;{y ↦ c}"}};
  const bool ok1 = m1 && shown(*m1) == want1;
  const bool ok2 = m2 && shown(*m2) == want2;
  return {ok1 && ok2, std::string("row 1 ") + (ok1 ? "ok" : "wrong") + ", row 2 " + (ok2 ? "ok" : "wrong")};
}

Outcome type_matching() {
  TypeEnvironment penv;
  penv.type_params = {"S"};
  Pattern p = make_pattern(typed("S", penv), std::set<std::string>{"S"});
  TypeEnvironment senv;
  senv.given_sets = {"S", "T"};
  auto m1 = match(p, typed("ℙ(S)", senv));
  auto m2 = match(p, typed("S × T", senv));
  const bool ok = m1 && m2 && m1->types.at("S").to_string() == "ℙ(S)" && m2->types.at("S").to_string() == "S×T";
  return {ok, ok ? "S:=ℙ(S), S:=S×T" : "unexpected bindings"};
}

std::optional<std::map<std::string, std::vector<std::string>>> oracle(const std::vector<std::string>& pattern,
                                                                      const std::vector<std::string>& subject) {
  std::map<std::string, std::vector<std::string>> binding;
  std::function<bool(std::size_t, std::size_t)> go = [&](std::size_t pi, std::size_t si) -> bool {
    if (pi == pattern.size()) return si == subject.size();
    const std::string& p = pattern[pi];
    const bool unknown = std::isupper(static_cast<unsigned char>(p[0]));
    for (std::size_t k = 1; si + k <= subject.size(); ++k) {
      std::vector<std::string> run(subject.begin() + si, subject.begin() + si + k);
      if (!unknown) {
        if (k == 1 && run[0] == p && go(pi + 1, si + 1)) return true;
        continue;
      }
      auto it = binding.find(p);
      if (it != binding.end()) {
        if (it->second == run && go(pi + 1, si + k)) return true;
        continue;
      }
      binding[p] = run;
      if (go(pi + 1, si + k)) return true;
      binding.erase(p);
    }
    return false;
  };
  if (go(0, 0)) return binding;
  return std::nullopt;
}

std::string join(const std::vector<std::string>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ";" : "") + v[i];
  return out;
}

void words(const std::vector<std::string>& alphabet, std::size_t max_len, std::vector<std::vector<std::string>>& out) {
  std::vector<std::vector<std::string>> layer{{}};
  for (std::size_t n = 1; n <= max_len; ++n) {
    std::vector<std::vector<std::string>> next;
    for (const auto& w : layer)
      for (const auto& a : alphabet) {
        next.push_back(w);
        next.back().push_back(a);
      }
    out.insert(out.end(), next.begin(), next.end());
    layer = std::move(next);
  }
}

Outcome greedy_vs_oracle() {
  TypeEnvironment env, unknowns;
  for (const char* s : {"a", "b", "c", "X", "Y", "Z"}) env.vars.emplace(s, rel());
  for (const char* s : {"X", "Y", "Z"}) unknowns.vars.emplace(s, rel());
  std::vector<std::vector<std::string>> patterns, subjects;
  words({"a", "b", "c", "X", "Y", "Z"}, 3, patterns);
  words({"a", "b", "c"}, 5, subjects);
  std::vector<Formula> subject_f;
  for (const auto& s : subjects) subject_f.push_back(typed(join(s), env));
  std::size_t cases = 0, bad = 0;
  for (const auto& pv : patterns) {
    Pattern p = make_pattern(typed(join(pv), env), unknowns);
    for (std::size_t i = 0; i < subjects.size(); ++i) {
      ++cases;
      auto want = oracle(pv, subjects[i]);
      auto got = match(p, subject_f[i]);
      if (want.has_value() != got.has_value()) {
        ++bad;
        continue;
      }
      if (!got) continue;
      for (const auto& [v, run] : *want)
        if (!got->vars.count(v) || show(got->vars.at(v)) != join(run)) ++bad;
    }
  }
  return {bad == 0, std::to_string(cases) + " cases, " + std::to_string(bad) + " discrepancies"};
}

Outcome specialisation_type_safety() {
  Gen g(31337);
  const TypeEnvironment env = formula_env();
  const Type T = Type::param("T");
  const std::vector<Type> taus{Type::integer(), Type::boolean(), Type::power(Type::integer()),
                               Type::product(Type::integer(), Type::boolean()), Type::given("S")};
  const std::vector<Type> roots{T, Type::power(T), Type::integer(), Type::product(T, Type::integer())};
  int ok = 0;
  for (int round = 0; round < 1000; ++round) {
    try {
      TypedTextGen source(g, env.vars);
      const bool as_expression = g.coin();
      const std::string text = as_expression ? source.expr(g.pick(roots), 3)
                                             : source.predicate(2, {T, Type::integer(), Type::power(T)});
      TypeEnvironment in_env = env;
      Formula input = typecheck(parse(text, core(), {in_env.type_params, in_env.given_sets}), in_env);
      Specialisation s;
      s.types.emplace("T", g.pick(taus));
      TypeEnvironment image_env;
      image_env.given_sets = {"S"};
      const Type& tau = s.types.at("T");
      image_env.vars = {{"j", Type::integer()}, {"b", Type::integer()}, {"c", tau},
                        {"cs", Type::power(tau)}, {"k", Type::boolean()}};
      TypedTextGen images(g, image_env.vars);
      for (const auto& [name, declared] : env.vars) {
        if (!g.coin()) continue;
        s.vars.emplace(name, typecheck(parse(images.expr(apply_type(declared, s), 2), core(), {{}, {"S"}}),
                                       image_env));
      }
      Formula out = specialise(input, s, env);
      TypeEnvironment out_env = apply_env(env, s);
      for (const auto& [n, t] : image_env.vars) out_env.vars.insert_or_assign(n, t);
      Formula again = typecheck(parse(show(out), core(), {out_env.type_params, out_env.given_sets}), out_env);
      if (as_expression && (*again.type() != apply_type(*input.type(), s) ||
                            *out.type() != apply_type(*input.type(), s)))
        continue;
      ++ok;
    } catch (const std::exception&) {
    }
  }
  return {ok == 1000, std::to_string(ok) + "/1000 outputs typecheck with the specialised type"};
}

Outcome compatibility() {
  Theory a = parse_theory("theory A\noperator twice(x: ℤ) : ℤ\n  direct x + x\n", {});
  Theory b = parse_theory("theory B\noperator twice(x: ℤ) : ℤ\n  direct 2 * x\n", {});
  Theory c = parse_theory("theory C\noperator twice(x: BOOL) : ℤ\n  direct 2\n", {});
  Theory d1 = parse_theory("theory D\ndatatype K\n  constructor k1\n  constructor k2\n", {});
  Theory d2 = parse_theory("theory D\ndatatype K\n  constructor k1\n", {});
  const bool same = factories_compatible(*a.factory, *b.factory);
  const bool args = factory_conflict(*a.factory, *c.factory) == std::optional<std::string>("twice");
  const bool ctors = factory_conflict(*d1.factory, *d2.factory) == std::optional<std::string>("K");

  std::mt19937 rng(7);
  std::vector<ExtensionSignature> pool;
  for (int i = 0; i < 60; ++i) pool.push_back(random_signature(rng));
  std::size_t violations = 0;
  for (const auto& x : pool) {
    if (!signature_equal(x, x)) ++violations;
    for (const auto& y : pool) {
      const bool xy = signature_equal(x, y);
      if (xy != signature_equal(y, x)) ++violations;
      if (!xy) continue;
      for (const auto& z : pool)
        if (signature_equal(y, z) && !signature_equal(x, z)) ++violations;
    }
  }
  std::ostringstream d;
  d << "different definitions " << (same ? "compatible" : "INCOMPATIBLE") << ", argument types "
    << (args ? "conflict" : "NO CONFLICT") << ", constructors " << (ctors ? "conflict" : "NO CONFLICT")
    << ", " << violations << " equivalence violations";
  return {same && args && ctors && violations == 0, d.str()};
}

void divisor_conditions(const Formula& e, std::vector<std::string>& out) {
  for (std::size_t i = 0; i < e.arity(); ++i) divisor_conditions(e.child(i), out);
  if (e.tag() == Tag::Div) out.push_back(show(e.child(1)) + " ≠ 0");
}

std::set<std::string> conjunct_set(const Formula& f) {
  if (f.tag() != Tag::And) return {show(f)};
  std::set<std::string> out;
  for (std::size_t i = 0; i < f.arity(); ++i) out.insert(show(f.child(i)));
  return out;
}

std::string int_expr(Gen& g, int depth) {
  static const std::vector<std::string> leaves{"a", "b", "c", "1", "2"};
  if (depth <= 0 || g.below(3) == 0) return g.pick(leaves);
  switch (g.below(3)) {
    case 0: return "(" + int_expr(g, depth - 1) + " ÷ " + int_expr(g, depth - 1) + ")";
    case 1: return "(" + int_expr(g, depth - 1) + " * " + int_expr(g, depth - 1) + ")";
    default: return "(" + int_expr(g, depth - 1) + " − " + int_expr(g, depth - 1) + ")";
  }
}

Outcome wd_antecedents() {
  Theory t = parse_theory("theory W\nrewrite swap manual\n  lhs x + y\n  rhs y + x\n", {}, "w.thy");
  RuleBase base({std::make_shared<const Theory>(elaborate_theory(t))});
  RuleApplication app{Reasoner::ManualRewrite, {RuleRef{"W", "swap"}, std::nullopt, {0}, std::nullopt}};
  Gen g(4242);
  std::size_t nontrivial = 0, violations = 0;
  for (int i = 0; i < 400; ++i) {
    TypeEnvironment env;
    for (const char* v : {"a", "b", "c"}) env.vars.emplace(v, Type::integer());
    auto fs = typecheck_together({parse("a = a"), parse(int_expr(g, 3) + " + " + int_expr(g, 3) + " = 0")}, env);
    Sequent s{{fs[0]}, fs[1]};
    std::vector<std::string> expected;
    divisor_conditions(s.goal.child(0).child(0), expected);
    divisor_conditions(s.goal.child(0).child(1), expected);
    auto out = apply_reasoner(s, app, base);
    if (expected.empty()) {
      if (out.size() != 1) ++violations;
      continue;
    }
    ++nontrivial;
    if (out.size() != 2 || conjunct_set(out[0].goal) != std::set<std::string>(expected.begin(), expected.end()) ||
        out[0].hypotheses != s.hypotheses)
      ++violations;
  }
  std::vector<std::string> nested;
  divisor_conditions(typed("(a ÷ b) ÷ (c ÷ d)"), nested);
  std::vector<std::string> got;
  Formula w = wd(typed("(a ÷ b) ÷ (c ÷ d)"));
  for (std::size_t i = 0; i < w.arity(); ++i) got.push_back(show(w.child(i)));
  const bool simple = show(wd(typed("x ÷ y"))) == "y ≠ 0";
  const bool nested_ok = w.tag() == Tag::And && got == nested;
  std::ostringstream d;
  d << nontrivial << " applications with instantiation WD, " << violations << " violations; WD(x÷y) "
    << (simple ? "ok" : "wrong") << ", nested " << (nested_ok ? "ok" : "wrong");
  return {violations == 0 && nontrivial > 0 && simple && nested_ok, d.str()};
}

Outcome tree_contract() {
  Workspace ws(fixtures());
  for (const char* f : {"pos/basic.seq", "pos/list.seq", "pos/real.seq"}) ws.add_sequent_file(fixtures() / f);
  std::size_t pos = 0, bad = 0;
  for (const auto& po : ws.obligations()) {
    ++pos;
    if (!po.sequent) {
      ++bad;
      continue;
    }
    RuleBase base = ws.rule_base(po.theories);
    ProofTree tree(*po.sequent);
    TacticReport r = run_auto(tree, {AutoKind::Expand, AutoKind::Rewrite, AutoKind::Inference}, base, 1000);
    bool one_rule = true;
    for (const auto& [id, n] : tree.nodes()) one_rule = one_rule && n.rule.has_value();
    if (!one_rule || tree.nodes().size() != r.applications() || tree.status() != TreeStatus::Closed) ++bad;
  }
  return {bad == 0 && pos > 0, std::to_string(pos) + " obligations, " + std::to_string(bad) + " violations"};
}

Outcome generated_axioms_check() {
  Theory t = parse_theory("theory G\naxiomatic type S\n", {}, "g.thy");
  Theory e = elaborate_theory(t);
  auto axioms = generated_axioms(e);
  std::set<std::string> texts;
  bool typechecks = true;
  for (const auto& a : axioms) {
    texts.insert(show(a.formula));
    try {
      typecheck(a.formula, theory_environment(e));
    } catch (const Error&) {
      typechecks = false;
    }
  }
  const bool exact = axioms.size() == 2 && texts == std::set<std::string>{"S ≠ ∅", "∀x· x ∈ S"};
  std::string listed;
  for (const auto& s : texts) listed += (listed.empty() ? "" : ", ") + s;
  return {exact && typechecks, "{" + listed + "}" + (typechecks ? "" : " (type error)")};
}

Outcome infix_round_trip() {
  Workspace ws(fixtures());
  FactoryPtr real = ws.load_theory("Real").theory->factory;
  const bool named = print_formula(parse("x smr y", real), PrintMode::Unicode) == "x ≺ y" &&
                     parse("x smr y", real) == parse("x ≺ y", real);
  Gen g(20240917);
  FormulaGen gen(g, real);
  int ok = 0;
  for (int i = 0; i < 500; ++i) {
    Formula f = gen.predicate(1 + g.below(3));
    bool both = true;
    for (PrintMode mode : {PrintMode::Unicode, PrintMode::Ascii}) {
      try {
        const std::string text = print_formula(f, mode);
        Formula back = parse_formula(text, real);
        both = both && back == f && print_formula(back, mode) == text;
      } catch (const Error&) {
        both = false;
      }
    }
    ok += both;
  }
  return {named && ok == 500, std::to_string(ok) + "/500 formulas survive in both modes"};
}

Outcome replay_verdicts() {
  TempWorkspace tmp;
  auto run = [&](const std::string& seq, bool run_auto, bool replay) {
    ProveOptions o;
    o.run_auto = run_auto;
    o.replay = replay;
    std::ostringstream out, err;
    cmd_prove({(tmp / seq).string()}, "", o, false, out, err);
    return out.str();
  };
  auto has = [](const std::string& out, const std::string& line) { return out.find(line) != std::string::npos; };

  run("pos/real.seq", true, false);
  const std::string unchanged = run("pos/real.seq", false, true);
  const bool closed = has(unchanged, "real.sum_zero_right CLOSED");

  tmp.replace_in("theories/real.thy", "rewrite sum_zero ", "rewrite sum_zero_renamed ");
  const std::string renamed = run("pos/real.seq", false, true);
  const bool stale = has(renamed, "real.sum_zero_right STALE");

  run("pos/real.seq", true, false);
  tmp.replace_in("theories/real.thy", "operator sum(a: Real, b: Real) : Real",
                 "operator sum(a: ℤ, b: ℤ) : ℤ");
  tmp.replace_in("theories/real.thy", "axiom sum_zero_axiom: ∀x· x ⊕ zero = x\n", "");
  tmp.replace_in("theories/real.thy", "axiom minus_axiom: ∀x· x ⊕ minus(x) = zero\n", "");
  tmp.replace_in("theories/real.thy", "lhs x ⊕ zero", "lhs x ⊕ 0");
  const std::string changed = run("pos/real.seq", false, true);
  const bool incompatible = has(changed, "real.sum_zero_right INCOMPATIBLE(sum)");

  std::ostringstream d;
  d << "unchanged " << (closed ? "CLOSED" : "not closed") << ", renamed rule " << (stale ? "STALE" : "not stale")
    << ", retyped sum " << (incompatible ? "INCOMPATIBLE(sum)" : "not incompatible");
  return {closed && stale && incompatible, d.str()};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"associative golden matching", golden_matching},
      {"type pattern matching", type_matching},
      {"greedy associative matching agrees with exhaustive search", greedy_vs_oracle},
      {"specialisation preserves typing", specialisation_type_safety},
      {"factory compatibility and signature equality", compatibility},
      {"well-definedness antecedents", wd_antecedents},
      {"auto tactic tree contract", tree_contract},
      {"generated axioms of axiomatic types", generated_axioms_check},
      {"infix parse/print round trip", infix_round_trip},
      {"stored proof replay verdicts", replay_verdicts},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
    failed += !o.pass;
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed" << std::endl;
  return failed ? 1 : 0;
}
