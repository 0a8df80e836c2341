#include <doctest.h>

#include "support.hpp"

using namespace test;

namespace {

Type rel() { return Type::power(Type::product(Type::integer(), Type::integer())); }

// Rule-style pattern: typechecked jointly with leftover types generalized.
Pattern rule_pattern(const std::string& text) {
  TypeEnvironment env;
  auto typed_f = typecheck_together({parse(text)}, env, TypecheckOptions{true});
  return make_pattern(typed_f[0], std::set<std::string>(env.type_params.begin(), env.type_params.end()));
}

std::map<std::string, std::string> shown(const Specialisation& s) {
  std::map<std::string, std::string> out;
  for (const auto& [v, e] : s.vars) out[v] = show(e);
  return out;
}

// Exhaustive oracle for one flattened operator: the first split of `subject`
// into contiguous non-empty runs, in lexicographic order of run lengths, under
// which constants match themselves and repeated unknowns match equal runs.
std::optional<std::map<std::string, std::vector<std::string>>> oracle(
    const std::vector<std::string>& pattern, const std::vector<std::string>& subject,
    const std::set<std::string>& unknowns) {
  std::map<std::string, std::vector<std::string>> binding;
  std::function<bool(std::size_t, std::size_t)> go = [&](std::size_t pi, std::size_t si) -> bool {
    if (pi == pattern.size()) return si == subject.size();
    const std::string& p = pattern[pi];
    for (std::size_t k = 1; si + k <= subject.size(); ++k) {
      std::vector<std::string> run(subject.begin() + si, subject.begin() + si + k);
      if (!unknowns.count(p)) {
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

}  // namespace

TEST_SUITE("matcher") {
  TEST_CASE("associative golden row 1: f;{x↦c} against g;h;{y↦c}") {
    TypeEnvironment env;
    env.vars = {{"g", rel()}, {"h", rel()}, {"y", Type::integer()}, {"c", Type::integer()}};
    Formula subject = typed("g;h;{y ↦ c}", env);
    auto s = match(rule_pattern("f;{x ↦ c}"), subject);
    REQUIRE(s);
    CHECK(shown(*s) == std::map<std::string, std::string>{{"f", "g;h"}, {"x", "y"}, {"c", "c"}});
  }

  TEST_CASE("associative golden row 2: e;f against g;h;{y↦c}") {
    TypeEnvironment env;
    env.vars = {{"g", rel()}, {"h", rel()}, {"y", Type::integer()}, {"c", Type::integer()}};
    Formula subject = typed("g;h;{y ↦ c}", env);
    Pattern p = rule_pattern("e;f");
    auto s = match(p, subject);
    REQUIRE(s);
    CHECK(shown(*s) == std::map<std::string, std::string>{{"e", "g"}, {"f", "h;{y ↦ c}"}});
    CHECK(shown(*s) != std::map<std::string, std::string>{{"e", "g;h"}, {"f", "{y ↦ c}"}});
    CHECK(specialise(p.formula, *s, p.env) == subject);
    auto direct = match_assoc(p, subject);
    REQUIRE(direct);
    CHECK(shown(*direct) == shown(*s));
  }

  TEST_CASE("type patterns: S against ℙ(S) and S × T") {
    std::map<std::string, Type> b1;
    CHECK(match_type(Type::param("S"), Type::power(Type::given("S")), {"S"}, b1));
    CHECK(b1.at("S") == Type::power(Type::given("S")));
    std::map<std::string, Type> b2;
    CHECK(match_type(Type::param("S"), Type::product(Type::given("S"), Type::given("T")), {"S"}, b2));
    CHECK(b2.at("S") == Type::product(Type::given("S"), Type::given("T")));

    TypeEnvironment penv;
    penv.type_params = {"S"};
    Formula pat = typed("S", penv);
    Pattern p = make_pattern(pat, std::set<std::string>{"S"});
    TypeEnvironment senv;
    senv.given_sets = {"S", "T"};
    auto m1 = match(p, typed("ℙ(S)", senv));
    REQUIRE(m1);
    CHECK(m1->types.at("S").to_string() == "ℙ(S)");
    auto m2 = match(p, typed("S × T", senv));
    REQUIRE(m2);
    CHECK(m2->types.at("S").to_string() == "S×T");
  }

  TEST_CASE("type bindings must agree") {
    std::map<std::string, Type> b;
    const Type pair = Type::product(Type::param("S"), Type::param("S"));
    CHECK(match_type(pair, Type::product(Type::integer(), Type::integer()), {"S"}, b));
    b.clear();
    CHECK_FALSE(match_type(pair, Type::product(Type::integer(), Type::boolean()), {"S"}, b));
  }

  TEST_CASE("non-linear patterns") {
    Pattern p = rule_pattern("x + x");
    CHECK(match(p, typed("a + a")));
    CHECK_FALSE(match(p, typed("a + b")));
  }

  TEST_CASE("binders match up to renaming and refuse capture") {
    Pattern p = rule_pattern("∃x· x = e + 1");
    auto ok = match(p, typed("∃y· y = z + 1"));
    REQUIRE(ok);
    CHECK(show(ok->vars.at("e")) == "z");
    CHECK_FALSE(match(p, typed("∃y· y = y + 1")));
  }

  TEST_CASE("extension operators and constructors") {
    Workspace ws(fixtures());
    const Theory& list = *ws.load_theory("List").theory;
    RuleBase base = ws.rule_base({"List"});
    const RuleBase::Rewrite* r = base.find_rewrite("List", "isEmpty_cons_rewrite");
    REQUIRE(r);
    Pattern p = make_pattern(r->rule->lhs, r->env);
    Formula subj = typecheck(parse_formula("list_isEmpty(cons(1, cons(2, nil)))", list.factory), {});
    auto s = match(p, subj);
    REQUIRE(s);
    CHECK(show(s->vars.at("x")) == "1");
    CHECK(show(s->vars.at("l")) == "cons(2, nil)");
    REQUIRE(s->types.size() == 1);
    CHECK(s->types.begin()->second == Type::integer());
    Formula other = typecheck(parse_formula("list_isEmpty(nil ⦂ List(ℤ))", list.factory), {});
    CHECK_FALSE(match(p, other));
  }

  TEST_CASE("seeded matches extend earlier bindings") {
    Pattern p = rule_pattern("x + y");
    TypeEnvironment ints;
    ints.vars = {{"b", Type::integer()}};
    Specialisation seed;
    seed.vars.emplace("x", typed("b", ints));
    CHECK_FALSE(match(p, typed("a + c"), seed));
    auto s = match(p, typed("b + c"), seed);
    REQUIRE(s);
    CHECK(show(s->vars.at("y")) == "c");
  }

  TEST_CASE("greedy associative matching agrees with the exhaustive oracle") {
    const std::vector<std::string> consts{"a", "b", "c"};
    const std::vector<std::string> symbols{"a", "b", "c", "X", "Y", "Z"};
    const std::set<std::string> unknowns{"X", "Y", "Z"};
    TypeEnvironment env;
    for (const auto& s : symbols) env.vars.emplace(s, rel());
    TypeEnvironment unknown_env;
    for (const auto& u : unknowns) unknown_env.vars.emplace(u, rel());

    std::vector<std::vector<std::string>> patterns, subjects;
    std::function<void(std::vector<std::string>&, std::size_t, const std::vector<std::string>&,
                       std::vector<std::vector<std::string>>&)>
        all = [&](std::vector<std::string>& cur, std::size_t len, const std::vector<std::string>& alphabet,
                  std::vector<std::vector<std::string>>& out) {
          if (cur.size() == len) {
            out.push_back(cur);
            return;
          }
          for (const auto& s : alphabet) {
            cur.push_back(s);
            all(cur, len, alphabet, out);
            cur.pop_back();
          }
        };
    for (std::size_t n = 1; n <= 3; ++n) {
      std::vector<std::string> cur;
      all(cur, n, symbols, patterns);
    }
    for (std::size_t n = 1; n <= 5; ++n) {
      std::vector<std::string> cur;
      all(cur, n, consts, subjects);
    }

    std::map<std::string, Formula> parsed;
    auto formula_of = [&](const std::vector<std::string>& ops) -> const Formula& {
      const std::string text = join(ops);
      auto it = parsed.find(text);
      if (it == parsed.end()) it = parsed.emplace(text, typed(text, env)).first;
      return it->second;
    };

    std::size_t cases = 0, discrepancies = 0, matched = 0;
    for (const auto& pv : patterns) {
      Pattern p = make_pattern(formula_of(pv), unknown_env);
      for (const auto& sv : subjects) {
        ++cases;
        const Formula& subject = formula_of(sv);
        auto expected = oracle(pv, sv, unknowns);
        auto got = match(p, subject);
        if (expected.has_value() != got.has_value()) {
          ++discrepancies;
          MESSAGE("matchability differs: " << join(pv) << " vs " << join(sv));
          continue;
        }
        if (!got) continue;
        ++matched;
        for (const auto& [v, run] : *expected) {
          if (!got->vars.count(v) || show(got->vars.at(v)) != join(run)) {
            ++discrepancies;
            MESSAGE("binding differs: " << join(pv) << " vs " << join(sv) << " at " << v);
          }
        }
        if (specialise(p.formula, *got, p.env) != subject) ++discrepancies;
      }
    }
    CHECK(cases == 258 * 363);
    CHECK(matched > 0);
    CHECK(discrepancies == 0);
  }
}
