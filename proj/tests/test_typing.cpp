#include <doctest.h>

#include "generators.hpp"
#include "support.hpp"

using namespace test;

namespace {

ErrorKind type_error(const std::string& text, TypeEnvironment env = {}) {
  try {
    typed(text, env);
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected a type error for " << text);
  return ErrorKind::IoError;
}

}  // namespace

TEST_SUITE("typing") {
  TEST_CASE("inference of free identifiers") {
    TypeEnvironment env;
    Formula f = typecheck(parse("x + 1 = y"), env);
    CHECK(*f.child(0).type() == Type::integer());
    CHECK(*f.child(1).type() == Type::integer());
    auto fs = typecheck_together({parse("x ∈ s"), parse("x = 1")}, env);
    CHECK(env.vars.at("s") == Type::power(Type::integer()));
  }

  TEST_CASE("type errors") {
    CHECK(type_error("x + 1 = TRUE") == ErrorKind::TypeError);
    CHECK(type_error("x = y") == ErrorKind::UnresolvedTypeParam);
    CHECK(type_error("{1} ∈ ℤ") == ErrorKind::TypeError);
    TypeEnvironment env;
    env.vars.emplace("b", Type::boolean());
    CHECK(type_error("b + 1 = 2", env) == ErrorKind::TypeError);
  }

  TEST_CASE("generalize turns leftovers into parameters") {
    TypeEnvironment env;
    auto out = typecheck_together({parse("x = y")}, env, TypecheckOptions{true});
    REQUIRE(out.size() == 1);
    CHECK(env.type_params.size() == 1);
    CHECK(env.vars.at("x").kind() == Type::Kind::Param);
    CHECK(env.vars.at("x") == env.vars.at("y"));
  }

  TEST_CASE("polymorphic datatype constructors") {
    Workspace ws(fixtures());
    auto f = ws.load_theory("List").theory->factory;
    Formula e = typed("cons(1, nil) = l", {}, f);
    CHECK(e.child(0).type()->to_string() == "List(ℤ)");
    Formula g = typecheck(parse_formula("list_length(nil ⦂ List(BOOL)) = 0", f), {});
    CHECK(g.child(0).child(0).type()->to_string() == "List(BOOL)");
    CHECK_THROWS_AS(typecheck(parse_formula("list_length(nil) = 0", f), {}), Error);
  }

  TEST_CASE("type parameters as sets") {
    TypeEnvironment env;
    env.type_params = {"T"};
    Formula f = typed("x ∈ T", env);
    CHECK(*f.child(0).type() == Type::param("T"));
    Specialisation s;
    s.types.emplace("T", Type::power(Type::integer()));
    Formula g = specialise(f, s, env);
    CHECK(show(g) == "x ∈ ℙ(ℤ)");
    CHECK(*g.child(0).type() == Type::power(Type::integer()));
  }

  TEST_CASE("specialisation avoids capture") {
    TypeEnvironment env;
    env.vars.emplace("x", Type::integer());
    Formula f = typed("∀y· x = y", env);
    Specialisation s;
    s.vars.emplace("x", typed("y + 1"));
    env.vars.emplace("z", Type::integer());
    Formula g = specialise(f, s, env);
    CHECK(show(g) == "∀y'· y + 1 = y'");
    s.vars.clear();
    s.vars.emplace("x", typed("z", env));
    CHECK(show(specialise(f, s, env)) == "∀y· z = y");
  }

  TEST_CASE("specialisation is simultaneous") {
    TypeEnvironment env;
    env.vars = {{"x", Type::integer()}, {"y", Type::integer()}};
    Formula f = typed("x + y = 0", env);
    Specialisation s;
    s.vars.emplace("x", typed("y", env));
    s.vars.emplace("y", typed("x", env));
    CHECK(show(specialise(f, s, env)) == "y + x = 0");
  }

  TEST_CASE("inconsistent specialisations are rejected") {
    TypeEnvironment env;
    env.type_params = {"T"};
    env.vars.emplace("x", Type::param("T"));
    Formula f = typed("x ∈ T", env);
    Specialisation s;
    s.types.emplace("T", Type::integer());
    s.vars.emplace("x", typed("TRUE"));
    try {
      specialise(f, s, env);
      FAIL("expected InconsistentSpecialisation");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::InconsistentSpecialisation);
      CHECK(e.subject() == "x");
    }
    Specialisation both;
    both.types.emplace("T", Type::integer());
    both.vars.emplace("T", typed("1"));
    CHECK_THROWS_AS(check_consistent(both, env), Error);
    TypeEnvironment carrier = env;
    carrier.given_sets = {"T"};
    Specialisation t;
    t.types.emplace("T", Type::integer());
    CHECK_THROWS_AS(check_consistent(t, carrier), Error);
  }

  TEST_CASE("compose applies the second after the first") {
    TypeEnvironment env;
    env.vars = {{"x", Type::integer()}, {"y", Type::integer()}};
    Formula f = typed("x = 1", env);
    Specialisation s1, s2;
    s1.vars.emplace("x", typed("y + 2", env));
    s2.vars.emplace("y", typed("3"));
    Specialisation c = compose(s1, s2, env);
    CHECK(specialise(f, c, env) == specialise(specialise(f, s1, env), s2, apply_env(env, s1)));
    CHECK(show(specialise(f, c, env)) == "3 + 2 = 1");
  }

  TEST_CASE("type_to_expression inverts expression_to_type") {
    const std::vector<Type> types{Type::integer(), Type::boolean(), Type::param("T"),
                                  Type::power(Type::product(Type::integer(), Type::param("T"))),
                                  Type::given("S")};
    for (const auto& t : types) {
      auto back = expression_to_type(type_to_expression(t, core()));
      REQUIRE(back);
      CHECK(*back == t);
    }
  }

  TEST_CASE("randomized specialisations preserve typing") {
    Gen g(31337);
    const TypeEnvironment env = formula_env();
    const Type T = Type::param("T");
    const std::vector<Type> taus{Type::integer(), Type::boolean(), Type::power(Type::integer()),
                                 Type::product(Type::integer(), Type::boolean()), Type::given("S")};
    int ok = 0, substituted = 0;
    for (int round = 0; round < 1000; ++round) {
      TypedTextGen source(g, env.vars);
      const bool as_expression = g.coin();
      const std::vector<Type> root_types{T, Type::power(T), Type::integer(), Type::product(T, Type::integer())};
      const Type root_type = g.pick(root_types);
      const std::string text = as_expression ? source.expr(root_type, 3)
                                             : source.predicate(2, {T, Type::integer(), Type::power(T)});
      TypeEnvironment in_env = env;
      Formula input = typecheck(parse(text, core(), {in_env.type_params, in_env.given_sets}), in_env);

      Specialisation s;
      const Type tau = g.pick(taus);
      s.types.emplace("T", tau);
      TypeEnvironment image_env;
      image_env.given_sets = {"S"};
      image_env.vars = {{"j", Type::integer()}, {"b", Type::integer()}, {"c", tau},
                        {"cs", Type::power(tau)}, {"k", Type::boolean()}};
      TypedTextGen images(g, image_env.vars);
      for (const auto& [name, declared] : env.vars) {
        if (!g.coin()) continue;
        const Type target = apply_type(declared, s);
        Formula e = typecheck(parse(images.expr(target, 2), core(), {{}, {"S"}}), image_env);
        s.vars.emplace(name, e);
        ++substituted;
      }

      Formula out = specialise(input, s, env);
      const std::string printed = show(out);
      INFO(text << "  ~>  " << printed);
      TypeEnvironment out_env = apply_env(env, s);
      for (const auto& [n, t] : image_env.vars) out_env.vars.insert_or_assign(n, t);
      Formula again;
      try {
        again = typecheck(parse(printed, core(), {out_env.type_params, out_env.given_sets}), out_env);
      } catch (const Error& e) {
        FAIL("output does not typecheck: " << e.what());
        continue;
      }
      if (as_expression) {
        CHECK(*again.type() == apply_type(*input.type(), s));
        CHECK(*out.type() == apply_type(*input.type(), s));
      }
      ++ok;
    }
    CHECK(ok == 1000);
    CHECK(substituted > 1000);
  }
}
