#include <doctest.h>

#include "generators.hpp"
#include "support.hpp"

using namespace test;

namespace {

OperatorSig op(std::string name, std::vector<TypedName> args, std::optional<Type> result,
               Notation n = Notation::Prefix) {
  OperatorSig s;
  s.name = std::move(name);
  s.args = std::move(args);
  s.result = std::move(result);
  s.formula_kind = s.result ? FormulaKind::Expression : FormulaKind::Predicate;
  s.notation = n;
  return s;
}

DatatypeSig list_sig() {
  DatatypeSig d;
  d.name = "List";
  d.type_params = {"T"};
  d.constructors.push_back({"nil", {}});
  d.constructors.push_back(
      {"cons", {{"head", Type::param("T")}, {"tail", Type::datatype("List", {Type::param("T")})}}});
  return d;
}

}  // namespace

TEST_SUITE("ast") {
  TEST_CASE("core factory is shared and empty") {
    CHECK(core()->is_core());
    CHECK(core() == FormulaFactory::core());
    CHECK(FormulaFactory::make({})->id() == core()->id());
  }

  TEST_CASE("factory ids are content addressed") {
    auto a = op("f", {{"a", Type::integer()}}, Type::integer());
    auto b = op("g", {{"a", Type::integer()}}, std::nullopt);
    CHECK(FormulaFactory::make({a, b})->id() == FormulaFactory::make({b, a})->id());
    auto c = a;
    c.args[0].type = Type::boolean();
    CHECK(FormulaFactory::make({a, b})->id() != FormulaFactory::make({c, b})->id());
  }

  TEST_CASE("duplicate names are rejected") {
    auto a = op("f", {{"a", Type::integer()}}, Type::integer());
    CHECK(FormulaFactory::make({a, a})->id() == FormulaFactory::make({a})->id());
    auto a2 = op("f", {{"a", Type::integer()}}, Type::boolean());
    CHECK_THROWS_AS(FormulaFactory::make({a, a2}), Error);
    try {
      FormulaFactory::make({a, a2});
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::DuplicateExtension);
    }
    auto clash = op("nil", {{"a", Type::integer()}}, Type::integer());
    try {
      FormulaFactory::make({list_sig(), clash});
      FAIL("expected DuplicateExtension");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::DuplicateExtension);
    }
  }

  TEST_CASE("signature notation rules") {
    auto unary_infix = op("u", {{"a", Type::integer()}}, Type::integer(), Notation::Infix);
    CHECK_THROWS_AS(check_signature(unary_infix), Error);
    auto assoc = op("s", {{"a", Type::integer()}, {"b", Type::integer()}}, Type::integer(), Notation::Infix);
    assoc.associative = true;
    CHECK_NOTHROW(check_signature(assoc));
    assoc.result = Type::boolean();
    CHECK_THROWS_AS(check_signature(assoc), Error);
  }

  TEST_CASE("signature_equal is an equivalence relation") {
    std::mt19937 rng(7);
    std::vector<ExtensionSignature> pool;
    for (int i = 0; i < 60; ++i) pool.push_back(random_signature(rng));
    std::size_t equal_pairs = 0;
    for (const auto& a : pool) {
      CHECK(signature_equal(a, a));
      for (const auto& b : pool) {
        const bool ab = signature_equal(a, b);
        CHECK(ab == signature_equal(b, a));
        CHECK(ab == (canonical_text(a) == canonical_text(b)));
        if (ab && &a != &b) ++equal_pairs;
        if (!ab) continue;
        for (const auto& c : pool)
          if (signature_equal(b, c)) CHECK(signature_equal(a, c));
      }
    }
    CHECK(equal_pairs > 0);
  }

  TEST_CASE("signature_equal is order sensitive") {
    auto d1 = list_sig();
    auto d2 = list_sig();
    std::swap(d2.constructors[0], d2.constructors[1]);
    CHECK_FALSE(signature_equal(d1, d2));
    auto o1 = op("f", {{"a", Type::integer()}, {"b", Type::boolean()}}, std::nullopt);
    auto o2 = op("f", {{"b", Type::boolean()}, {"a", Type::integer()}}, std::nullopt);
    CHECK_FALSE(signature_equal(o1, o2));
  }

  TEST_CASE("factory compatibility") {
    auto sum = op("sum", {{"a", Type::given("Real")}, {"b", Type::given("Real")}}, Type::given("Real"));
    auto f1 = FormulaFactory::make({sum, AxiomaticTypeSig{"Real"}});
    auto f2 = FormulaFactory::make({sum});
    CHECK(factories_compatible(*f1, *f2));
    CHECK(factory_union(f1, f2)->id() == f1->id());
    auto sum_int = sum;
    sum_int.args[0].type = Type::integer();
    auto f3 = FormulaFactory::make({sum_int});
    CHECK(factory_conflict(*f1, *f3) == std::optional<std::string>("sum"));
    try {
      factory_union(f1, f3);
      FAIL("expected IncompatibleFactories");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::IncompatibleFactories);
      CHECK(e.subject() == "sum");
    }
  }

  TEST_CASE("nodes carry the factories of their children") {
    auto f = FormulaFactory::make({op("g", {{"a", Type::integer()}}, Type::integer())});
    Formula x = build::ident("x", Type::integer());
    Payload p;
    p.name = "g";
    Formula gx = mk_node(Tag::ExtOp, {x}, p, f);
    CHECK(gx.factory()->id() == f->id());
    Formula eq = build::binary(Tag::Equal, gx, build::integer(1));
    CHECK(eq.factory()->id() == f->id());
    CHECK_THROWS_AS(mk_node(Tag::ExtOp, {x}, p, core()), Error);
    try {
      mk_node(Tag::ExtOp, {x, x}, p, f);
      FAIL("expected ArityMismatch");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::ArityMismatch);
    }
  }

  TEST_CASE("conjunction and disjunction flatten and eliminate units") {
    Formula a = parse("a = 1"), b = parse("b = 2"), c = parse("c = 3");
    Formula ab = build::conjunction({a, b});
    Formula abc = build::conjunction({ab, c});
    CHECK(abc.tag() == Tag::And);
    CHECK(abc.arity() == 3);
    CHECK(build::conjunction({}).tag() == Tag::True);
    CHECK(build::conjunction({build::truth(), a}) == a);
    CHECK(build::disjunction({}).tag() == Tag::False);
    CHECK(parse("a = 1 ∧ (b = 2 ∧ c = 3)").arity() == 3);
  }

  TEST_CASE("positions") {
    Formula f = parse("∀x· x = 1 ⇒ y + 2 = 3");
    const auto all = all_positions(f);
    REQUIRE(!all.empty());
    CHECK(all.front().empty());
    for (const auto& p : all) {
      CHECK(position_from_string(position_to_string(p)) == p);
      CHECK(replace_at(f, p, subformula_at(f, p)) == f);
    }
    const Position plus{0, 1, 0};
    CHECK(show(subformula_at(f, plus)) == "y + 2");
    CHECK(bound_above(f, plus).size() == 1);
    CHECK(bound_above(f, plus)[0].name == "x");
    CHECK_THROWS_AS(subformula_at(f, Position{5}), Error);
    CHECK_THROWS_AS(position_from_string("1..2"), Error);
    Formula g = replace_at(f, plus, parse("y"));
    CHECK(show(g) == "∀x· x = 1 ⇒ y = 3");
  }

  TEST_CASE("free identifiers respect binders") {
    Formula f = parse("∀x· x ∈ s ∧ y = x");
    CHECK(free_identifiers(f) == std::set<std::string>{"s", "y"});
    CHECK(occurs_free("y", f));
    CHECK_FALSE(occurs_free("x", f));
  }

  TEST_CASE("structural equality ignores the factory") {
    auto f = FormulaFactory::make({AxiomaticTypeSig{"R"}});
    Formula a = parse("x + 1 = 2");
    Formula b = parse("x + 1 = 2", f);
    CHECK(a == b);
    CHECK(parse("x + 1 = 3") != a);
  }
}
