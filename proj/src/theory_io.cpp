#include <set>

#include "syntax.hpp"
#include "theoria/parser.hpp"
#include "theoria/printer.hpp"

namespace theoria {

using syntax::Line;
using syntax::Parser;
using syntax::Source;
using syntax::Token;
using syntax::TokenKind;

namespace {

class TheoryReader {
 public:
  TheoryReader(std::string_view text, const std::vector<FactoryPtr>& imports, std::string file)
      : text_(text), file_(std::move(file)), lines_(syntax::split_lines(text)) {
    imported_ = FormulaFactory::core();
    for (const auto& f : imports) imported_ = factory_union(imported_, f);
    t_.factory = imported_;
  }

  Theory read() {
    header();
    while (i_ < lines_.size()) {
      const Line& line = lines_[i_];
      Parser p = parser(line);
      if (line.indented) p.fail(ErrorKind::SyntaxError, p.peek(), "indented line outside a block");
      const Token head = p.peek();
      if (p.accept_word("type")) {
        if (!p.accept_word("parameters") || !t_.datatypes.empty() || !t_.operators.empty())
          p.fail(ErrorKind::SyntaxError, head, "type parameters must follow the header");
        type_parameters(p);
        ++i_;
      } else if (p.accept_word("datatype")) {
        datatype(p);
      } else if (p.accept_word("axiomatic")) {
        axiomatic_type(p);
      } else if (p.accept_word("operator")) {
        operator_decl(p);
      } else if (p.accept_word("axiom")) {
        axiom(p);
      } else if (p.accept_word("rewrite")) {
        rewrite(p);
      } else if (p.accept_word("inference")) {
        inference(p);
      } else {
        p.fail(ErrorKind::SyntaxError, head, "unknown declaration '" + head.text + "'");
      }
    }
    for (auto& op : t_.operators) {
      auto* ax = std::get_if<AxiomaticDefinition>(&op.definition);
      if (!ax) continue;
      for (const auto& a : t_.axioms)
        if (mentions(a.formula, op.signature.name)) ax->defining_axioms.push_back(a.name);
    }
    return std::move(t_);
  }

  TheoryHeader header_only() {
    header();
    return {t_.name, t_.imports};
  }

 private:
  Parser parser(const Line& line) const {
    return Parser(line.text, t_.factory, scope_, Source{text_, line.offset, file_});
  }

  void header() {
    if (lines_.empty())
      throw ParseError(ErrorKind::SyntaxError, SourceSpan{file_, 0, 0}, "", "missing 'theory' header");
    Parser p = parser(lines_[0]);
    if (!p.accept_word("theory")) p.fail(ErrorKind::SyntaxError, p.peek(), "expected 'theory NAME'");
    t_.name = p.identifier("a theory name");
    p.expect_end();
    i_ = 1;
    if (i_ < lines_.size()) {
      Parser q = parser(lines_[i_]);
      if (q.accept_word("imports")) {
        do {
          t_.imports.push_back(q.identifier("a theory name"));
          q.accept(",");
        } while (!q.at_end());
        ++i_;
      }
    }
  }

  static bool mentions(const Formula& f, const std::string& op) {
    if (f.tag() == Tag::ExtOp && f.name() == op) return true;
    for (const auto& c : f.children())
      if (mentions(c, op)) return true;
    return false;
  }

  void claim(const std::string& name, const Parser& p, const Token& at) {
    if (is_core_keyword(name) || !names_.insert(name).second || imported_->find(name) ||
        imported_->owned_names().count(name))
      p.fail(ErrorKind::DuplicateName, at, "name '" + name + "' is already declared");
  }

  void add_signature(ExtensionSignature sig, const Parser& p, const Token& at) {
    own_.push_back(std::move(sig));
    try {
      t_.factory = factory_union(imported_, FormulaFactory::make(own_));
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      p.fail(e.kind(), at, e.message());
    }
  }

  // Indented lines following the current one.
  std::vector<Line> block() {
    std::vector<Line> out;
    ++i_;
    while (i_ < lines_.size() && lines_[i_].indented) out.push_back(lines_[i_++]);
    return out;
  }

  void type_parameters(Parser& p) {
    do {
      const Token at = p.peek();
      std::string name = p.identifier("a type parameter");
      claim(name, p, at);
      t_.type_params.push_back(name);
      scope_.type_params.insert(name);
    } while (p.accept(","));
    p.expect_end();
  }

  void datatype(Parser& p) {
    const Token at = p.peek();
    DatatypeSig dt;
    dt.name = p.identifier("a datatype name");
    claim(dt.name, p, at);
    if (p.accept("(")) {
      do {
        const Token param = p.peek();
        std::string name = p.identifier("a type parameter");
        if (!scope_.type_params.count(name))
          p.fail(ErrorKind::UnknownType, param, "undeclared type parameter '" + name + "'");
        dt.type_params.push_back(name);
      } while (p.accept(","));
      p.expect(")");
    }
    p.expect_end();
    TypeScope own_scope;
    own_scope.type_params.insert(dt.type_params.begin(), dt.type_params.end());
    for (const Line& line : block()) {
      Parser q(line.text, t_.factory, own_scope, Source{text_, line.offset, file_});
      q.set_pending_datatype(dt.name, dt.type_params.size());
      if (!q.accept_word("constructor")) q.fail(ErrorKind::SyntaxError, q.peek(), "expected 'constructor'");
      const Token cat = q.peek();
      ConstructorSig ctor;
      ctor.name = q.identifier("a constructor name");
      claim(ctor.name, q, cat);
      if (q.accept("(")) {
        do {
          const Token dat = q.peek();
          std::string name = q.identifier("a destructor name");
          claim(name, q, dat);
          q.expect(":");
          ctor.destructors.push_back({name, q.type()});
        } while (q.accept(","));
        q.expect(")");
      }
      q.expect_end();
      dt.constructors.push_back(std::move(ctor));
    }
    t_.datatypes.push_back(dt);
    add_signature(dt, p, at);
  }

  void axiomatic_type(Parser& p) {
    if (!p.accept_word("type")) p.fail(ErrorKind::SyntaxError, p.peek(), "expected 'axiomatic type NAME'");
    const Token at = p.peek();
    AxiomaticTypeSig sig{p.identifier("a type name")};
    claim(sig.name, p, at);
    p.expect_end();
    t_.axiomatic_types.push_back(sig);
    add_signature(sig, p, at);
    for (const Line& line : block()) {
      Parser q = parser(line);
      q.fail(ErrorKind::SyntaxError, q.peek(), "axiomatic types take no sub-declarations");
    }
  }

  void operator_decl(Parser& p) {
    const Token at = p.peek();
    OperatorDef def;
    OperatorSig& sig = def.signature;
    sig.name = p.identifier("an operator name");
    claim(sig.name, p, at);
    if (p.accept("(")) {
      if (!p.accept(")")) {
        std::set<std::string> seen;
        do {
          const Token arg = p.peek();
          std::string name = p.identifier("an argument name");
          if (!seen.insert(name).second)
            p.fail(ErrorKind::DuplicateName, arg, "argument '" + name + "' declared twice");
          p.expect(":");
          sig.args.push_back({name, p.type()});
        } while (p.accept(","));
        p.expect(")");
      }
    }
    if (p.accept(":")) {
      sig.result = p.type();
    } else if (p.accept_word("predicate")) {
      sig.formula_kind = FormulaKind::Predicate;
    } else {
      p.fail(ErrorKind::SyntaxError, p.peek(), "expected ': TYPE' or 'predicate'");
    }
    while (!p.at_end()) {
      const Token flag = p.next();
      if (flag.kind == TokenKind::Ident && flag.text == "infix") {
        sig.notation = Notation::Infix;
      } else if (flag.kind == TokenKind::Ident && flag.text == "prefix") {
        sig.notation = Notation::Prefix;
      } else if (flag.kind == TokenKind::Ident && flag.text == "associative") {
        sig.associative = true;
      } else if (flag.kind == TokenKind::Ident && flag.text == "commutative") {
        sig.commutative = true;
      } else if (flag.kind == TokenKind::Ident && flag.text == "symbol") {
        const Token s = p.next();
        if (s.kind != TokenKind::String || s.text.empty())
          p.fail(ErrorKind::SyntaxError, s, "expected a quoted symbol");
        sig.symbol = s.text;
      } else {
        p.fail(ErrorKind::SyntaxError, flag, "unknown operator property '" + flag.text + "'");
      }
    }
    add_signature(sig, p, at);

    bool has_definition = false;
    std::optional<InductiveDefinition> inductive;
    def.definition = AxiomaticDefinition{};
    for (const Line& line : block()) {
      Parser q = parser(line);
      const Token kw = q.peek();
      if (q.accept_word("direct")) {
        if (has_definition) q.fail(ErrorKind::SyntaxError, kw, "operator already has a definition");
        has_definition = true;
        def.definition = DirectDefinition{q.formula()};
      } else if (q.accept_word("inductive")) {
        if (has_definition) q.fail(ErrorKind::SyntaxError, kw, "operator already has a definition");
        has_definition = true;
        inductive = InductiveDefinition{q.identifier("the inductive argument"), {}};
      } else if (q.accept_word("case")) {
        if (!inductive) q.fail(ErrorKind::SyntaxError, kw, "'case' outside an inductive definition");
        InductiveCase c;
        c.constructor = q.identifier("a constructor name");
        if (q.accept("(")) {
          do {
            c.binders.push_back(q.identifier("a binder name"));
          } while (q.accept(","));
          q.expect(")");
        }
        q.expect("=>");
        c.body = q.formula();
        inductive->cases.push_back(std::move(c));
      } else if (q.accept_word("wd")) {
        if (def.wd_condition) q.fail(ErrorKind::SyntaxError, kw, "duplicate 'wd' condition");
        def.wd_condition = q.formula();
      } else {
        q.fail(ErrorKind::SyntaxError, kw, "expected 'direct', 'inductive', 'case' or 'wd'");
      }
      q.expect_end();
    }
    if (inductive) def.definition = std::move(*inductive);
    t_.operators.push_back(std::move(def));
  }

  void axiom(Parser& p) {
    const Token at = p.peek();
    NamedFormula a;
    a.name = p.identifier("an axiom name");
    claim(a.name, p, at);
    p.expect(":");
    a.formula = p.formula();
    p.expect_end();
    t_.axioms.push_back(std::move(a));
    for (const Line& line : block()) {
      Parser q = parser(line);
      q.fail(ErrorKind::SyntaxError, q.peek(), "axioms take no sub-declarations");
    }
  }

  void rewrite(Parser& p) {
    const Token at = p.peek();
    RewriteRule r;
    r.name = p.identifier("a rule name");
    claim(r.name, p, at);
    while (!p.at_end()) {
      const Token flag = p.peek();
      if (p.accept_word("automatic")) r.automatic = true;
      else if (p.accept_word("manual")) r.automatic = false;
      else if (p.accept_word("complete")) r.complete = true;
      else if (p.accept_word("incomplete")) r.complete = false;
      else p.fail(ErrorKind::SyntaxError, flag, "unknown rewrite property '" + flag.text + "'");
    }
    bool plain = false;
    for (const Line& line : block()) {
      Parser q = parser(line);
      const Token kw = q.peek();
      if (q.accept_word("lhs")) {
        if (r.lhs) q.fail(ErrorKind::SyntaxError, kw, "duplicate 'lhs'");
        r.lhs = q.formula();
      } else if (q.accept_word("rhs")) {
        if (!r.cases.empty()) q.fail(ErrorKind::SyntaxError, kw, "'rhs' cannot be combined with other cases");
        plain = true;
        r.cases.push_back({build::truth(), q.formula()});
      } else if (q.accept_word("when")) {
        if (plain) q.fail(ErrorKind::SyntaxError, kw, "'when' cannot follow 'rhs'");
        RewriteCase c;
        c.condition = q.formula();
        q.expect("=>");
        c.rhs = q.formula();
        r.cases.push_back(std::move(c));
      } else {
        q.fail(ErrorKind::SyntaxError, kw, "expected 'lhs', 'rhs' or 'when'");
      }
      q.expect_end();
    }
    if (!r.lhs || r.cases.empty())
      p.fail(ErrorKind::SyntaxError, at, "rewrite rule '" + r.name + "' needs 'lhs' and a right-hand side");
    t_.rewrite_rules.push_back(std::move(r));
  }

  void inference(Parser& p) {
    const Token at = p.peek();
    InferenceRule r;
    r.name = p.identifier("a rule name");
    claim(r.name, p, at);
    while (!p.at_end()) {
      const Token flag = p.peek();
      if (p.accept_word("automatic")) r.automatic = true;
      else if (p.accept_word("manual")) r.automatic = false;
      else if (p.accept_word("forward")) r.applicability = Applicability::Forward;
      else if (p.accept_word("backward")) r.applicability = Applicability::Backward;
      else if (p.accept_word("both")) r.applicability = Applicability::Both;
      else p.fail(ErrorKind::SyntaxError, flag, "unknown inference property '" + flag.text + "'");
    }
    for (const Line& line : block()) {
      Parser q = parser(line);
      const Token kw = q.peek();
      if (q.accept_word("given")) {
        if (r.infer) q.fail(ErrorKind::SyntaxError, kw, "'given' must precede 'infer'");
        r.givens.push_back(q.formula());
      } else if (q.accept_word("infer")) {
        if (r.infer) q.fail(ErrorKind::SyntaxError, kw, "duplicate 'infer'");
        r.infer = q.formula();
      } else {
        q.fail(ErrorKind::SyntaxError, kw, "expected 'given' or 'infer'");
      }
      q.expect_end();
    }
    if (!r.infer) p.fail(ErrorKind::SyntaxError, at, "inference rule '" + r.name + "' needs 'infer'");
    t_.inference_rules.push_back(std::move(r));
  }

  std::string_view text_;
  std::string file_;
  std::vector<Line> lines_;
  std::size_t i_ = 0;
  Theory t_;
  FactoryPtr imported_;
  std::vector<ExtensionSignature> own_;
  std::set<std::string> names_;
  TypeScope scope_;
};

std::string print(const Formula& f) { return print_formula(f, PrintMode::Unicode); }

std::string typed_names(const std::vector<TypedName>& args) {
  std::string out;
  for (std::size_t i = 0; i < args.size(); ++i)
    out += (i ? ", " : "") + args[i].name + ": " + args[i].type.to_string();
  return out;
}

}  // namespace

Theory parse_theory(std::string_view text, const std::vector<FactoryPtr>& imports,
                    const std::string& file) {
  return TheoryReader(text, imports, file).read();
}

TheoryHeader read_theory_header(std::string_view text, const std::string& file) {
  return TheoryReader(text, {}, file).header_only();
}

std::string print_theory(const Theory& t) {
  std::string out = "theory " + t.name + "\n";
  if (!t.imports.empty()) {
    out += "imports";
    for (const auto& i : t.imports) out += " " + i;
    out += "\n";
  }
  if (!t.type_params.empty()) {
    out += "type parameters ";
    for (std::size_t i = 0; i < t.type_params.size(); ++i) out += (i ? ", " : "") + t.type_params[i];
    out += "\n";
  }
  for (const auto& dt : t.datatypes) {
    out += "\ndatatype " + dt.name;
    if (!dt.type_params.empty()) {
      out += "(";
      for (std::size_t i = 0; i < dt.type_params.size(); ++i) out += (i ? ", " : "") + dt.type_params[i];
      out += ")";
    }
    out += "\n";
    for (const auto& c : dt.constructors) {
      out += "  constructor " + c.name;
      if (!c.destructors.empty()) out += "(" + typed_names(c.destructors) + ")";
      out += "\n";
    }
  }
  if (!t.axiomatic_types.empty()) out += "\n";
  for (const auto& a : t.axiomatic_types) out += "axiomatic type " + a.name + "\n";
  for (const auto& op : t.operators) {
    const OperatorSig& s = op.signature;
    out += "\noperator " + s.name;
    if (!s.args.empty()) out += "(" + typed_names(s.args) + ")";
    out += s.result ? " : " + s.result->to_string() : " predicate";
    if (s.notation == Notation::Infix) out += " infix";
    if (s.associative) out += " associative";
    if (s.commutative) out += " commutative";
    if (s.symbol) out += " symbol \"" + *s.symbol + "\"";
    out += "\n";
    if (op.wd_condition) out += "  wd " + print(*op.wd_condition) + "\n";
    if (const auto* d = std::get_if<DirectDefinition>(&op.definition)) {
      out += "  direct " + print(d->body) + "\n";
    } else if (const auto* ind = std::get_if<InductiveDefinition>(&op.definition)) {
      out += "  inductive " + ind->scrutinee + "\n";
      for (const auto& c : ind->cases) {
        out += "  case " + c.constructor;
        if (!c.binders.empty()) {
          out += "(";
          for (std::size_t i = 0; i < c.binders.size(); ++i) out += (i ? ", " : "") + c.binders[i];
          out += ")";
        }
        out += " => " + print(c.body) + "\n";
      }
    }
  }
  if (!t.axioms.empty()) out += "\n";
  for (const auto& a : t.axioms) out += "axiom " + a.name + ": " + print(a.formula) + "\n";
  for (const auto& r : t.rewrite_rules) {
    out += "\nrewrite " + r.name + (r.automatic ? " automatic" : " manual") +
           (r.complete ? " complete" : " incomplete") + "\n";
    out += "  lhs " + print(r.lhs) + "\n";
    if (r.cases.size() == 1 && r.cases[0].condition.tag() == Tag::True) {
      out += "  rhs " + print(r.cases[0].rhs) + "\n";
    } else {
      for (const auto& c : r.cases)
        out += "  when " + print(c.condition) + " => " + print(c.rhs) + "\n";
    }
  }
  for (const auto& r : t.inference_rules) {
    out += "\ninference " + r.name + (r.automatic ? " automatic " : " manual ") +
           std::string(to_string(r.applicability)) + "\n";
    for (const auto& g : r.givens) out += "  given " + print(g) + "\n";
    out += "  infer " + print(r.infer) + "\n";
  }
  return out;
}

}  // namespace theoria
