#include "syntax.hpp"

#include <algorithm>
#include <array>
#include <charconv>

namespace theoria::syntax {

namespace {

// Binding strength, loosest first; shared with the printer's table.
enum Level : int {
  kIff = 1,
  kImplies,
  kOr,
  kAnd,
  kNot,
  kQuantifier,
  kCompare,
  kSetOp,
  kUserInfix,
  kCompose,
  kMaplet,
  kRange,
  kAdditive,
  kMultiplicative,
  kUnaryMinus,
  kAtom,
};

constexpr std::array<std::string_view, 36> kCoreSymbols{
    "⊤", "⊥", "¬", "∧", "∨", "⇒", "⇔", "∀", "∃", "·", "=", "≠", "∈", "⊆", "ℤ", "ℙ", "×", "∪",
    "∩", ";", "↦", "‥", "+", "−", "-", "=>", "*", "÷", "∅", "{", "}", "(", ")", ",", "⦂", ":",
};

bool ident_start(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }
bool ident_char(char c) { return ident_start(c) || (c >= '0' && c <= '9') || c == '\''; }
bool digit(char c) { return c >= '0' && c <= '9'; }

std::size_t code_points(std::string_view text) {
  return static_cast<std::size_t>(std::count_if(
      text.begin(), text.end(), [](char c) { return (static_cast<unsigned char>(c) & 0xC0) != 0x80; }));
}

std::size_t utf8_length(unsigned char lead) {
  if (lead < 0x80) return 1;
  if ((lead >> 5) == 0x6) return 2;
  if ((lead >> 4) == 0xE) return 3;
  if ((lead >> 3) == 0x1E) return 4;
  return 1;
}

}  // namespace

SourceSpan Source::span(std::size_t start, std::size_t end) const {
  const std::size_t a = std::min(base + start, whole.size());
  const std::size_t b = std::min(base + end, whole.size());
  return SourceSpan{file, code_points(whole.substr(0, a)), code_points(whole.substr(0, b))};
}

std::vector<Token> tokenize(std::string_view text, const FormulaFactory& factory,
                            const Source& source) {
  std::vector<std::string_view> declared;
  for (const auto& [name, ext] : factory.extensions()) {
    const auto* op = std::get_if<OperatorSig>(&ext);
    if (op && op->symbol && !op->symbol->empty() && !ident_start(op->symbol->front()))
      declared.push_back(*op->symbol);
  }
  // Longest match first.
  std::sort(declared.begin(), declared.end(),
            [](std::string_view a, std::string_view b) { return a.size() > b.size(); });

  std::vector<Token> out;
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      ++i;
      continue;
    }
    const std::size_t start = i;
    if (ident_start(c)) {
      while (i < text.size() && ident_char(text[i])) ++i;
      out.push_back({TokenKind::Ident, std::string(text.substr(start, i - start)), start, i});
      continue;
    }
    if (digit(c)) {
      while (i < text.size() && digit(text[i])) ++i;
      out.push_back({TokenKind::Int, std::string(text.substr(start, i - start)), start, i});
      continue;
    }
    if (c == '"') {
      const std::size_t close = text.find('"', i + 1);
      if (close == std::string_view::npos)
        throw ParseError(ErrorKind::SyntaxError, source.span(start, text.size()), "",
                         "unterminated string");
      out.push_back({TokenKind::String, std::string(text.substr(i + 1, close - i - 1)), start,
                     close + 1});
      i = close + 1;
      continue;
    }
    const std::string_view rest = text.substr(i);
    auto matched = std::find_if(declared.begin(), declared.end(),
                                [&](std::string_view s) { return rest.starts_with(s); });
    if (matched != declared.end()) {
      i += matched->size();
      out.push_back({TokenKind::Symbol, std::string(*matched), start, i});
      continue;
    }
    std::string_view best;
    for (auto s : kCoreSymbols)
      if (rest.starts_with(s) && s.size() > best.size()) best = s;
    if (!best.empty()) {
      i += best.size();
      out.push_back({TokenKind::Symbol, best == "-" ? std::string("−") : std::string(best), start, i});
      continue;
    }
    const std::size_t len = std::min(utf8_length(static_cast<unsigned char>(c)), text.size() - i);
    throw ParseError(ErrorKind::SyntaxError, source.span(start, start + len),
                     std::string(text.substr(i, len)),
                     "unexpected character '" + std::string(text.substr(i, len)) + "'");
  }
  out.push_back({TokenKind::End, "", text.size(), text.size()});
  return out;
}

std::vector<Line> split_lines(std::string_view file) {
  std::vector<Line> out;
  std::size_t start = 0, number = 0;
  while (start <= file.size()) {
    std::size_t end = file.find('\n', start);
    if (end == std::string_view::npos) end = file.size();
    ++number;
    std::string_view raw = file.substr(start, end - start);
    bool quoted = false;
    for (std::size_t i = 0; i < raw.size(); ++i) {
      if (raw[i] == '"') quoted = !quoted;
      if (!quoted && raw.compare(i, 2, "//") == 0) {
        raw = raw.substr(0, i);
        break;
      }
    }
    std::size_t lead = 0;
    while (lead < raw.size() && (raw[lead] == ' ' || raw[lead] == '\t')) ++lead;
    std::size_t len = raw.size();
    while (len > lead && (raw[len - 1] == ' ' || raw[len - 1] == '\t' || raw[len - 1] == '\r')) --len;
    if (len > lead) out.push_back({raw.substr(lead, len - lead), start + lead, number, lead > 0});
    if (end == file.size()) break;
    start = end + 1;
  }
  return out;
}

struct Parser::Infix {
  enum class Assoc { None, Left, Flat, Chain };
  int level;
  Assoc assoc;
  Tag tag;
  bool negate = false;            // ≠
  const OperatorSig* op = nullptr;  // extension operators
};

Parser::Parser(std::string_view text, FactoryPtr factory, TypeScope scope, Source source)
    : factory_(factory ? std::move(factory) : FormulaFactory::core()),
      scope_(std::move(scope)),
      source_(std::move(source)) {
  if (source_.whole.empty()) source_.whole = text;
  tokens_ = tokenize(text, *factory_, source_);
}

const Token& Parser::peek(std::size_t ahead) const {
  return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)];
}

Token Parser::next() {
  Token t = peek();
  if (pos_ < tokens_.size() - 1) ++pos_;
  return t;
}

bool Parser::accept(std::string_view symbol) {
  if (peek().kind == TokenKind::Symbol && peek().text == symbol) {
    next();
    return true;
  }
  return false;
}

bool Parser::accept_word(std::string_view word) {
  if (peek().kind == TokenKind::Ident && peek().text == word) {
    next();
    return true;
  }
  return false;
}

void Parser::expect(std::string_view symbol) {
  if (!accept(symbol))
    fail(ErrorKind::SyntaxError, peek(),
         "expected '" + std::string(symbol) + "' but found " +
             (at_end() ? std::string("end of input") : "'" + peek().text + "'"));
}

void Parser::expect_end() {
  if (!at_end()) fail(ErrorKind::SyntaxError, peek(), "unexpected '" + peek().text + "'");
}

void Parser::fail(ErrorKind kind, const Token& at, const std::string& message) const {
  throw ParseError(kind, source_.span(at.start, at.end), at.text, message);
}

std::string Parser::identifier(const char* what) {
  if (peek().kind != TokenKind::Ident)
    fail(ErrorKind::SyntaxError, peek(), std::string("expected ") + what);
  return next().text;
}

std::optional<Parser::Infix> Parser::infix(const Token& t) const {
  using A = Infix::Assoc;
  if (t.kind == TokenKind::Symbol) {
    static const struct {
      std::string_view sym;
      int level;
      A assoc;
      Tag tag;
      bool negate;
    } table[] = {
        {"⇔", kIff, A::None, Tag::Iff, false},        {"⇒", kImplies, A::None, Tag::Implies, false},
        {"∨", kOr, A::Flat, Tag::Or, false},           {"∧", kAnd, A::Flat, Tag::And, false},
        {"=", kCompare, A::None, Tag::Equal, false},   {"≠", kCompare, A::None, Tag::Equal, true},
        {"∈", kCompare, A::None, Tag::In, false},      {"⊆", kCompare, A::None, Tag::Subset, false},
        {"∪", kSetOp, A::Left, Tag::Union, false},     {"∩", kSetOp, A::Left, Tag::Inter, false},
        {"×", kSetOp, A::Left, Tag::CProd, false},     {";", kCompose, A::Flat, Tag::FComp, false},
        {"↦", kMaplet, A::Left, Tag::Maplet, false},   {"‥", kRange, A::None, Tag::Range, false},
        {"+", kAdditive, A::Left, Tag::Plus, false},   {"−", kAdditive, A::Left, Tag::Minus, false},
        {"*", kMultiplicative, A::Left, Tag::Mul, false},
        {"÷", kMultiplicative, A::Left, Tag::Div, false},
    };
    for (const auto& row : table)
      if (t.text == row.sym) return Infix{row.level, row.assoc, row.tag, row.negate};
  }
  if (t.kind == TokenKind::Symbol || t.kind == TokenKind::Ident) {
    const OperatorSig* op = factory_->find_symbol(t.text);
    if (!op && t.kind == TokenKind::Ident) op = factory_->find_operator(t.text);
    if (op && op->notation == Notation::Infix)
      return Infix{op->is_predicate() ? kCompare : kUserInfix, A::Chain, Tag::ExtOp, false, op};
  }
  return std::nullopt;
}

Formula Parser::make(Tag tag, std::vector<Formula> children, Payload payload, const Token& at,
                     bool extension) {
  try {
    return mk_node(tag, std::move(children), std::move(payload), extension ? factory_ : nullptr);
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(e.kind(), source_.span(at.start, at.end), e.subject(), e.message());
  }
}

Formula Parser::formula() { return parse(0); }

Formula Parser::parse(int min_level) {
  Formula left = prefix();
  for (;;) {
    const Token op_token = peek();
    auto op = infix(op_token);
    if (!op || op->level < min_level) break;
    next();
    using A = Infix::Assoc;
    switch (op->assoc) {
      case A::None: {
        Formula right = parse(op->level + 1);
        left = make(op->tag, {left, right}, {}, op_token);
        if (op->negate) left = make(Tag::Not, {left}, {}, op_token);
        break;
      }
      case A::Left: {
        Formula right = parse(op->level + 1);
        left = make(op->tag, {left, right}, {}, op_token);
        break;
      }
      case A::Flat: {
        std::vector<Formula> operands{left, parse(op->level + 1)};
        while (accept(op_token.text)) operands.push_back(parse(op->level + 1));
        left = make(op->tag, std::move(operands), {}, op_token);
        break;
      }
      case A::Chain: {
        std::vector<Formula> operands{left, parse(op->level + 1)};
        for (;;) {
          auto more = infix(peek());
          if (!more || more->level != op->level || more->assoc != A::Chain) break;
          if (more->op != op->op)
            fail(ErrorKind::SyntaxError, peek(),
                 "infix operators '" + op->op->name + "' and '" + more->op->name +
                     "' cannot be mixed without parentheses");
          next();
          operands.push_back(parse(op->level + 1));
        }
        if (!op->op->associative && operands.size() != op->op->args.size())
          fail(ErrorKind::SyntaxError, op_token,
               "operator '" + op->op->name + "' takes " + std::to_string(op->op->args.size()) +
                   " operands");
        Payload p;
        p.name = op->op->name;
        left = make(Tag::ExtOp, std::move(operands), std::move(p), op_token, true);
        break;
      }
    }
    if (op->assoc == A::None || op->assoc == A::Chain) {
      auto after = infix(peek());
      if (after && after->level == op->level)
        fail(ErrorKind::SyntaxError, peek(),
             "'" + peek().text + "' is not associative with '" + op_token.text +
                 "'; use parentheses");
    }
  }
  return left;
}

std::vector<Formula> Parser::arguments() {
  expect("(");
  std::vector<Formula> args;
  if (accept(")")) return args;
  do {
    args.push_back(parse(0));
  } while (accept(","));
  expect(")");
  return args;
}

Formula Parser::maybe_ascription(Formula f) {
  if (!accept("⦂")) return f;
  if (!f.is_expression()) fail(ErrorKind::SyntaxError, peek(), "only expressions take a type");
  Payload p = f.payload();
  p.type = type();
  p.ascribed = true;
  return f.with_payload(std::move(p));
}

Formula Parser::prefix() {
  const Token t = next();
  if (t.kind == TokenKind::Int) {
    std::int64_t value = 0;
    auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), value);
    if (ec != std::errc()) fail(ErrorKind::SyntaxError, t, "integer literal out of range");
    Payload p;
    p.value = value;
    return make(Tag::IntLit, {}, std::move(p), t);
  }
  if (t.kind == TokenKind::Ident) {
    if (t.text == "BOOL") return make(Tag::BoolSet, {}, {}, t);
    if (t.text == "TRUE" || t.text == "FALSE") {
      Payload p;
      p.value = t.text == "TRUE";
      return make(Tag::BoolLit, {}, std::move(p), t);
    }
    return maybe_ascription(atom_name(t));
  }
  if (t.kind != TokenKind::Symbol)
    fail(ErrorKind::SyntaxError, t,
         t.kind == TokenKind::End ? "unexpected end of input" : "unexpected '" + t.text + "'");

  if (t.text == "⊤") return make(Tag::True, {}, {}, t);
  if (t.text == "⊥") return make(Tag::False, {}, {}, t);
  if (t.text == "¬") return make(Tag::Not, {parse(kNot)}, {}, t);
  if (t.text == "∀" || t.text == "∃") {
    Payload p;
    do {
      BoundIdent b{identifier("a bound identifier"), std::nullopt};
      if (accept("⦂")) b.type = type();
      p.bound.push_back(std::move(b));
    } while (accept(","));
    expect("·");
    Formula body = parse(0);
    return make(t.text == "∀" ? Tag::Forall : Tag::Exists, {body}, std::move(p), t);
  }
  if (t.text == "−") {
    if (peek().kind == TokenKind::Int && peek().start == t.end) {
      const Token lit = next();
      std::int64_t value = 0;
      const std::string digits = "-" + lit.text;
      auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
      if (ec != std::errc()) fail(ErrorKind::SyntaxError, lit, "integer literal out of range");
      Payload p;
      p.value = value;
      return make(Tag::IntLit, {}, std::move(p), t);
    }
    return make(Tag::Neg, {parse(kUnaryMinus)}, {}, t);
  }
  if (t.text == "(") {
    Formula inner = parse(0);
    expect(")");
    return inner;
  }
  if (t.text == "{") {
    std::vector<Formula> elements;
    do {
      elements.push_back(parse(0));
    } while (accept(","));
    expect("}");
    return maybe_ascription(make(Tag::SetExt, std::move(elements), {}, t));
  }
  if (t.text == "∅") return maybe_ascription(make(Tag::EmptySet, {}, {}, t));
  if (t.text == "ℤ") return make(Tag::IntegerSet, {}, {}, t);
  if (t.text == "ℙ") {
    expect("(");
    Formula inner = parse(0);
    expect(")");
    return make(Tag::Pow, {inner}, {}, t);
  }
  fail(ErrorKind::SyntaxError, t, "unexpected '" + t.text + "'");
}

Formula Parser::atom_name(const Token& t) {
  const std::string& name = t.text;
  Payload p;
  p.name = name;
  const OperatorSig* op = factory_->find_operator(name);
  auto ctor = factory_->find_constructor(name);
  auto dtor = factory_->find_destructor(name);
  const DatatypeSig* dt = factory_->find_datatype(name);
  const bool axiomatic = factory_->is_axiomatic_type(name);

  if (peek().kind == TokenKind::Symbol && peek().text == "(") {
    if (op) return make(Tag::ExtOp, arguments(), std::move(p), t, true);
    if (ctor) return make(Tag::Constructor, arguments(), std::move(p), t, true);
    if (dtor) return make(Tag::Destructor, arguments(), std::move(p), t, true);
    if (dt) return make(Tag::ExtSet, arguments(), std::move(p), t, true);
    if (axiomatic) fail(ErrorKind::SyntaxError, t, "type '" + name + "' takes no arguments");
    fail(ErrorKind::UnknownOperator, t, "unknown operator '" + name + "'");
  }
  if (op) {
    if (!op->args.empty())
      fail(ErrorKind::SyntaxError, t, "operator '" + name + "' needs arguments");
    return make(Tag::ExtOp, {}, std::move(p), t, true);
  }
  if (ctor) return make(Tag::Constructor, {}, std::move(p), t, true);
  if (dtor) fail(ErrorKind::SyntaxError, t, "destructor '" + name + "' needs an argument");
  if (dt) return make(Tag::ExtSet, {}, std::move(p), t, true);
  if (axiomatic) return make(Tag::ExtSet, {}, std::move(p), t, true);
  return make(Tag::Ident, {}, std::move(p), t);
}

Type Parser::type() { return type_product(); }

Type Parser::type_product() {
  Type left = type_atom();
  while (accept("×")) left = Type::product(left, type_atom());
  return left;
}

Type Parser::type_atom() {
  const Token t = next();
  if (t.kind == TokenKind::Symbol) {
    if (t.text == "ℤ") return Type::integer();
    if (t.text == "ℙ") {
      expect("(");
      Type inner = type();
      expect(")");
      return Type::power(inner);
    }
    if (t.text == "(") {
      Type inner = type();
      expect(")");
      return inner;
    }
  }
  if (t.kind != TokenKind::Ident) fail(ErrorKind::SyntaxError, t, "expected a type");
  if (t.text == "BOOL") return Type::boolean();

  auto type_args = [&](std::size_t arity) {
    std::vector<Type> args;
    if (arity > 0) {
      expect("(");
      do {
        args.push_back(type());
      } while (accept(","));
      expect(")");
    }
    if (args.size() != arity)
      fail(ErrorKind::UnknownType, t,
           "type '" + t.text + "' takes " + std::to_string(arity) + " argument(s)");
    return args;
  };
  if (!pending_name_.empty() && t.text == pending_name_)
    return Type::datatype(t.text, type_args(pending_arity_));
  if (const auto* dt = factory_->find_datatype(t.text))
    return Type::datatype(t.text, type_args(dt->type_params.size()));
  if (factory_->is_axiomatic_type(t.text)) return Type::given(t.text);
  if (scope_.type_params.count(t.text)) return Type::param(t.text);
  if (scope_.given_sets.count(t.text)) return Type::given(t.text);
  fail(ErrorKind::UnknownType, t, "unknown type '" + t.text + "'");
}

}  // namespace theoria::syntax

namespace theoria {

Formula parse_formula(std::string_view text, const FactoryPtr& factory, const TypeScope& scope) {
  syntax::Parser parser(text, factory, scope, syntax::Source{text, 0, ""});
  Formula f = parser.formula();
  parser.expect_end();
  return f;
}

Type parse_type(std::string_view text, const FactoryPtr& factory, const TypeScope& scope) {
  syntax::Parser parser(text, factory, scope, syntax::Source{text, 0, ""});
  Type t = parser.type();
  parser.expect_end();
  return t;
}

}  // namespace theoria
