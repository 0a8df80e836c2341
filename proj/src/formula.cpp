#include "theoria/formula.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <utility>

#include "theoria/error.hpp"

namespace theoria {

namespace {

struct TagInfo {
  Tag tag;
  const char* name;
};

constexpr std::array kTags{
    TagInfo{Tag::True, "true"},         TagInfo{Tag::False, "false"},
    TagInfo{Tag::Not, "not"},           TagInfo{Tag::And, "and"},
    TagInfo{Tag::Or, "or"},             TagInfo{Tag::Implies, "implies"},
    TagInfo{Tag::Iff, "iff"},           TagInfo{Tag::Forall, "forall"},
    TagInfo{Tag::Exists, "exists"},     TagInfo{Tag::Equal, "equal"},
    TagInfo{Tag::In, "in"},             TagInfo{Tag::Subset, "subset"},
    TagInfo{Tag::Ident, "id"},          TagInfo{Tag::IntLit, "int"},
    TagInfo{Tag::BoolLit, "bool"},      TagInfo{Tag::IntegerSet, "INT"},
    TagInfo{Tag::BoolSet, "BOOL"},      TagInfo{Tag::EmptySet, "empty"},
    TagInfo{Tag::SetExt, "setext"},     TagInfo{Tag::Plus, "plus"},
    TagInfo{Tag::Minus, "minus"},       TagInfo{Tag::Mul, "mul"},
    TagInfo{Tag::Div, "div"},           TagInfo{Tag::Neg, "neg"},
    TagInfo{Tag::Range, "range"},       TagInfo{Tag::Maplet, "maplet"},
    TagInfo{Tag::Pow, "pow"},           TagInfo{Tag::CProd, "cprod"},
    TagInfo{Tag::Union, "union"},       TagInfo{Tag::Inter, "inter"},
    TagInfo{Tag::FComp, "fcomp"},       TagInfo{Tag::ExtOp, "op"},
    TagInfo{Tag::Constructor, "cons"},  TagInfo{Tag::Destructor, "dest"},
    TagInfo{Tag::ExtSet, "extset"},
};

enum class Shape { Pred, Expr };

struct Rule {
  int min;
  int max;  // -1: unbounded
  Shape children;
  Shape result;
};

Rule core_rule(Tag tag) {
  switch (tag) {
    case Tag::True:
    case Tag::False: return {0, 0, Shape::Pred, Shape::Pred};
    case Tag::Not: return {1, 1, Shape::Pred, Shape::Pred};
    case Tag::And:
    case Tag::Or: return {2, -1, Shape::Pred, Shape::Pred};
    case Tag::Implies:
    case Tag::Iff: return {2, 2, Shape::Pred, Shape::Pred};
    case Tag::Forall:
    case Tag::Exists: return {1, 1, Shape::Pred, Shape::Pred};
    case Tag::Equal:
    case Tag::In:
    case Tag::Subset: return {2, 2, Shape::Expr, Shape::Pred};
    case Tag::Ident:
    case Tag::IntLit:
    case Tag::BoolLit:
    case Tag::IntegerSet:
    case Tag::BoolSet:
    case Tag::EmptySet: return {0, 0, Shape::Expr, Shape::Expr};
    case Tag::SetExt: return {1, -1, Shape::Expr, Shape::Expr};
    case Tag::Neg:
    case Tag::Pow: return {1, 1, Shape::Expr, Shape::Expr};
    case Tag::FComp: return {2, -1, Shape::Expr, Shape::Expr};
    default: return {2, 2, Shape::Expr, Shape::Expr};
  }
}

bool is_extension(Tag tag) {
  return tag == Tag::ExtOp || tag == Tag::Constructor || tag == Tag::Destructor ||
         tag == Tag::ExtSet;
}

// Arity and result shape of an extension node, read off its signature.
Rule extension_rule(Tag tag, const std::string& name, const FormulaFactory& f) {
  switch (tag) {
    case Tag::ExtOp: {
      const auto* op = f.find_operator(name);
      if (!op) break;
      const int n = static_cast<int>(op->args.size());
      return {n, op->associative ? -1 : n, Shape::Expr,
              op->is_predicate() ? Shape::Pred : Shape::Expr};
    }
    case Tag::Constructor: {
      auto ref = f.find_constructor(name);
      if (!ref) break;
      const int n = static_cast<int>(ref->datatype->constructors[ref->constructor].destructors.size());
      return {n, n, Shape::Expr, Shape::Expr};
    }
    case Tag::Destructor:
      if (!f.find_destructor(name)) break;
      return {1, 1, Shape::Expr, Shape::Expr};
    case Tag::ExtSet: {
      if (const auto* dt = f.find_datatype(name)) {
        const int n = static_cast<int>(dt->type_params.size());
        return {n, n, Shape::Expr, Shape::Expr};
      }
      if (f.is_axiomatic_type(name)) return {0, 0, Shape::Expr, Shape::Expr};
      break;
    }
    default: break;
  }
  throw Error(ErrorKind::UnknownExtension, name,
              "'" + name + "' is not a " + std::string(tag_name(tag)) + " of this factory");
}

bool flattens(Tag tag, const std::string& name, const FormulaFactory* f) {
  if (tag == Tag::And || tag == Tag::Or || tag == Tag::FComp) return true;
  if (tag == Tag::ExtOp && f) {
    const auto* op = f->find_operator(name);
    return op && op->associative;
  }
  return false;
}

}  // namespace

std::string_view tag_name(Tag tag) {
  for (const auto& info : kTags)
    if (info.tag == tag) return info.name;
  return "?";
}

std::optional<Tag> tag_from_name(std::string_view name) {
  for (const auto& info : kTags)
    if (name == info.name) return info.tag;
  return std::nullopt;
}

std::string position_to_string(const Position& pos) {
  std::string out;
  for (std::size_t i = 0; i < pos.size(); ++i) {
    if (i) out += '.';
    out += std::to_string(pos[i]);
  }
  return out;
}

Position position_from_string(std::string_view text) {
  Position pos;
  if (text.empty()) return pos;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('.', start);
    if (end == std::string_view::npos) end = text.size();
    std::size_t value = 0;
    auto [ptr, ec] = std::from_chars(text.data() + start, text.data() + end, value);
    if (ec != std::errc() || ptr != text.data() + end || end == start)
      throw Error(ErrorKind::InvalidPosition, std::string(text),
                  "malformed position '" + std::string(text) + "'");
    pos.push_back(value);
    start = end + 1;
  }
  return pos;
}

Formula mk_node(Tag tag, std::vector<Formula> children, Payload payload,
                const FactoryPtr& ambient) {
  FactoryPtr factory = ambient ? ambient : FormulaFactory::core();
  for (const auto& c : children) {
    if (!c) throw Error(ErrorKind::ArityMismatch, "null child in " + std::string(tag_name(tag)));
    factory = factory_union(factory, c.factory());
  }

  Rule rule = core_rule(tag);
  if (is_extension(tag)) {
    if (!ambient)
      throw Error(ErrorKind::UnknownExtension, payload.name,
                  "no factory given for extension '" + payload.name + "'");
    rule = extension_rule(tag, payload.name, *ambient);
  }

  if (flattens(tag, payload.name, factory.get())) {
    std::vector<Formula> flat;
    for (auto& c : children) {
      if (c.tag() == tag && c.name() == payload.name)
        flat.insert(flat.end(), c.children().begin(), c.children().end());
      else
        flat.push_back(std::move(c));
    }
    children = std::move(flat);
  }

  const int n = static_cast<int>(children.size());
  if (n < rule.min || (rule.max >= 0 && n > rule.max))
    throw Error(ErrorKind::ArityMismatch, payload.name,
                std::string(tag_name(tag)) + (payload.name.empty() ? "" : " " + payload.name) +
                    " given " + std::to_string(n) + " operand(s)");
  for (const auto& c : children) {
    if (c.is_predicate() != (rule.children == Shape::Pred))
      throw Error(ErrorKind::KindMismatch, payload.name,
                  std::string(tag_name(tag)) + " expects " +
                      (rule.children == Shape::Pred ? "predicate" : "expression") + " operands");
  }
  if (is_binder(tag) && payload.bound.empty())
    throw Error(ErrorKind::ArityMismatch, "quantifier without bound identifiers");
  if (tag == Tag::Ident && payload.name.empty())
    throw Error(ErrorKind::ArityMismatch, "identifier without a name");

  const bool predicate = rule.result == Shape::Pred;
  if (predicate) payload.type.reset();
  return Formula(std::make_shared<const Formula::Node>(
      Formula::Node{tag, std::move(children), std::move(payload), std::move(factory), predicate}));
}

Formula Formula::with_type(std::optional<Type> type) const {
  if (is_predicate() || node_->payload.type == type) return *this;
  auto node = std::make_shared<Node>(*node_);
  node->payload.type = std::move(type);
  return Formula(std::move(node));
}

Formula Formula::with_children(std::vector<Formula> children) const {
  bool same = children.size() == node_->children.size();
  for (std::size_t i = 0; same && i < children.size(); ++i)
    same = children[i].same_node(node_->children[i]);
  if (same) return *this;
  return mk_node(tag(), std::move(children), payload(), factory());
}

Formula Formula::with_payload(Payload payload) const {
  return mk_node(tag(), children(), std::move(payload), factory());
}

bool operator==(const Formula& a, const Formula& b) {
  if (a.node_ == b.node_) return true;
  if (!a.node_ || !b.node_) return false;
  if (a.tag() != b.tag() || a.name() != b.name() || a.value() != b.value()) return false;
  if (a.type() && b.type() && *a.type() != *b.type()) return false;
  if (a.bound().size() != b.bound().size()) return false;
  for (std::size_t i = 0; i < a.bound().size(); ++i) {
    const auto& x = a.bound()[i];
    const auto& y = b.bound()[i];
    if (x.name != y.name) return false;
    if (x.type && y.type && *x.type != *y.type) return false;
  }
  return a.children() == b.children();
}

namespace build {

Formula truth() {
  static const Formula f = mk_node(Tag::True, {});
  return f;
}
Formula falsity() {
  static const Formula f = mk_node(Tag::False, {});
  return f;
}
Formula ident(std::string name, std::optional<Type> type) {
  Payload p;
  p.name = std::move(name);
  p.type = std::move(type);
  return mk_node(Tag::Ident, {}, std::move(p));
}
Formula integer(std::int64_t value) {
  Payload p;
  p.value = value;
  p.type = Type::integer();
  return mk_node(Tag::IntLit, {}, std::move(p));
}
Formula unary(Tag tag, Formula child) { return mk_node(tag, {std::move(child)}); }
Formula binary(Tag tag, Formula left, Formula right) {
  return mk_node(tag, {std::move(left), std::move(right)});
}
Formula nary(Tag tag, std::vector<Formula> children) {
  if (children.size() == 1) return children.front();
  return mk_node(tag, std::move(children));
}

Formula conjunction(std::vector<Formula> conjuncts) {
  std::vector<Formula> kept;
  for (auto& c : conjuncts) {
    if (c.tag() == Tag::True) continue;
    if (c.tag() == Tag::And) {
      for (const auto& cc : c.children())
        if (std::find(kept.begin(), kept.end(), cc) == kept.end()) kept.push_back(cc);
      continue;
    }
    if (std::find(kept.begin(), kept.end(), c) == kept.end()) kept.push_back(std::move(c));
  }
  if (kept.empty()) return truth();
  return nary(Tag::And, std::move(kept));
}

Formula disjunction(std::vector<Formula> disjuncts) {
  if (disjuncts.empty()) return falsity();
  return nary(Tag::Or, std::move(disjuncts));
}

Formula not_equal(Formula left, Formula right) {
  return unary(Tag::Not, binary(Tag::Equal, std::move(left), std::move(right)));
}

Formula quantified(Tag tag, std::vector<BoundIdent> bound, Formula body) {
  Payload p;
  p.bound = std::move(bound);
  return mk_node(tag, {std::move(body)}, std::move(p));
}

}  // namespace build

bool is_binder(Tag tag) { return tag == Tag::Forall || tag == Tag::Exists; }

bool is_flattened(const Formula& f) { return flattens(f.tag(), f.name(), f.factory().get()); }

namespace {

void collect_free(const Formula& f, std::vector<std::string>& bound, std::set<std::string>& out) {
  if (f.tag() == Tag::Ident) {
    if (std::find(bound.begin(), bound.end(), f.name()) == bound.end()) out.insert(f.name());
    return;
  }
  const std::size_t mark = bound.size();
  for (const auto& b : f.bound()) bound.push_back(b.name);
  for (const auto& c : f.children()) collect_free(c, bound, out);
  bound.resize(mark);
}

}  // namespace

std::set<std::string> free_identifiers(const Formula& f) {
  std::set<std::string> out;
  std::vector<std::string> bound;
  collect_free(f, bound, out);
  return out;
}

bool occurs_free(const std::string& name, const Formula& f) {
  return free_identifiers(f).count(name) > 0;
}

const Formula& subformula_at(const Formula& f, const Position& pos) {
  const Formula* cur = &f;
  for (std::size_t i : pos) {
    if (i >= cur->arity())
      throw Error(ErrorKind::InvalidPosition, position_to_string(pos),
                  "position " + position_to_string(pos) + " is outside the formula");
    cur = &cur->child(i);
  }
  return *cur;
}

namespace {

Formula replace_rec(const Formula& f, const Position& pos, std::size_t depth,
                    const Formula& replacement) {
  if (depth == pos.size()) return replacement;
  const std::size_t i = pos[depth];
  if (i >= f.arity())
    throw Error(ErrorKind::InvalidPosition, position_to_string(pos),
                "position " + position_to_string(pos) + " is outside the formula");
  std::vector<Formula> children = f.children();
  children[i] = replace_rec(children[i], pos, depth + 1, replacement);
  return f.with_children(std::move(children));
}

void positions_rec(const Formula& f, Position& cur, std::vector<Position>& out) {
  out.push_back(cur);
  for (std::size_t i = 0; i < f.arity(); ++i) {
    cur.push_back(i);
    positions_rec(f.child(i), cur, out);
    cur.pop_back();
  }
}

}  // namespace

Formula replace_at(const Formula& f, const Position& pos, const Formula& replacement) {
  return replace_rec(f, pos, 0, replacement);
}

std::vector<BoundIdent> bound_above(const Formula& f, const Position& pos) {
  std::vector<BoundIdent> out;
  const Formula* cur = &f;
  for (std::size_t i : pos) {
    for (const auto& b : cur->bound()) out.push_back(b);
    if (i >= cur->arity())
      throw Error(ErrorKind::InvalidPosition, position_to_string(pos),
                  "position " + position_to_string(pos) + " is outside the formula");
    cur = &cur->child(i);
  }
  return out;
}

std::vector<Position> all_positions(const Formula& f) {
  std::vector<Position> out;
  Position cur;
  positions_rec(f, cur, out);
  return out;
}

Formula assoc_run(const Formula& parent, std::size_t first, std::size_t count) {
  if (count == 1) return parent.child(first);
  std::vector<Formula> run(parent.children().begin() + first,
                           parent.children().begin() + first + count);
  Payload p = parent.payload();
  p.type.reset();
  p.ascribed = false;
  if (parent.tag() == Tag::FComp) {
    // ℙ(A×B) ; … ; ℙ(Y×Z) has type ℙ(A×Z)
    const auto& a = run.front().type();
    const auto& z = run.back().type();
    if (a && z && a->is_relation() && z->is_relation())
      p.type = Type::power(Type::product(a->inner().left(), z->inner().right()));
  } else if (parent.type()) {
    p.type = parent.type();
  }
  return mk_node(parent.tag(), std::move(run), std::move(p), parent.factory());
}

}  // namespace theoria
