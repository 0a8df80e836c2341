#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "theoria/factory.hpp"
#include "theoria/type.hpp"

namespace theoria {

enum class Tag {
  // predicates
  True,
  False,
  Not,
  And,  // n-ary, flattened
  Or,   // n-ary, flattened
  Implies,
  Iff,
  Forall,
  Exists,
  Equal,
  In,
  Subset,
  // expressions
  Ident,
  IntLit,
  BoolLit,
  IntegerSet,  // ℤ
  BoolSet,     // BOOL
  EmptySet,
  SetExt,
  Plus,
  Minus,
  Mul,
  Div,
  Neg,
  Range,
  Maplet,
  Pow,
  CProd,
  Union,
  Inter,
  FComp,  // forward composition, n-ary, flattened
  // extensions
  ExtOp,        // operator application; predicate or expression per signature
  Constructor,  // datatype constructor application
  Destructor,   // datatype destructor application
  ExtSet,       // the set denoted by an extension type: List(T), Real
};

std::string_view tag_name(Tag tag);
std::optional<Tag> tag_from_name(std::string_view name);

struct BoundIdent {
  std::string name;
  std::optional<Type> type;
};

// Tree path of child indices; the empty path is the root. Bound identifier
// lists are not children.
using Position = std::vector<std::size_t>;
std::string position_to_string(const Position& pos);
Position position_from_string(std::string_view text);

struct Payload {
  std::string name;                 // Ident, ExtOp, Constructor, Destructor, ExtSet
  std::int64_t value = 0;           // IntLit; BoolLit (0/1)
  std::vector<BoundIdent> bound;    // Forall, Exists
  std::optional<Type> type;         // expressions: annotation (ascription or inferred)
  bool ascribed = false;            // written with an explicit `⦂ type` in source
};

// Immutable, shared AST node. Every node records the formula factory it was
// built with, which includes the factories of all its children.
class Formula {
 public:
  Formula() = default;

  explicit operator bool() const { return node_ != nullptr; }

  Tag tag() const { return node_->tag; }
  const std::vector<Formula>& children() const { return node_->children; }
  const Formula& child(std::size_t i) const { return node_->children.at(i); }
  std::size_t arity() const { return node_->children.size(); }
  const std::string& name() const { return node_->payload.name; }
  std::int64_t value() const { return node_->payload.value; }
  const std::vector<BoundIdent>& bound() const { return node_->payload.bound; }
  const std::optional<Type>& type() const { return node_->payload.type; }
  const Payload& payload() const { return node_->payload; }
  const FactoryPtr& factory() const { return node_->factory; }

  bool is_predicate() const { return node_->predicate; }
  bool is_expression() const { return !node_->predicate; }

  // Copies with one aspect changed; the factory is kept (and widened by new children).
  Formula with_type(std::optional<Type> type) const;
  Formula with_children(std::vector<Formula> children) const;
  Formula with_payload(Payload payload) const;

  bool same_node(const Formula& other) const { return node_ == other.node_; }

  // Structural equality. Bound names compare literally; type annotations are
  // compared only where both sides carry one.
  friend bool operator==(const Formula& a, const Formula& b);
  friend bool operator!=(const Formula& a, const Formula& b) { return !(a == b); }

 private:
  struct Node {
    Tag tag;
    std::vector<Formula> children;
    Payload payload;
    FactoryPtr factory;
    bool predicate;
  };
  friend Formula mk_node(Tag, std::vector<Formula>, Payload, const FactoryPtr&);
  explicit Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  std::shared_ptr<const Node> node_;
};

// Builds a node. `ambient` must declare the extension for ExtOp, Constructor,
// Destructor and ExtSet nodes and may be null otherwise. The node's factory is
// the union of `ambient` and every child's factory.
// Throws IncompatibleFactories, ArityMismatch, KindMismatch, UnknownExtension.
Formula mk_node(Tag tag, std::vector<Formula> children, Payload payload = {},
                const FactoryPtr& ambient = nullptr);

// Shorthands for core nodes.
namespace build {
Formula truth();
Formula falsity();
Formula ident(std::string name, std::optional<Type> type = std::nullopt);
Formula integer(std::int64_t value);
Formula unary(Tag tag, Formula child);
Formula binary(Tag tag, Formula left, Formula right);
Formula nary(Tag tag, std::vector<Formula> children);
// ⊤-eliminating conjunction / disjunction; empty conjunction is ⊤, empty disjunction ⊥.
Formula conjunction(std::vector<Formula> conjuncts);
Formula disjunction(std::vector<Formula> disjuncts);
Formula not_equal(Formula left, Formula right);
Formula quantified(Tag tag, std::vector<BoundIdent> bound, Formula body);
}  // namespace build

bool is_binder(Tag tag);
bool is_flattened(const Formula& f);  // ∧, ∨, ;, associative extension operators

std::set<std::string> free_identifiers(const Formula& f);
bool occurs_free(const std::string& name, const Formula& f);

// Throws InvalidPosition.
const Formula& subformula_at(const Formula& f, const Position& pos);
Formula replace_at(const Formula& f, const Position& pos, const Formula& replacement);
// Identifiers bound by binders strictly above `pos`, outermost first.
std::vector<BoundIdent> bound_above(const Formula& f, const Position& pos);

// Every position in pre-order (leftmost-outermost first).
std::vector<Position> all_positions(const Formula& f);

// The operands [first, first+count) of a flattened node: the single operand
// when count is 1, otherwise a node of the same operator over the run.
Formula assoc_run(const Formula& parent, std::size_t first, std::size_t count);

}  // namespace theoria
