#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace theoria {

// Types of the extended language. A relation A↔B is PowerSet(Product(A, B)).
// `Meta` is an inference variable; it never escapes the typechecker.
class Type {
 public:
  enum class Kind { Int, Bool, Param, Given, Power, Product, Datatype, Meta };

  static Type integer();
  static Type boolean();
  static Type param(std::string name);
  static Type given(std::string name);
  static Type power(Type inner);
  static Type product(Type left, Type right);
  static Type datatype(std::string name, std::vector<Type> args);
  static Type meta(int id);

  Kind kind() const { return node_->kind; }
  const std::string& name() const { return node_->name; }
  const std::vector<Type>& args() const { return node_->args; }
  int meta_id() const { return node_->meta; }

  // Power: inner(); Product: left()/right().
  const Type& inner() const { return node_->args.at(0); }
  const Type& left() const { return node_->args.at(0); }
  const Type& right() const { return node_->args.at(1); }

  bool is_power() const { return kind() == Kind::Power; }
  bool is_relation() const { return is_power() && inner().kind() == Kind::Product; }

  bool has_params() const;
  bool has_metas() const;
  void collect_params(std::set<std::string>& out) const;

  // Replaces every Param present in `map`; everything else is rebuilt structurally.
  Type substitute_params(const std::map<std::string, Type>& map) const;
  Type map_leaves(const std::function<std::optional<Type>(const Type&)>& fn) const;

  std::string to_string() const;

  friend bool operator==(const Type& a, const Type& b);
  friend bool operator<(const Type& a, const Type& b);

 private:
  struct Node {
    Kind kind;
    std::string name;
    std::vector<Type> args;
    int meta = -1;
  };
  explicit Type(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  static Type make(Kind kind, std::string name, std::vector<Type> args, int meta = -1);

  std::shared_ptr<const Node> node_;
};

inline bool operator!=(const Type& a, const Type& b) { return !(a == b); }

}  // namespace theoria
