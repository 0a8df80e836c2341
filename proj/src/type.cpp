#include "theoria/type.hpp"

#include <optional>
#include <tuple>

namespace theoria {

Type Type::make(Kind kind, std::string name, std::vector<Type> args, int meta) {
  return Type(std::make_shared<const Node>(Node{kind, std::move(name), std::move(args), meta}));
}

Type Type::integer() {
  static const Type t = make(Kind::Int, "", {});
  return t;
}
Type Type::boolean() {
  static const Type t = make(Kind::Bool, "", {});
  return t;
}
Type Type::param(std::string name) { return make(Kind::Param, std::move(name), {}); }
Type Type::given(std::string name) { return make(Kind::Given, std::move(name), {}); }
Type Type::power(Type inner) { return make(Kind::Power, "", {std::move(inner)}); }
Type Type::product(Type left, Type right) {
  return make(Kind::Product, "", {std::move(left), std::move(right)});
}
Type Type::datatype(std::string name, std::vector<Type> args) {
  return make(Kind::Datatype, std::move(name), std::move(args));
}
Type Type::meta(int id) { return make(Kind::Meta, "", {}, id); }

bool Type::has_params() const {
  if (kind() == Kind::Param) return true;
  for (const auto& a : args())
    if (a.has_params()) return true;
  return false;
}

bool Type::has_metas() const {
  if (kind() == Kind::Meta) return true;
  for (const auto& a : args())
    if (a.has_metas()) return true;
  return false;
}

void Type::collect_params(std::set<std::string>& out) const {
  if (kind() == Kind::Param) out.insert(name());
  for (const auto& a : args()) a.collect_params(out);
}

Type Type::map_leaves(const std::function<std::optional<Type>(const Type&)>& fn) const {
  if (auto replaced = fn(*this)) return *replaced;
  if (args().empty()) return *this;
  std::vector<Type> mapped;
  mapped.reserve(args().size());
  bool changed = false;
  for (const auto& a : args()) {
    mapped.push_back(a.map_leaves(fn));
    changed = changed || mapped.back().node_ != a.node_;
  }
  if (!changed) return *this;
  return make(kind(), name(), std::move(mapped), meta_id());
}

Type Type::substitute_params(const std::map<std::string, Type>& map) const {
  if (map.empty()) return *this;
  return map_leaves([&](const Type& t) -> std::optional<Type> {
    if (t.kind() == Kind::Param) {
      if (auto it = map.find(t.name()); it != map.end()) return it->second;
    }
    return std::nullopt;
  });
}

namespace {

// Precedence: × binds looser than ℙ(...) and type application.
void print(const Type& t, std::string& out, bool in_product_right) {
  switch (t.kind()) {
    case Type::Kind::Int: out += "ℤ"; return;
    case Type::Kind::Bool: out += "BOOL"; return;
    case Type::Kind::Param:
    case Type::Kind::Given: out += t.name(); return;
    case Type::Kind::Meta: out += "?" + std::to_string(t.meta_id()); return;
    case Type::Kind::Power:
      out += "ℙ(";
      print(t.inner(), out, false);
      out += ")";
      return;
    case Type::Kind::Product:
      if (in_product_right) out += "(";
      print(t.left(), out, false);
      out += "×";
      print(t.right(), out, true);
      if (in_product_right) out += ")";
      return;
    case Type::Kind::Datatype:
      out += t.name();
      if (!t.args().empty()) {
        out += "(";
        for (std::size_t i = 0; i < t.args().size(); ++i) {
          if (i) out += ", ";
          print(t.args()[i], out, false);
        }
        out += ")";
      }
      return;
  }
}

}  // namespace

std::string Type::to_string() const {
  std::string out;
  print(*this, out, false);
  return out;
}

bool operator==(const Type& a, const Type& b) {
  if (a.node_ == b.node_) return true;
  if (a.kind() != b.kind() || a.name() != b.name() || a.meta_id() != b.meta_id()) return false;
  return a.args() == b.args();
}

bool operator<(const Type& a, const Type& b) {
  if (a.node_ == b.node_) return false;
  return std::tie(a.node_->kind, a.node_->name, a.node_->meta, a.node_->args) <
         std::tie(b.node_->kind, b.node_->name, b.node_->meta, b.node_->args);
}

}  // namespace theoria
