#include "theoria/factory.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>

#include "theoria/error.hpp"

namespace theoria {

namespace {

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace

bool is_core_keyword(const std::string& name) {
  static const char* const keywords[] = {"BOOL", "TRUE", "FALSE"};
  return std::find(std::begin(keywords), std::end(keywords), name) != std::end(keywords);
}

FactoryPtr FormulaFactory::core() {
  static const FactoryPtr instance = make({});
  return instance;
}

FactoryPtr FormulaFactory::make(std::vector<ExtensionSignature> extensions) {
  std::shared_ptr<FormulaFactory> f(new FormulaFactory());
  for (auto& ext : extensions) {
    check_signature(ext);
    const std::string name = signature_name(ext);
    if (is_core_keyword(name))
      throw Error(ErrorKind::DuplicateExtension, name, "'" + name + "' is a core keyword");
    if (auto it = f->extensions_.find(name); it != f->extensions_.end()) {
      if (signature_equal(it->second, ext)) continue;
      throw Error(ErrorKind::DuplicateExtension, name, "extension '" + name + "' declared twice");
    }
    f->extensions_.emplace(name, std::move(ext));
  }

  auto claim = [&](const std::string& name, const std::string& owner) {
    if (is_core_keyword(name))
      throw Error(ErrorKind::DuplicateExtension, name, "'" + name + "' is a core keyword");
    auto [it, inserted] = f->owner_.emplace(name, owner);
    if (!inserted && it->second != owner)
      throw Error(ErrorKind::DuplicateExtension, name,
                  "name '" + name + "' claimed by both '" + it->second + "' and '" + owner + "'");
  };
  for (const auto& [name, ext] : f->extensions_) claim(name, name);
  for (const auto& [name, ext] : f->extensions_) {
    if (const auto* dt = std::get_if<DatatypeSig>(&ext)) {
      for (std::size_t c = 0; c < dt->constructors.size(); ++c) {
        const auto& ctor = dt->constructors[c];
        claim(ctor.name, name);
        f->constructors_[ctor.name] = {dt, c};
        for (std::size_t d = 0; d < ctor.destructors.size(); ++d) {
          claim(ctor.destructors[d].name, name);
          f->destructors_[ctor.destructors[d].name] = {dt, c, d};
        }
      }
    } else if (const auto* op = std::get_if<OperatorSig>(&ext)) {
      if (op->symbol) {
        claim(*op->symbol, name);
        f->symbols_[*op->symbol] = op;
      }
    }
  }

  std::string canon;
  for (const auto& [name, ext] : f->extensions_) canon += canonical_text(ext) + "\n";
  f->id_ = fnv1a_hex(canon);
  return f;
}

const ExtensionSignature* FormulaFactory::find(const std::string& name) const {
  auto it = extensions_.find(name);
  return it == extensions_.end() ? nullptr : &it->second;
}

const OperatorSig* FormulaFactory::find_operator(const std::string& name) const {
  const auto* ext = find(name);
  return ext ? std::get_if<OperatorSig>(ext) : nullptr;
}

const DatatypeSig* FormulaFactory::find_datatype(const std::string& name) const {
  const auto* ext = find(name);
  return ext ? std::get_if<DatatypeSig>(ext) : nullptr;
}

bool FormulaFactory::is_axiomatic_type(const std::string& name) const {
  const auto* ext = find(name);
  return ext && std::holds_alternative<AxiomaticTypeSig>(*ext);
}

std::optional<FormulaFactory::ConstructorRef> FormulaFactory::find_constructor(
    const std::string& name) const {
  auto it = constructors_.find(name);
  if (it == constructors_.end()) return std::nullopt;
  return it->second;
}

std::optional<FormulaFactory::DestructorRef> FormulaFactory::find_destructor(
    const std::string& name) const {
  auto it = destructors_.find(name);
  if (it == destructors_.end()) return std::nullopt;
  return it->second;
}

const OperatorSig* FormulaFactory::find_symbol(const std::string& symbol) const {
  auto it = symbols_.find(symbol);
  return it == symbols_.end() ? nullptr : it->second;
}

bool FormulaFactory::includes(const FormulaFactory& other) const {
  if (id_ == other.id_) return true;
  for (const auto& [name, ext] : other.extensions_) {
    const auto* mine = find(name);
    if (!mine || !signature_equal(*mine, ext)) return false;
  }
  return true;
}

std::optional<std::string> factory_conflict(const FormulaFactory& a, const FormulaFactory& b) {
  if (a.id() == b.id()) return std::nullopt;
  for (const auto& [name, ext] : a.extensions()) {
    if (const auto* other = b.find(name); other && !signature_equal(ext, *other)) return name;
  }
  // Same name owned by two different extensions (e.g. a constructor `nil` of
  // two unrelated datatypes) is a conflict as well.
  for (const auto& [name, owner] : a.owned_names()) {
    auto it = b.owned_names().find(name);
    if (it != b.owned_names().end() && it->second != owner) return name;
  }
  return std::nullopt;
}

bool factories_compatible(const FormulaFactory& a, const FormulaFactory& b) {
  return !factory_conflict(a, b).has_value();
}

FactoryPtr factory_union(const FactoryPtr& a, const FactoryPtr& b) {
  if (a == b || a->includes(*b)) return a;
  if (b->includes(*a)) return b;
  if (auto conflict = factory_conflict(*a, *b))
    throw Error(ErrorKind::IncompatibleFactories, *conflict,
                "formula factories disagree on '" + *conflict + "'");
  std::vector<ExtensionSignature> all;
  for (const auto& [name, ext] : a->extensions()) all.push_back(ext);
  for (const auto& [name, ext] : b->extensions())
    if (!a->find(name)) all.push_back(ext);
  return FormulaFactory::make(std::move(all));
}

}  // namespace theoria
