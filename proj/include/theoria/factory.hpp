#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "theoria/signature.hpp"

namespace theoria {

class FormulaFactory;
using FactoryPtr = std::shared_ptr<const FormulaFactory>;

// The core language plus a set of extension signatures. Immutable; the id is a
// hash of the sorted canonical signatures, so equal extension sets share an id.
class FormulaFactory {
 public:
  struct ConstructorRef {
    const DatatypeSig* datatype;
    std::size_t constructor;
  };
  struct DestructorRef {
    const DatatypeSig* datatype;
    std::size_t constructor;
    std::size_t destructor;
  };

  static FactoryPtr core();
  // Throws DuplicateExtension when two extensions (or their constructor,
  // destructor and symbol names) collide, and InvalidSignature/InvalidNotation
  // for malformed operator signatures.
  static FactoryPtr make(std::vector<ExtensionSignature> extensions);

  const std::string& id() const { return id_; }
  const std::map<std::string, ExtensionSignature>& extensions() const { return extensions_; }
  bool is_core() const { return extensions_.empty(); }

  const ExtensionSignature* find(const std::string& name) const;
  const OperatorSig* find_operator(const std::string& name) const;
  const DatatypeSig* find_datatype(const std::string& name) const;
  bool is_axiomatic_type(const std::string& name) const;
  std::optional<ConstructorRef> find_constructor(const std::string& name) const;
  std::optional<DestructorRef> find_destructor(const std::string& name) const;
  const OperatorSig* find_symbol(const std::string& symbol) const;

  // True when every extension of `other` is present here with an equal signature.
  bool includes(const FormulaFactory& other) const;

  // Names a factory claims besides extension names: constructors, destructors, symbols.
  const std::map<std::string, std::string>& owned_names() const { return owner_; }

 private:
  FormulaFactory() = default;
  FormulaFactory(const FormulaFactory&) = delete;
  FormulaFactory& operator=(const FormulaFactory&) = delete;

  std::string id_;
  std::map<std::string, ExtensionSignature> extensions_;
  std::map<std::string, std::string> owner_;  // any claimed name -> extension name
  std::map<std::string, ConstructorRef> constructors_;
  std::map<std::string, DestructorRef> destructors_;
  std::map<std::string, const OperatorSig*> symbols_;
};

// Name of the first extension (in name order) on which the factories disagree.
std::optional<std::string> factory_conflict(const FormulaFactory& a, const FormulaFactory& b);

bool factories_compatible(const FormulaFactory& a, const FormulaFactory& b);

// Throws IncompatibleFactories(name) on conflict.
FactoryPtr factory_union(const FactoryPtr& a, const FactoryPtr& b);

bool is_core_keyword(const std::string& name);

}  // namespace theoria
