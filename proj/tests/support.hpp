#pragma once

#include <filesystem>
#include <random>
#include <string>

#include "theoria/parser.hpp"
#include "theoria/printer.hpp"
#include "theoria/proof_store.hpp"
#include "theoria/prover.hpp"
#include "theoria/workspace.hpp"

namespace test {

using namespace theoria;
namespace fs = std::filesystem;

inline fs::path fixtures() { return fs::path(THEORIA_FIXTURES); }

inline FactoryPtr core() { return FormulaFactory::core(); }

inline Formula parse(const std::string& text, const FactoryPtr& f = core(), const TypeScope& scope = {}) {
  return parse_formula(text, f, scope);
}

// Parsed and typechecked; carrier sets and type parameters come from `env`.
inline Formula typed(const std::string& text, TypeEnvironment env = {}, const FactoryPtr& f = core()) {
  TypeScope scope{env.type_params, env.given_sets};
  return typecheck(parse_formula(text, f, scope), env);
}

inline std::string show(const Formula& f) { return print_formula(f, PrintMode::Unicode); }

// A fresh copy of the fixture tree, removed on destruction.
class TempWorkspace {
 public:
  explicit TempWorkspace(const fs::path& from = fixtures()) {
    static int counter = 0;
    dir_ = fs::temp_directory_path() /
           ("theoria-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    fs::remove_all(dir_);
    fs::copy(from, dir_, fs::copy_options::recursive);
    for (auto& p : fs::recursive_directory_iterator(dir_))
      if (p.path().extension() == ".json") fs::remove(p.path());
  }
  ~TempWorkspace() {
    std::error_code ec;
    fs::remove_all(dir_, ec);
  }
  TempWorkspace(const TempWorkspace&) = delete;
  TempWorkspace& operator=(const TempWorkspace&) = delete;

  const fs::path& dir() const { return dir_; }
  fs::path operator/(const std::string& rel) const { return dir_ / rel; }

  void replace_in(const std::string& rel, const std::string& from, const std::string& to) const {
    std::string text = read_file(dir_ / rel);
    auto at = text.find(from);
    if (at == std::string::npos) throw std::runtime_error("'" + from + "' not in " + rel);
    text.replace(at, from.size(), to);
    write_file_atomic(dir_ / rel, text);
  }

 private:
  fs::path dir_;
};

// Elaborated fixture theories with their imports, in dependency order.
inline RuleBase fixture_base(Workspace& ws, const std::vector<std::string>& names) {
  return ws.rule_base(names);
}

inline const ProofObligation& po_of(Workspace& ws, const std::string& seq, const std::string& id) {
  if (ws.obligations().empty() ||
      std::none_of(ws.obligations().begin(), ws.obligations().end(),
                   [&](const ProofObligation& p) { return p.id == id; }))
    ws.add_sequent_file(ws.root() / seq);
  return ws.obligation(id);
}

}  // namespace test
