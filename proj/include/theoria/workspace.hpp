#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "theoria/prover.hpp"
#include "theoria/theory.hpp"

namespace theoria {

namespace fs = std::filesystem;

struct LoadedTheory {
  fs::path path;
  TheoryPtr parsed;      // as read
  TheoryPtr theory;      // elaborated; null when diagnostics are present
  std::vector<Diagnostic> diagnostics;
};

struct ProofObligation {
  std::string id;  // <seq file stem>.<sequent name>
  std::string name;
  fs::path seq_path;
  fs::path proof_path;  // <seq file stem>.<sequent name>.prf.json beside the .seq
  std::vector<std::string> theories;
  std::vector<std::string> given_sets;
  std::optional<Sequent> sequent;  // none when the sequent does not typecheck
  std::string error;
};

// Theories found under a root directory (recursively, by their `theory` name),
// loaded on demand with their imports, plus the proof obligations of any
// number of sequent files.
class Workspace {
 public:
  // Indexes every .thy file below `root`. Throws IoError, DuplicateName.
  explicit Workspace(fs::path root);

  const fs::path& root() const { return root_; }

  // Parses and validates a theory and its imports. Throws IoError,
  // SyntaxError and the other parse errors, InvalidTheory for import cycles or
  // imports with diagnostics.
  const LoadedTheory& load_theory(const std::string& name);
  const LoadedTheory& load_theory_file(const fs::path& file);
  std::vector<std::string> theory_names() const;

  // Reads one .seq file. Throws IoError, parse errors, InvalidTheory.
  std::vector<std::string> add_sequent_file(const fs::path& file);
  // Every .seq file below the root, in path order.
  void add_all_sequent_files();

  const std::vector<ProofObligation>& obligations() const { return obligations_; }
  const ProofObligation& obligation(const std::string& id) const;  // throws UnknownObligation

  // The named theories and their imports, imports first. Throws InvalidTheory.
  RuleBase rule_base(const std::vector<std::string>& theories);

  // Throws CorruptProof, IoError.
  std::optional<StoredProof> load_proof(const ProofObligation& po) const;
  // Atomic: written to a temporary file and renamed over the old one.
  void save_proof(const ProofObligation& po, const ProofTree& tree, const RuleBase& base) const;

 private:
  void closure(const std::string& name, std::vector<std::string>& order,
               std::vector<std::string>& visiting);

  fs::path root_;
  std::map<std::string, fs::path> index_;
  std::map<std::string, LoadedTheory> loaded_;
  std::vector<ProofObligation> obligations_;
};

std::string read_file(const fs::path& p);                         // throws IoError
void write_file_atomic(const fs::path& p, const std::string& text);  // throws IoError

}  // namespace theoria
