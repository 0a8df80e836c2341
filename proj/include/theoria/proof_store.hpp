#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

#include "theoria/prover.hpp"

// JSON forms of kernel values and the versioned `.prf.json` proof format.
// Formulas appear as {"text": unicode rendering, "ast": prefix tree}; types are
// prefix arrays such as ["pow", ["param", "T"]].
namespace theoria::store {

using json = nlohmann::ordered_json;

inline constexpr std::string_view kProofFormat = "theoria-proof";
inline constexpr int kProofFormatVersion = 1;

json type_to_json(const Type& t);
Type type_from_json(const json& j);

json ast_to_json(const Formula& f);
json formula_to_json(const Formula& f);  // {"text", "ast"}
// Accepts either form. Extension nodes are built with `factory`.
Formula formula_from_json(const json& j, const FactoryPtr& factory);

json signature_to_json(const ExtensionSignature& sig);
ExtensionSignature signature_from_json(const json& j);

json sequent_to_json(const Sequent& s);
Sequent sequent_from_json(const json& j, const FactoryPtr& factory);

json rule_ref_to_json(const std::optional<RuleRef>& r);
json application_to_json(const RuleApplication& app);
RuleApplication application_from_json(const json& j, const FactoryPtr& factory);

json specialisation_to_json(const Specialisation& s);
json applicable_to_json(const Applicable& a);

json node_to_json(const ProofTree& t, int id);  // nested subtree
json tree_to_json(const ProofTree& t);           // {"status", "ruleCount", "pending", "root"}
ProofTree tree_from_json(const json& root_node, const FactoryPtr& factory);

json proof_to_json(const StoredProof& p);
// Throws CorruptProof on malformed input or an unsupported version.
StoredProof proof_from_json(const json& j);

// Canonical text: two-space indentation, trailing newline.
std::string dump_proof(const StoredProof& p);
StoredProof parse_proof(std::string_view text);

// Snapshot of the extensions a proof was built with.
std::vector<ExtensionSignature> factory_snapshot(const FactoryPtr& f);

}  // namespace theoria::store
