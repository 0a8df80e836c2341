#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "theoria/error.hpp"
#include "theoria/formula.hpp"
#include "theoria/matcher.hpp"
#include "theoria/theory.hpp"

namespace theoria {

// hypotheses ⊢ goal. Hypotheses are an ordered set: no duplicates.
struct Sequent {
  std::vector<Formula> hypotheses;
  Formula goal;

  FactoryPtr factory() const;
  bool has_hypothesis(const Formula& f) const;
  Sequent with_hypothesis(const Formula& f) const;  // appended unless present

  friend bool operator==(const Sequent& a, const Sequent& b) {
    return a.hypotheses == b.hypotheses && a.goal == b.goal;
  }
};

// The elaborated theories a proof obligation may use, in the order tactics
// consult them.
class RuleBase {
 public:
  struct Rewrite {
    const Theory* theory;
    const RewriteRule* rule;
    TypeEnvironment env;  // rule variables and type parameters
  };
  struct Inference {
    const Theory* theory;
    const InferenceRule* rule;
    TypeEnvironment env;
  };

  RuleBase() : RuleBase(std::vector<TheoryPtr>{}) {}
  explicit RuleBase(std::vector<TheoryPtr> theories);

  const std::vector<TheoryPtr>& theories() const { return theories_; }
  const FactoryPtr& factory() const { return factory_; }
  const std::vector<Rewrite>& rewrites() const { return rewrites_; }
  const std::vector<Inference>& inferences() const { return inferences_; }

  const Rewrite* find_rewrite(const std::string& theory, const std::string& name) const;
  const Inference* find_inference(const std::string& theory, const std::string& name) const;
  const Theory* find_theory(const std::string& name) const;
  // Theory defining operator `op`, with the definition.
  std::pair<const Theory*, const OperatorDef*> find_definition(const std::string& op) const;

 private:
  std::vector<TheoryPtr> theories_;
  FactoryPtr factory_;
  std::vector<Rewrite> rewrites_;
  std::vector<Inference> inferences_;
};

// Well-definedness of an expression (or predicate): ⊤ for total constructs,
// divisor ≠ 0 for ÷, declared wd conditions for operators, conjunction of the
// children otherwise. Simplified by ⊤-elimination.
Formula wd(const Formula& f, const RuleBase& base = {});

enum class Reasoner {
  TrueGoal,         // core.trueGoal: goal ⊤
  Hyp,              // core.hyp: goal among the hypotheses
  ConjI,            // core.conjI: split a conjunctive goal
  ManualRewrite,    // theory.manualRewrite
  ManualInference,  // theory.manualInference
  AutoRewrite,      // theory.autoRewrite
  AutoInference,    // theory.autoInference
  ExpandDefinition, // theory.expandDefinition
};

std::string_view reasoner_id(Reasoner r);
std::optional<Reasoner> reasoner_from_id(std::string_view id);
// Theory reasoners depend on mutable theory content and must be replayed.
bool context_dependent(Reasoner r);

enum class Direction { Forward, Backward };
std::string_view to_string(Direction d);

struct RuleRef {
  std::string theory;
  std::string name;  // rule name, or operator name for definition expansion
  friend bool operator==(const RuleRef&, const RuleRef&) = default;
};

struct ReasonerInput {
  std::optional<RuleRef> rule;
  std::optional<Formula> hyp;  // application hypothesis; none means the goal
  Position position;
  std::optional<Direction> direction;
};

struct RuleApplication {
  Reasoner reasoner;
  ReasonerInput input;
  std::string label() const;  // the rule name, or the core reasoner id
};

// Reasoners. Each returns the antecedents of one rule application; an empty
// list closes the sequent. The WD sub-goal, when present, is always first.
// Throws RuleNotApplicable, InvalidPosition, DirectionNotAllowed,
// NotExpandable, UnknownRule.
std::vector<Sequent> apply_reasoner(const Sequent& s, const RuleApplication& app,
                                    const RuleBase& base);
std::vector<Sequent> apply_manual_rewrite(const Sequent& s, const ReasonerInput& in,
                                          const RuleBase& base);
std::vector<Sequent> apply_manual_inference(const Sequent& s, const ReasonerInput& in,
                                            const RuleBase& base);
std::vector<Sequent> apply_expand_definition(const Sequent& s, const ReasonerInput& in,
                                             const RuleBase& base);

enum class TreeStatus { Open, Closed, Stale };
std::string_view to_string(TreeStatus s);

struct ProofNode {
  int id = 0;
  int parent = -1;
  Sequent sequent;
  std::optional<RuleApplication> rule;  // none: pending
  std::vector<int> children;
  bool stale = false;  // a stored rule failed to replay here
};

class ProofTree {
 public:
  ProofTree() = default;
  explicit ProofTree(Sequent root);
  // Rebuilds a tree with its original node ids. Throws CorruptProof when the
  // parent/child links are inconsistent.
  static ProofTree from_nodes(std::map<int, ProofNode> nodes, int root);

  int root() const { return root_; }
  const ProofNode& node(int id) const;  // throws UnknownNode
  const std::map<int, ProofNode>& nodes() const { return nodes_; }
  std::vector<int> pending() const;     // pre-order
  std::vector<int> preorder() const;
  TreeStatus status() const;
  std::size_t rule_count() const;  // nodes carrying a rule

  // Applies one reasoner at a pending node. Throws NodeNotPending and the
  // reasoner's errors; the tree is unchanged on failure.
  const ProofNode& apply(int id, const RuleApplication& app, const RuleBase& base);
  // Records an application with precomputed antecedents.
  const ProofNode& attach(int id, const RuleApplication& app, std::vector<Sequent> antecedents);
  // Removes the subtree below `id`, which becomes pending. Throws UnknownNode.
  void prune(int id);
  void mark_stale(int id);

 private:
  int fresh_id() const;

  std::map<int, ProofNode> nodes_;
  int root_ = 0;
};

// Rule applications suggested for a pending node's manual tactics.
struct Applicable {
  Reasoner reasoner;
  RuleRef rule;
  std::optional<Formula> hyp;
  std::optional<std::size_t> hyp_index;
  Position position;
  std::optional<Direction> direction;
  Specialisation binding;
};
std::vector<Applicable> applicable_rules(const Sequent& s, const RuleBase& base);

enum class AutoKind { Expand, Rewrite, Inference };
std::string_view to_string(AutoKind k);

struct TacticStep {
  int node;
  std::string rule;
  Reasoner reasoner;
};

struct TacticReport {
  std::vector<TacticStep> steps;
  std::size_t applications() const { return steps.size(); }
};

class BudgetExceeded : public Error {
 public:
  BudgetExceeded(TacticReport report, std::size_t budget)
      : Error(ErrorKind::BudgetExceeded, std::to_string(budget),
              "step budget of " + std::to_string(budget) + " applications exhausted"),
        report_(std::move(report)) {}
  const TacticReport& report() const { return report_; }

 private:
  TacticReport report_;
};

constexpr std::size_t kDefaultStepBudget = 1000;
// THEORIA_STEP_BUDGET when set to a positive integer, otherwise the default.
std::size_t step_budget_from_env();

// Applies core closers and then the automatic rules of `kind` until nothing
// applies anywhere. Throws BudgetExceeded once `budget` applications are spent
// and more would apply; the applications made so far stay in the tree.
TacticReport auto_tactic(ProofTree& tree, AutoKind kind, const RuleBase& base,
                         std::size_t budget = kDefaultStepBudget);

// Stored proofs.
struct StoredProof {
  std::string po;
  std::vector<ExtensionSignature> signatures;  // factory snapshot
  ProofTree tree;
};

enum class ReuseKind { Reusable, NeedsReplay, Incompatible };
std::string_view to_string(ReuseKind k);

struct ReuseVerdict {
  ReuseKind kind;
  std::string reason;  // conflicting extension name, or why the root differs
};

ReuseVerdict check_reusable(const StoredProof& p, const Sequent& s, const RuleBase& base);

// Re-executes every stored application against `base`. A node whose
// application fails or yields a different number of antecedents becomes a
// stale pending leaf. Throws CorruptProof when the proof is Incompatible.
ProofTree replay(const StoredProof& p, const Sequent& s, const RuleBase& base);

}  // namespace theoria
