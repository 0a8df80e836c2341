#include "theoria/prover.hpp"

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <set>

#include "theoria/printer.hpp"

namespace theoria {

// ---------------------------------------------------------------- sequents

FactoryPtr Sequent::factory() const {
  FactoryPtr out = goal ? goal.factory() : FormulaFactory::core();
  for (const auto& h : hypotheses) out = factory_union(out, h.factory());
  return out;
}

bool Sequent::has_hypothesis(const Formula& f) const {
  return std::find(hypotheses.begin(), hypotheses.end(), f) != hypotheses.end();
}

Sequent Sequent::with_hypothesis(const Formula& f) const {
  Sequent out = *this;
  if (!has_hypothesis(f)) out.hypotheses.push_back(f);
  return out;
}

namespace {

std::string show(const Formula& f) { return print_formula(f, PrintMode::Unicode); }

Error not_applicable(const std::string& rule, const std::string& why) {
  return Error(ErrorKind::RuleNotApplicable, rule, "rule '" + rule + "' is not applicable: " + why);
}

void collect_params(const Type& t, std::set<std::string>& out) { t.collect_params(out); }

void collect_params(const Formula& f, std::set<std::string>& out) {
  if (f.type()) collect_params(*f.type(), out);
  for (const auto& b : f.bound())
    if (b.type) collect_params(*b.type, out);
  for (const auto& c : f.children()) collect_params(c, out);
}

TypeEnvironment rule_env(const std::vector<Formula>& formulas) {
  std::set<std::string> params;
  for (const auto& f : formulas) collect_params(f, params);
  TypeEnvironment env;
  env.type_params = params;
  for (const auto& f : formulas) {
    Pattern p = make_pattern(f, params);
    env.vars.insert(p.env.vars.begin(), p.env.vars.end());
  }
  return env;
}

// Every unknown occurring in `formulas` is bound by `s`.
bool binds_all(const Specialisation& s, const TypeEnvironment& env,
               const std::vector<Formula>& formulas) {
  for (const auto& f : formulas) {
    for (const auto& v : free_identifiers(f))
      if (env.vars.count(v) && !s.vars.count(v)) return false;
    std::set<std::string> params;
    collect_params(f, params);
    for (const auto& p : params)
      if (env.type_params.count(p) && !s.types.count(p)) return false;
  }
  return true;
}

}  // namespace

// ---------------------------------------------------------------- rule base

RuleBase::RuleBase(std::vector<TheoryPtr> theories) : theories_(std::move(theories)) {
  factory_ = FormulaFactory::core();
  for (const auto& t : theories_) {
    factory_ = factory_union(factory_, t->factory);
    for (const auto& r : t->rewrite_rules) {
      std::vector<Formula> all{r.lhs};
      for (const auto& c : r.cases) {
        all.push_back(c.condition);
        all.push_back(c.rhs);
      }
      rewrites_.push_back({t.get(), &r, rule_env(all)});
    }
    for (const auto& r : t->inference_rules) {
      std::vector<Formula> all = r.givens;
      all.push_back(r.infer);
      inferences_.push_back({t.get(), &r, rule_env(all)});
    }
  }
}

const RuleBase::Rewrite* RuleBase::find_rewrite(const std::string& theory,
                                                const std::string& name) const {
  for (const auto& r : rewrites_)
    if (r.theory->name == theory && r.rule->name == name) return &r;
  return nullptr;
}

const RuleBase::Inference* RuleBase::find_inference(const std::string& theory,
                                                    const std::string& name) const {
  for (const auto& r : inferences_)
    if (r.theory->name == theory && r.rule->name == name) return &r;
  return nullptr;
}

const Theory* RuleBase::find_theory(const std::string& name) const {
  for (const auto& t : theories_)
    if (t->name == name) return t.get();
  return nullptr;
}

std::pair<const Theory*, const OperatorDef*> RuleBase::find_definition(const std::string& op) const {
  for (const auto& t : theories_)
    if (const auto* d = t->find_operator(op)) return {t.get(), d};
  return {nullptr, nullptr};
}

// ---------------------------------------------------------------- WD

namespace {

Formula declared_wd(const Formula& app, const Formula& first, const Formula& second,
                    const Theory& t, const OperatorDef& def, bool pair) {
  const OperatorSig& sig = def.signature;
  TypeEnvironment env = theory_environment(t);
  std::set<std::string> params;
  for (const auto& a : sig.args) a.type.collect_params(params);
  env.type_params.insert(params.begin(), params.end());
  Specialisation s;
  s.factory = factory_union(t.factory, app.factory());
  for (std::size_t i = 0; i < sig.args.size(); ++i) {
    const Formula& arg = pair ? (i == 0 ? first : second) : app.child(i);
    if (!arg.type() || !match_type(sig.args[i].type, *arg.type(), params, s.types))
      return build::truth();
    env.vars.emplace(sig.args[i].name, sig.args[i].type);
    s.vars.emplace(sig.args[i].name, arg);
  }
  for (const auto& p : env.type_params) s.types.emplace(p, Type::param(p));
  return specialise(*def.wd_condition, s, env);
}

}  // namespace

Formula wd(const Formula& f, const RuleBase& base) {
  std::vector<Formula> parts;
  if (is_binder(f.tag())) {
    Formula body = wd(f.child(0), base);
    if (body.tag() == Tag::True) return body;
    return build::quantified(Tag::Forall, f.bound(), body);
  }
  for (const auto& c : f.children()) parts.push_back(wd(c, base));
  if (f.tag() == Tag::Div) parts.push_back(build::not_equal(f.child(1), build::integer(0)));
  if (f.tag() == Tag::ExtOp) {
    auto [theory, def] = base.find_definition(f.name());
    if (def && def->wd_condition) {
      if (def->signature.associative && f.arity() > 2) {
        for (std::size_t k = 1; k < f.arity(); ++k)
          parts.push_back(declared_wd(f, assoc_run(f, 0, k), f.child(k), *theory, *def, true));
      } else {
        parts.push_back(declared_wd(f, Formula(), Formula(), *theory, *def, false));
      }
    }
  }
  return build::conjunction(std::move(parts));
}

// ---------------------------------------------------------------- reasoners

std::string_view reasoner_id(Reasoner r) {
  switch (r) {
    case Reasoner::TrueGoal: return "core.trueGoal";
    case Reasoner::Hyp: return "core.hyp";
    case Reasoner::ConjI: return "core.conjI";
    case Reasoner::ManualRewrite: return "theory.manualRewrite";
    case Reasoner::ManualInference: return "theory.manualInference";
    case Reasoner::AutoRewrite: return "theory.autoRewrite";
    case Reasoner::AutoInference: return "theory.autoInference";
    case Reasoner::ExpandDefinition: return "theory.expandDefinition";
  }
  return "";
}

std::optional<Reasoner> reasoner_from_id(std::string_view id) {
  for (Reasoner r : {Reasoner::TrueGoal, Reasoner::Hyp, Reasoner::ConjI, Reasoner::ManualRewrite,
                     Reasoner::ManualInference, Reasoner::AutoRewrite, Reasoner::AutoInference,
                     Reasoner::ExpandDefinition})
    if (reasoner_id(r) == id) return r;
  return std::nullopt;
}

bool context_dependent(Reasoner r) {
  return r != Reasoner::TrueGoal && r != Reasoner::Hyp && r != Reasoner::ConjI;
}

std::string_view to_string(Direction d) { return d == Direction::Forward ? "forward" : "backward"; }

std::string RuleApplication::label() const {
  if (input.rule) return input.rule->name;
  return std::string(reasoner_id(reasoner));
}

namespace {

struct Target {
  std::optional<std::size_t> hyp;  // index, or the goal
  const Formula* formula;
};

Target target_of(const Sequent& s, const std::optional<Formula>& hyp, const std::string& rule) {
  if (!hyp) return {std::nullopt, &s.goal};
  auto it = std::find(s.hypotheses.begin(), s.hypotheses.end(), *hyp);
  if (it == s.hypotheses.end())
    throw not_applicable(rule, "'" + show(*hyp) + "' is not a hypothesis");
  return {static_cast<std::size_t>(it - s.hypotheses.begin()), &*it};
}

Sequent replace_target(const Sequent& s, const Target& t, const Formula& replacement) {
  if (!t.hyp) return Sequent{s.hypotheses, replacement};
  Sequent out{{}, s.goal};
  for (std::size_t i = 0; i < s.hypotheses.size(); ++i) {
    const Formula& h = i == *t.hyp ? replacement : s.hypotheses[i];
    if (!out.has_hypothesis(h)) out.hypotheses.push_back(h);
  }
  return out;
}

// Conjunction of the WD of every expression binding; bindings mentioning
// variables bound above the rewritten position are closed with ∀.
Formula instantiation_wd(const std::vector<Formula>& images, const std::vector<BoundIdent>& bound,
                         const RuleBase& base) {
  std::vector<Formula> parts;
  for (const auto& e : images) {
    if (!e.is_expression()) continue;
    Formula w = wd(e, base);
    if (w.tag() == Tag::True) continue;
    const auto free = free_identifiers(w);
    std::vector<BoundIdent> closing;
    std::set<std::string> seen;
    for (auto it = bound.rbegin(); it != bound.rend(); ++it)
      if (free.count(it->name) && seen.insert(it->name).second) closing.insert(closing.begin(), *it);
    parts.push_back(closing.empty() ? w : build::quantified(Tag::Forall, closing, w));
  }
  return build::conjunction(std::move(parts));
}

std::vector<Formula> images(const Specialisation& s) {
  std::vector<Formula> out;
  for (const auto& [v, e] : s.vars) out.push_back(e);
  return out;
}

struct RewriteResult {
  std::vector<Sequent> antecedents;
  Specialisation binding;
};

RewriteResult rewrite_at(const Sequent& s, const RuleBase::Rewrite& rw,
                         const std::optional<Formula>& hyp, const Position& pos,
                         const RuleBase& base) {
  const RewriteRule& rule = *rw.rule;
  const Target target = target_of(s, hyp, rule.name);
  const Formula& subject = subformula_at(*target.formula, pos);
  auto sigma = match(Pattern{rule.lhs, rw.env}, subject);
  if (!sigma) throw not_applicable(rule.name, "'" + show(rule.lhs) + "' does not match '" + show(subject) + "'");
  std::vector<Formula> used;
  for (const auto& c : rule.cases) {
    used.push_back(c.condition);
    used.push_back(c.rhs);
  }
  if (!binds_all(*sigma, rw.env, used))
    throw not_applicable(rule.name, "the match leaves rule variables unbound");

  const auto bound = bound_above(*target.formula, pos);
  std::set<std::string> bound_names;
  for (const auto& b : bound) bound_names.insert(b.name);

  std::vector<Formula> conditions;
  for (const auto& c : rule.cases) conditions.push_back(specialise(c.condition, *sigma, rw.env));
  if (!rule.unconditional()) {
    for (const auto& c : conditions)
      for (const auto& v : free_identifiers(c))
        if (bound_names.count(v))
          throw not_applicable(rule.name, "condition '" + show(c) + "' would capture bound '" + v + "'");
  }

  RewriteResult out{{}, *sigma};
  Formula w = instantiation_wd(images(*sigma), bound, base);
  if (w.tag() != Tag::True) out.antecedents.push_back(Sequent{s.hypotheses, w});
  for (std::size_t i = 0; i < rule.cases.size(); ++i) {
    Formula rhs = specialise(rule.cases[i].rhs, *sigma, rw.env);
    Sequent next = replace_target(s, target, replace_at(*target.formula, pos, rhs));
    if (conditions[i].tag() != Tag::True) next = next.with_hypothesis(conditions[i]);
    out.antecedents.push_back(std::move(next));
  }
  if (!rule.complete) out.antecedents.push_back(Sequent{s.hypotheses, build::disjunction(conditions)});
  return out;
}

const RuleBase::Rewrite& lookup_rewrite(const ReasonerInput& in, const RuleBase& base) {
  if (!in.rule) throw Error(ErrorKind::UnknownRule, "", "no rule given");
  const auto* rw = base.find_rewrite(in.rule->theory, in.rule->name);
  if (!rw)
    throw Error(ErrorKind::UnknownRule, in.rule->name,
                "no rewrite rule '" + in.rule->name + "' in theory '" + in.rule->theory + "'");
  return *rw;
}

const RuleBase::Inference& lookup_inference(const ReasonerInput& in, const RuleBase& base) {
  if (!in.rule) throw Error(ErrorKind::UnknownRule, "", "no rule given");
  const auto* r = base.find_inference(in.rule->theory, in.rule->name);
  if (!r)
    throw Error(ErrorKind::UnknownRule, in.rule->name,
                "no inference rule '" + in.rule->name + "' in theory '" + in.rule->theory + "'");
  return *r;
}

struct InferenceResult {
  std::vector<Sequent> antecedents;
  Specialisation binding;
  std::size_t side_goals = 0;  // unmatched givens turned into antecedents
  Formula inferred;
};

InferenceResult infer_backward(const Sequent& s, const RuleBase::Inference& inf,
                               const RuleBase& base) {
  const InferenceRule& rule = *inf.rule;
  if (!rule.allows_backward())
    throw Error(ErrorKind::DirectionNotAllowed, rule.name,
                "rule '" + rule.name + "' cannot be applied backward");
  auto sigma = match(Pattern{rule.infer, inf.env}, s.goal);
  if (!sigma) throw not_applicable(rule.name, "'" + show(rule.infer) + "' does not match the goal");
  if (!binds_all(*sigma, inf.env, rule.givens))
    throw not_applicable(rule.name, "the match leaves rule variables unbound");
  InferenceResult out{{}, *sigma, rule.givens.size(), {}};
  Formula w = instantiation_wd(images(*sigma), {}, base);
  if (w.tag() != Tag::True) out.antecedents.push_back(Sequent{s.hypotheses, w});
  for (const auto& g : rule.givens)
    out.antecedents.push_back(Sequent{s.hypotheses, specialise(g, *sigma, inf.env)});
  return out;
}

InferenceResult infer_forward(const Sequent& s, const RuleBase::Inference& inf,
                              const std::optional<Formula>& hyp, const RuleBase& base) {
  const InferenceRule& rule = *inf.rule;
  if (!rule.allows_forward())
    throw Error(ErrorKind::DirectionNotAllowed, rule.name,
                "rule '" + rule.name + "' cannot be applied forward");
  Specialisation sigma;
  std::vector<bool> found(rule.givens.size(), false);
  if (rule.givens.empty()) {
    if (hyp) throw not_applicable(rule.name, "a rule without givens takes no hypothesis");
  } else {
    if (!hyp) throw not_applicable(rule.name, "forward inference needs an application hypothesis");
    target_of(s, hyp, rule.name);
    auto m = match(Pattern{rule.givens[0], inf.env}, *hyp);
    if (!m) throw not_applicable(rule.name, "'" + show(rule.givens[0]) + "' does not match '" + show(*hyp) + "'");
    sigma = *m;
    found[0] = true;
    for (std::size_t j = 1; j < rule.givens.size(); ++j) {
      for (const auto& h : s.hypotheses) {
        if (auto ext = match(Pattern{rule.givens[j], inf.env}, h, sigma)) {
          sigma = *ext;
          found[j] = true;
          break;
        }
      }
    }
  }
  std::vector<Formula> rest{rule.infer};
  for (std::size_t j = 0; j < rule.givens.size(); ++j)
    if (!found[j]) rest.push_back(rule.givens[j]);
  if (!binds_all(sigma, inf.env, rest))
    throw not_applicable(rule.name, "the match leaves rule variables unbound");
  if (!sigma.factory) sigma.factory = base.factory();

  InferenceResult out{{}, sigma, 0, specialise(rule.infer, sigma, inf.env)};
  Formula w = instantiation_wd(images(sigma), {}, base);
  if (w.tag() != Tag::True) out.antecedents.push_back(Sequent{s.hypotheses, w});
  for (std::size_t j = 0; j < rule.givens.size(); ++j) {
    if (found[j]) continue;
    Formula g = specialise(rule.givens[j], sigma, inf.env);
    if (s.has_hypothesis(g)) continue;
    out.antecedents.push_back(Sequent{s.hypotheses, g});
    ++out.side_goals;
  }
  out.antecedents.push_back(s.with_hypothesis(out.inferred));
  return out;
}

Direction direction_of(const ReasonerInput& in) {
  if (in.direction) return *in.direction;
  return in.hyp ? Direction::Forward : Direction::Backward;
}

std::vector<Sequent> expand_at(const Sequent& s, const std::optional<Formula>& hyp,
                               const Position& pos, const RuleBase& base, RuleRef* used) {
  const Target target = target_of(s, hyp, "expand");
  const Formula& subject = subformula_at(*target.formula, pos);
  if (subject.tag() != Tag::ExtOp)
    throw Error(ErrorKind::NotExpandable, show(subject),
                "'" + show(subject) + "' is not an operator application");
  auto [theory, def] = base.find_definition(subject.name());
  if (!def)
    throw Error(ErrorKind::NotExpandable, subject.name(),
                "operator '" + subject.name() + "' is not defined by any theory in scope");
  Formula expansion = expand_definition_formula(subject, *theory);
  if (used) *used = RuleRef{theory->name, subject.name()};
  std::vector<Formula> args(subject.children().begin(), subject.children().end());
  std::vector<Sequent> out;
  Formula w = instantiation_wd(args, bound_above(*target.formula, pos), base);
  if (w.tag() != Tag::True) out.push_back(Sequent{s.hypotheses, w});
  out.push_back(replace_target(s, target, replace_at(*target.formula, pos, expansion)));
  return out;
}

bool makes_progress(const Sequent& s, const std::vector<Sequent>& ants) {
  return std::none_of(ants.begin(), ants.end(), [&](const Sequent& a) { return a == s; });
}

std::vector<std::pair<std::optional<Formula>, Position>> locations(const Sequent& s) {
  std::vector<std::pair<std::optional<Formula>, Position>> out;
  for (auto& p : all_positions(s.goal)) out.emplace_back(std::nullopt, std::move(p));
  for (const auto& h : s.hypotheses)
    for (auto& p : all_positions(h)) out.emplace_back(h, std::move(p));
  return out;
}

std::vector<Sequent> auto_rewrite(const Sequent& s, const RuleBase::Rewrite& rw,
                                  const RuleBase& base, bool require_progress) {
  for (const auto& [hyp, pos] : locations(s)) {
    try {
      auto r = rewrite_at(s, rw, hyp, pos, base);
      if (!require_progress || makes_progress(s, r.antecedents)) return std::move(r.antecedents);
    } catch (const Error&) {
    }
  }
  throw not_applicable(rw.rule->name, "no matching position");
}

std::vector<Sequent> auto_inference(const Sequent& s, const RuleBase::Inference& inf,
                                    Direction dir, const RuleBase& base) {
  if (dir == Direction::Backward) {
    auto r = infer_backward(s, inf, base);
    return std::move(r.antecedents);
  }
  if (inf.rule->givens.empty()) {
    auto r = infer_forward(s, inf, std::nullopt, base);
    if (!s.has_hypothesis(r.inferred)) return std::move(r.antecedents);
  } else {
    for (const auto& h : s.hypotheses) {
      try {
        auto r = infer_forward(s, inf, h, base);
        if (r.side_goals == 0 && !s.has_hypothesis(r.inferred)) return std::move(r.antecedents);
      } catch (const Error&) {
      }
    }
  }
  throw not_applicable(inf.rule->name, "no hypothesis allows a new forward inference");
}

}  // namespace

std::vector<Sequent> apply_manual_rewrite(const Sequent& s, const ReasonerInput& in,
                                          const RuleBase& base) {
  return rewrite_at(s, lookup_rewrite(in, base), in.hyp, in.position, base).antecedents;
}

std::vector<Sequent> apply_manual_inference(const Sequent& s, const ReasonerInput& in,
                                            const RuleBase& base) {
  const auto& inf = lookup_inference(in, base);
  if (direction_of(in) == Direction::Backward) {
    if (in.hyp) throw not_applicable(inf.rule->name, "backward inference takes no hypothesis");
    return infer_backward(s, inf, base).antecedents;
  }
  return infer_forward(s, inf, in.hyp, base).antecedents;
}

std::vector<Sequent> apply_expand_definition(const Sequent& s, const ReasonerInput& in,
                                             const RuleBase& base) {
  return expand_at(s, in.hyp, in.position, base, nullptr);
}

std::vector<Sequent> apply_reasoner(const Sequent& s, const RuleApplication& app,
                                    const RuleBase& base) {
  const std::string id(reasoner_id(app.reasoner));
  switch (app.reasoner) {
    case Reasoner::TrueGoal:
      if (s.goal.tag() != Tag::True) throw not_applicable(id, "the goal is not ⊤");
      return {};
    case Reasoner::Hyp:
      if (!s.has_hypothesis(s.goal)) throw not_applicable(id, "the goal is not a hypothesis");
      return {};
    case Reasoner::ConjI: {
      if (s.goal.tag() != Tag::And) throw not_applicable(id, "the goal is not a conjunction");
      std::vector<Sequent> out;
      for (const auto& c : s.goal.children()) out.push_back(Sequent{s.hypotheses, c});
      return out;
    }
    case Reasoner::ManualRewrite: return apply_manual_rewrite(s, app.input, base);
    case Reasoner::ManualInference: return apply_manual_inference(s, app.input, base);
    case Reasoner::AutoRewrite: return auto_rewrite(s, lookup_rewrite(app.input, base), base, true);
    case Reasoner::AutoInference:
      return auto_inference(s, lookup_inference(app.input, base),
                            app.input.direction.value_or(Direction::Backward), base);
    case Reasoner::ExpandDefinition: {
      RuleRef used;
      auto out = expand_at(s, app.input.hyp, app.input.position, base, &used);
      if (app.input.rule && app.input.rule->name != used.name)
        throw not_applicable(app.input.rule->name, "position holds '" + used.name + "'");
      return out;
    }
  }
  return {};
}

// ---------------------------------------------------------------- proof trees

std::string_view to_string(TreeStatus s) {
  switch (s) {
    case TreeStatus::Open: return "OPEN";
    case TreeStatus::Closed: return "CLOSED";
    case TreeStatus::Stale: return "STALE";
  }
  return "OPEN";
}

ProofTree::ProofTree(Sequent root) {
  ProofNode n;
  n.id = 0;
  n.sequent = std::move(root);
  nodes_.emplace(0, std::move(n));
}

ProofTree ProofTree::from_nodes(std::map<int, ProofNode> nodes, int root) {
  auto corrupt = [](const std::string& why) { return Error(ErrorKind::CorruptProof, why); };
  auto it = nodes.find(root);
  if (it == nodes.end()) throw corrupt("root node " + std::to_string(root) + " missing");
  if (it->second.parent != -1) throw corrupt("root node has a parent");
  std::set<int> seen;
  std::vector<int> stack{root};
  while (!stack.empty()) {
    const int id = stack.back();
    stack.pop_back();
    if (!seen.insert(id).second) throw corrupt("node " + std::to_string(id) + " reached twice");
    const ProofNode& n = nodes.at(id);
    if (n.id != id) throw corrupt("node id mismatch at " + std::to_string(id));
    if (!n.rule && !n.children.empty())
      throw corrupt("pending node " + std::to_string(id) + " has children");
    for (int c : n.children) {
      auto ch = nodes.find(c);
      if (ch == nodes.end() || ch->second.parent != id)
        throw corrupt("bad child link " + std::to_string(id) + " -> " + std::to_string(c));
      stack.push_back(c);
    }
  }
  if (seen.size() != nodes.size()) throw corrupt("unreachable nodes");
  ProofTree t;
  t.nodes_ = std::move(nodes);
  t.root_ = root;
  return t;
}

const ProofNode& ProofTree::node(int id) const {
  auto it = nodes_.find(id);
  if (it == nodes_.end())
    throw Error(ErrorKind::UnknownNode, std::to_string(id), "no proof node " + std::to_string(id));
  return it->second;
}

std::vector<int> ProofTree::preorder() const {
  std::vector<int> out;
  if (nodes_.empty()) return out;
  std::vector<int> stack{root_};
  while (!stack.empty()) {
    int id = stack.back();
    stack.pop_back();
    out.push_back(id);
    const auto& ch = nodes_.at(id).children;
    for (auto it = ch.rbegin(); it != ch.rend(); ++it) stack.push_back(*it);
  }
  return out;
}

std::vector<int> ProofTree::pending() const {
  std::vector<int> out;
  for (int id : preorder())
    if (!nodes_.at(id).rule) out.push_back(id);
  return out;
}

TreeStatus ProofTree::status() const {
  bool open = false, stale = false;
  for (const auto& [id, n] : nodes_) {
    if (!n.rule) open = true;
    if (n.stale) stale = true;
  }
  if (!open) return TreeStatus::Closed;
  return stale ? TreeStatus::Stale : TreeStatus::Open;
}

std::size_t ProofTree::rule_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [](const auto& kv) { return kv.second.rule.has_value(); }));
}

int ProofTree::fresh_id() const { return nodes_.empty() ? 0 : nodes_.rbegin()->first + 1; }

const ProofNode& ProofTree::attach(int id, const RuleApplication& app,
                                   std::vector<Sequent> antecedents) {
  const ProofNode& target = node(id);
  if (target.rule)
    throw Error(ErrorKind::NodeNotPending, std::to_string(id),
                "proof node " + std::to_string(id) + " is not pending");
  std::vector<int> ids;
  for (auto& a : antecedents) {
    ProofNode child;
    child.id = fresh_id();
    child.parent = id;
    child.sequent = std::move(a);
    ids.push_back(child.id);
    nodes_.emplace(child.id, std::move(child));
  }
  ProofNode& n = nodes_.at(id);
  n.rule = app;
  n.children = std::move(ids);
  n.stale = false;
  return n;
}

const ProofNode& ProofTree::apply(int id, const RuleApplication& app, const RuleBase& base) {
  const ProofNode& target = node(id);
  if (target.rule)
    throw Error(ErrorKind::NodeNotPending, std::to_string(id),
                "proof node " + std::to_string(id) + " is not pending");
  auto ants = apply_reasoner(target.sequent, app, base);
  return attach(id, app, std::move(ants));
}

void ProofTree::prune(int id) {
  node(id);
  std::function<void(int)> drop = [&](int n) {
    for (int c : nodes_.at(n).children) {
      drop(c);
      nodes_.erase(c);
    }
  };
  drop(id);
  ProofNode& n = nodes_.at(id);
  n.children.clear();
  n.rule.reset();
  n.stale = false;
}

void ProofTree::mark_stale(int id) {
  node(id);
  nodes_.at(id).stale = true;
}

// ---------------------------------------------------------------- applicable rules

std::vector<Applicable> applicable_rules(const Sequent& s, const RuleBase& base) {
  std::vector<Applicable> out;
  auto hyp_index = [&](const std::optional<Formula>& h) -> std::optional<std::size_t> {
    if (!h) return std::nullopt;
    return static_cast<std::size_t>(
        std::find(s.hypotheses.begin(), s.hypotheses.end(), *h) - s.hypotheses.begin());
  };
  const auto locs = locations(s);
  for (const auto& rw : base.rewrites()) {
    for (const auto& [hyp, pos] : locs) {
      try {
        auto r = rewrite_at(s, rw, hyp, pos, base);
        out.push_back({Reasoner::ManualRewrite, {rw.theory->name, rw.rule->name}, hyp,
                       hyp_index(hyp), pos, std::nullopt, r.binding});
      } catch (const Error&) {
      }
    }
  }
  for (const auto& inf : base.inferences()) {
    const RuleRef ref{inf.theory->name, inf.rule->name};
    if (inf.rule->allows_backward()) {
      try {
        auto r = infer_backward(s, inf, base);
        out.push_back({Reasoner::ManualInference, ref, std::nullopt, std::nullopt, {},
                       Direction::Backward, r.binding});
      } catch (const Error&) {
      }
    }
    if (inf.rule->allows_forward()) {
      std::vector<std::optional<Formula>> candidates;
      if (inf.rule->givens.empty()) candidates.emplace_back(std::nullopt);
      else candidates.assign(s.hypotheses.begin(), s.hypotheses.end());
      for (const auto& h : candidates) {
        try {
          auto r = infer_forward(s, inf, h, base);
          out.push_back({Reasoner::ManualInference, ref, h, hyp_index(h), {}, Direction::Forward,
                         r.binding});
        } catch (const Error&) {
        }
      }
    }
  }
  for (const auto& [hyp, pos] : locs) {
    try {
      RuleRef used;
      expand_at(s, hyp, pos, base, &used);
      out.push_back({Reasoner::ExpandDefinition, used, hyp, hyp_index(hyp), pos, std::nullopt, {}});
    } catch (const Error&) {
    }
  }
  return out;
}

// ---------------------------------------------------------------- tactics

std::string_view to_string(AutoKind k) {
  switch (k) {
    case AutoKind::Expand: return "expand";
    case AutoKind::Rewrite: return "rewrite";
    case AutoKind::Inference: return "inference";
  }
  return "";
}

std::size_t step_budget_from_env() {
  const char* v = std::getenv("THEORIA_STEP_BUDGET");
  if (!v || !*v) return kDefaultStepBudget;
  char* end = nullptr;
  const unsigned long long n = std::strtoull(v, &end, 10);
  if (*end != '\0' || n == 0) return kDefaultStepBudget;
  return static_cast<std::size_t>(n);
}

namespace {

struct Candidate {
  RuleApplication app;
  std::vector<Sequent> antecedents;
};

std::optional<Candidate> first_core(const Sequent& s, const RuleBase& base) {
  for (Reasoner r : {Reasoner::TrueGoal, Reasoner::Hyp, Reasoner::ConjI}) {
    RuleApplication app{r, {}};
    try {
      return Candidate{app, apply_reasoner(s, app, base)};
    } catch (const Error&) {
    }
  }
  return std::nullopt;
}

std::optional<Candidate> first_auto(const Sequent& s, AutoKind kind, const RuleBase& base) {
  switch (kind) {
    case AutoKind::Rewrite:
      for (const auto& rw : base.rewrites()) {
        if (!rw.rule->automatic) continue;
        RuleApplication app{Reasoner::AutoRewrite, {}};
        app.input.rule = RuleRef{rw.theory->name, rw.rule->name};
        try {
          return Candidate{app, auto_rewrite(s, rw, base, true)};
        } catch (const Error&) {
        }
      }
      break;
    case AutoKind::Inference:
      for (const auto& inf : base.inferences()) {
        if (!inf.rule->automatic) continue;
        for (Direction d : {Direction::Backward, Direction::Forward}) {
          if (d == Direction::Backward ? !inf.rule->allows_backward() : !inf.rule->allows_forward())
            continue;
          RuleApplication app{Reasoner::AutoInference, {}};
          app.input.rule = RuleRef{inf.theory->name, inf.rule->name};
          app.input.direction = d;
          try {
            auto ants = auto_inference(s, inf, d, base);
            if (makes_progress(s, ants)) return Candidate{app, std::move(ants)};
          } catch (const Error&) {
          }
        }
      }
      break;
    case AutoKind::Expand:
      for (const auto& t : base.theories()) {
        for (const auto& op : t->operators) {
          if (op.is_axiomatic()) continue;
          for (const auto& [hyp, pos] : locations(s)) {
            const Formula& target = hyp ? *hyp : s.goal;
            const Formula& sub = subformula_at(target, pos);
            if (sub.tag() != Tag::ExtOp || sub.name() != op.signature.name) continue;
            RuleApplication app{Reasoner::ExpandDefinition, {}};
            app.input.rule = RuleRef{t->name, op.signature.name};
            app.input.hyp = hyp;
            app.input.position = pos;
            try {
              auto ants = expand_at(s, hyp, pos, base, nullptr);
              if (makes_progress(s, ants)) return Candidate{app, std::move(ants)};
            } catch (const Error&) {
            }
          }
        }
      }
      break;
  }
  return std::nullopt;
}

}  // namespace

TacticReport auto_tactic(ProofTree& tree, AutoKind kind, const RuleBase& base, std::size_t budget) {
  TacticReport report;
  for (;;) {
    std::optional<std::pair<int, Candidate>> step;
    for (int id : tree.pending()) {
      const Sequent& s = tree.node(id).sequent;
      if (auto c = first_core(s, base)) {
        step.emplace(id, std::move(*c));
        break;
      }
      if (auto c = first_auto(s, kind, base)) {
        step.emplace(id, std::move(*c));
        break;
      }
    }
    if (!step) return report;
    if (report.steps.size() >= budget) throw BudgetExceeded(std::move(report), budget);
    const auto& [id, cand] = *step;
    tree.attach(id, cand.app, cand.antecedents);
    report.steps.push_back({id, cand.app.label(), cand.app.reasoner});
  }
}

// ---------------------------------------------------------------- reuse

std::string_view to_string(ReuseKind k) {
  switch (k) {
    case ReuseKind::Reusable: return "REUSABLE";
    case ReuseKind::NeedsReplay: return "NEEDS_REPLAY";
    case ReuseKind::Incompatible: return "INCOMPATIBLE";
  }
  return "";
}

ReuseVerdict check_reusable(const StoredProof& p, const Sequent& s, const RuleBase& base) {
  FactoryPtr snapshot;
  try {
    snapshot = FormulaFactory::make(p.signatures);
  } catch (const Error& e) {
    throw Error(ErrorKind::CorruptProof, p.po, std::string("invalid factory snapshot: ") + e.what());
  }
  FactoryPtr current = factory_union(base.factory(), s.factory());
  if (auto conflict = factory_conflict(*snapshot, *current))
    return {ReuseKind::Incompatible, *conflict};
  if (p.tree.nodes().empty())
    throw Error(ErrorKind::CorruptProof, p.po, "stored proof has no root");
  if (!(p.tree.node(p.tree.root()).sequent == s))
    return {ReuseKind::Incompatible, "root sequent differs"};
  for (const auto& [id, n] : p.tree.nodes())
    if (n.rule && context_dependent(n.rule->reasoner))
      return {ReuseKind::NeedsReplay, n.rule->label()};
  return {ReuseKind::Reusable, ""};
}

ProofTree replay(const StoredProof& p, const Sequent& s, const RuleBase& base) {
  auto verdict = check_reusable(p, s, base);
  if (verdict.kind == ReuseKind::Incompatible)
    throw Error(ErrorKind::CorruptProof, verdict.reason,
                "stored proof of " + p.po + " is incompatible: " + verdict.reason);
  ProofTree out(s);
  std::function<void(int, int)> rec = [&](int stored, int fresh) {
    const ProofNode& sn = p.tree.node(stored);
    if (!sn.rule) {
      if (sn.stale) out.mark_stale(fresh);
      return;
    }
    std::vector<Sequent> ants;
    try {
      ants = apply_reasoner(out.node(fresh).sequent, *sn.rule, base);
    } catch (const Error&) {
      out.mark_stale(fresh);
      return;
    }
    if (ants.size() != sn.children.size()) {
      out.mark_stale(fresh);
      return;
    }
    const std::vector<int> kids = out.attach(fresh, *sn.rule, std::move(ants)).children;
    for (std::size_t i = 0; i < kids.size(); ++i) rec(sn.children[i], kids[i]);
  };
  rec(p.tree.root(), out.root());
  return out;
}

}  // namespace theoria
