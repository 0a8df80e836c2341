#include "theoria/matcher.hpp"

#include <algorithm>

namespace theoria {

namespace {

void collect_vars(const Formula& f, std::vector<std::string>& bound,
                  const std::set<std::string>& type_params, std::map<std::string, Type>& out) {
  if (f.tag() == Tag::Ident) {
    if (std::find(bound.begin(), bound.end(), f.name()) == bound.end() &&
        !type_params.count(f.name()) && f.type())
      out.emplace(f.name(), *f.type());
    return;
  }
  const std::size_t mark = bound.size();
  for (const auto& b : f.bound()) bound.push_back(b.name);
  for (const auto& c : f.children()) collect_vars(c, bound, type_params, out);
  bound.resize(mark);
}

class Matcher {
 public:
  Matcher(const Pattern& p, Specialisation seed) : env_(p.env), s_(std::move(seed)) {}

  bool node(const Formula& pat, const Formula& subj) {
    if (pat.is_predicate() != subj.is_predicate()) return false;
    if (pat.tag() == Tag::Ident) return ident(pat, subj);
    if (pat.tag() != subj.tag()) return false;
    if (!types(pat, subj)) return false;
    if (pat.name() != subj.name() || pat.value() != subj.value()) return false;

    if (is_binder(pat.tag())) {
      if (pat.bound().size() != subj.bound().size()) return false;
      for (std::size_t i = 0; i < pat.bound().size(); ++i) {
        const auto& pb = pat.bound()[i];
        const auto& sb = subj.bound()[i];
        if (pb.type && sb.type && !match_type(*pb.type, *sb.type, env_.type_params, s_.types))
          return false;
      }
      const std::size_t mark = renames_.size();
      for (std::size_t i = 0; i < pat.bound().size(); ++i)
        renames_.emplace_back(pat.bound()[i].name, subj.bound()[i].name);
      const bool ok = node(pat.child(0), subj.child(0));
      renames_.resize(mark);
      return ok;
    }
    if (is_flattened(pat) && is_flattened(subj)) return assoc(pat, subj);
    if (pat.arity() != subj.arity()) return false;
    for (std::size_t i = 0; i < pat.arity(); ++i)
      if (!node(pat.child(i), subj.child(i))) return false;
    return true;
  }

  bool assoc(const Formula& pat, const Formula& subj) { return operands(pat, subj, 0, 0); }

  Specialisation& result() { return s_; }

 private:
  bool types(const Formula& pat, const Formula& subj) {
    if (!pat.type() || !subj.type()) return true;
    return match_type(*pat.type(), *subj.type(), env_.type_params, s_.types);
  }

  const std::string* renamed(const std::string& name) const {
    for (auto it = renames_.rbegin(); it != renames_.rend(); ++it)
      if (it->first == name) return &it->second;
    return nullptr;
  }

  bool subject_bound(const std::string& name) const {
    return std::any_of(renames_.begin(), renames_.end(),
                       [&](const auto& r) { return r.second == name; });
  }

  bool is_unknown(const Formula& pat) const {
    return pat.tag() == Tag::Ident && env_.vars.count(pat.name()) && !renamed(pat.name());
  }

  bool ident(const Formula& pat, const Formula& subj) {
    if (const std::string* to = renamed(pat.name()))
      return subj.tag() == Tag::Ident && subj.name() == *to && types(pat, subj);
    if (env_.vars.count(pat.name())) {
      if (!types(pat, subj)) return false;
      // would capture a variable bound inside the matched region
      for (const auto& name : free_identifiers(subj))
        if (subject_bound(name)) return false;
      auto it = s_.vars.find(pat.name());
      if (it != s_.vars.end()) return it->second == subj;
      s_.vars.emplace(pat.name(), subj);
      return true;
    }
    if (env_.type_params.count(pat.name())) {
      auto t = expression_to_type(subj);
      return t && match_type(Type::param(pat.name()), *t, env_.type_params, s_.types);
    }
    return subj.tag() == Tag::Ident && subj.name() == pat.name() && !subject_bound(subj.name()) &&
           types(pat, subj);
  }

  bool operands(const Formula& pat, const Formula& subj, std::size_t pi, std::size_t si) {
    const std::size_t pn = pat.arity(), sn = subj.arity();
    if (pi == pn) return si == sn;
    if (si >= sn) return false;
    const std::size_t rest = pn - pi - 1;  // pattern operands after this one
    if (sn - si < rest + 1) return false;
    const Formula& op = pat.child(pi);
    if (!is_unknown(op)) {
      Specialisation saved = s_;
      if (node(op, subj.child(si)) && operands(pat, subj, pi + 1, si + 1)) return true;
      s_ = std::move(saved);
      return false;
    }
    const std::size_t max_take = sn - si - rest;
    const std::size_t min_take = rest == 0 ? max_take : 1;
    for (std::size_t k = min_take; k <= max_take; ++k) {
      Specialisation saved = s_;
      if (node(op, assoc_run(subj, si, k)) && operands(pat, subj, pi + 1, si + k)) return true;
      s_ = std::move(saved);
    }
    return false;
  }

  const TypeEnvironment& env_;
  Specialisation s_;
  std::vector<std::pair<std::string, std::string>> renames_;  // pattern bound -> subject bound
};

std::optional<Specialisation> finish(Matcher& m, const Pattern& p, const Formula& subject) {
  Specialisation s = std::move(m.result());
  FactoryPtr f = factory_union(p.formula.factory(), subject.factory());
  s.factory = s.factory ? factory_union(s.factory, f) : f;
  return s;
}

}  // namespace

Pattern make_pattern(const Formula& f, const std::set<std::string>& type_params) {
  Pattern p;
  p.formula = f;
  p.env.type_params = type_params;
  std::vector<std::string> bound;
  collect_vars(f, bound, type_params, p.env.vars);
  return p;
}

Pattern make_pattern(const Formula& f, const TypeEnvironment& env) { return Pattern{f, env}; }

bool match_type(const Type& pattern, const Type& subject, const std::set<std::string>& unknowns,
                std::map<std::string, Type>& bindings) {
  if (pattern.kind() == Type::Kind::Param && unknowns.count(pattern.name())) {
    auto it = bindings.find(pattern.name());
    if (it != bindings.end()) return it->second == subject;
    bindings.emplace(pattern.name(), subject);
    return true;
  }
  if (pattern.kind() != subject.kind() || pattern.name() != subject.name() ||
      pattern.args().size() != subject.args().size() || pattern.meta_id() != subject.meta_id())
    return false;
  for (std::size_t i = 0; i < pattern.args().size(); ++i)
    if (!match_type(pattern.args()[i], subject.args()[i], unknowns, bindings)) return false;
  return true;
}

std::optional<Specialisation> match(const Pattern& p, const Formula& subject,
                                    const Specialisation& seed) {
  Matcher m(p, seed);
  if (!m.node(p.formula, subject)) return std::nullopt;
  return finish(m, p, subject);
}

std::optional<Specialisation> match_assoc(const Pattern& pattern_node, const Formula& subject_node,
                                          const Specialisation& seed) {
  const Formula& pat = pattern_node.formula;
  if (!is_flattened(pat) || !is_flattened(subject_node) || pat.tag() != subject_node.tag() ||
      pat.name() != subject_node.name())
    return std::nullopt;
  Matcher m(pattern_node, seed);
  if (!m.assoc(pat, subject_node)) return std::nullopt;
  return finish(m, pattern_node, subject_node);
}

}  // namespace theoria
