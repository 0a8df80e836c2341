#include "theoria/typing.hpp"

#include <algorithm>

#include "theoria/error.hpp"
#include "theoria/printer.hpp"

namespace theoria {

namespace {

std::string show(const Formula& f) { return print_formula(f, PrintMode::Unicode); }

// First-order unification over Type with Meta variables.
class Inference {
 public:
  explicit Inference(const TypeEnvironment& env) : env_(env) {
    for (const auto& [name, t] : env.vars) {
      if (env.type_params.count(name) || env.given_sets.count(name))
        throw Error(ErrorKind::TypeError, name,
                    "identifier '" + name + "' shadows a type parameter or carrier set");
    }
  }

  Type fresh() { return Type::meta(next_meta_++); }

  Type resolve(const Type& t) const {
    return t.map_leaves([&](const Type& leaf) -> std::optional<Type> {
      if (leaf.kind() != Type::Kind::Meta) return std::nullopt;
      auto it = subst_.find(leaf.meta_id());
      if (it == subst_.end()) return std::nullopt;
      return resolve(it->second);
    });
  }

  void unify(const Type& expected, const Type& found, const Formula& where) {
    if (!unify_rec(expected, found))
      throw Error(ErrorKind::TypeError, show(where),
                  "expected " + resolve(expected).to_string() + ", found " +
                      resolve(found).to_string() + " in '" + show(where) + "'");
  }

  Formula infer(const Formula& f) {
    std::vector<Formula> children;
    children.reserve(f.arity());
    Payload payload = f.payload();

    if (is_binder(f.tag())) {
      const std::size_t mark = scope_.size();
      for (auto& b : payload.bound) {
        if (env_.type_params.count(b.name) || env_.given_sets.count(b.name))
          throw Error(ErrorKind::TypeError, b.name,
                      "bound identifier '" + b.name + "' shadows a type parameter or carrier set");
        if (!b.type) b.type = fresh();
        scope_.emplace_back(b.name, *b.type);
      }
      children.push_back(infer(f.child(0)));
      for (std::size_t i = 0; i < payload.bound.size(); ++i)
        payload.bound[i].type = scope_[mark + i].second;
      scope_.erase(scope_.begin() + static_cast<std::ptrdiff_t>(mark), scope_.end());
      return mk_node(f.tag(), std::move(children), std::move(payload), f.factory());
    }

    for (const auto& c : f.children()) children.push_back(infer(c));
    auto ty = [&](std::size_t i) -> Type { return *children[i].type(); };

    std::optional<Type> result;
    switch (f.tag()) {
      case Tag::True:
      case Tag::False:
      case Tag::Not:
      case Tag::And:
      case Tag::Or:
      case Tag::Implies:
      case Tag::Iff:
      case Tag::Forall:
      case Tag::Exists:
        break;
      case Tag::Equal:
        unify(ty(0), ty(1), f);
        break;
      case Tag::In:
        unify(Type::power(ty(0)), ty(1), f);
        break;
      case Tag::Subset: {
        Type elem = fresh();
        unify(Type::power(elem), ty(0), f);
        unify(ty(0), ty(1), f);
        break;
      }
      case Tag::Ident:
        result = ident_type(f.name());
        break;
      case Tag::IntLit: result = Type::integer(); break;
      case Tag::BoolLit: result = Type::boolean(); break;
      case Tag::IntegerSet: result = Type::power(Type::integer()); break;
      case Tag::BoolSet: result = Type::power(Type::boolean()); break;
      case Tag::EmptySet: result = Type::power(fresh()); break;
      case Tag::SetExt: {
        Type elem = ty(0);
        for (std::size_t i = 1; i < children.size(); ++i) unify(elem, ty(i), f);
        result = Type::power(elem);
        break;
      }
      case Tag::Plus:
      case Tag::Minus:
      case Tag::Mul:
      case Tag::Div:
        unify(Type::integer(), ty(0), f);
        unify(Type::integer(), ty(1), f);
        result = Type::integer();
        break;
      case Tag::Neg:
        unify(Type::integer(), ty(0), f);
        result = Type::integer();
        break;
      case Tag::Range:
        unify(Type::integer(), ty(0), f);
        unify(Type::integer(), ty(1), f);
        result = Type::power(Type::integer());
        break;
      case Tag::Maplet:
        result = Type::product(ty(0), ty(1));
        break;
      case Tag::Pow: {
        Type elem = fresh();
        unify(Type::power(elem), ty(0), f);
        result = Type::power(ty(0));
        break;
      }
      case Tag::CProd: {
        Type a = fresh(), b = fresh();
        unify(Type::power(a), ty(0), f);
        unify(Type::power(b), ty(1), f);
        result = Type::power(Type::product(a, b));
        break;
      }
      case Tag::Union:
      case Tag::Inter: {
        Type elem = fresh();
        unify(Type::power(elem), ty(0), f);
        unify(ty(0), ty(1), f);
        result = ty(0);
        break;
      }
      case Tag::FComp: {
        Type first = fresh(), link = fresh();
        unify(Type::power(Type::product(first, link)), ty(0), f);
        for (std::size_t i = 1; i < children.size(); ++i) {
          Type next = fresh();
          unify(Type::power(Type::product(link, next)), ty(i), f);
          link = next;
        }
        result = Type::power(Type::product(first, link));
        break;
      }
      case Tag::ExtOp: {
        const OperatorSig* op = f.factory()->find_operator(f.name());
        auto inst = instantiate_params(op);
        for (std::size_t i = 0; i < children.size(); ++i) {
          const auto& declared = op->associative ? op->args[0] : op->args[i];
          unify(declared.type.substitute_params(inst), ty(i), f);
        }
        if (op->result) result = op->result->substitute_params(inst);
        break;
      }
      case Tag::Constructor: {
        auto ref = f.factory()->find_constructor(f.name());
        auto inst = instantiate(ref->datatype->type_params);
        const auto& ctor = ref->datatype->constructors[ref->constructor];
        for (std::size_t i = 0; i < children.size(); ++i)
          unify(ctor.destructors[i].type.substitute_params(inst), ty(i), f);
        result = ref->datatype->instance_type().substitute_params(inst);
        break;
      }
      case Tag::Destructor: {
        auto ref = f.factory()->find_destructor(f.name());
        auto inst = instantiate(ref->datatype->type_params);
        unify(ref->datatype->instance_type().substitute_params(inst), ty(0), f);
        result = ref->datatype->constructors[ref->constructor]
                     .destructors[ref->destructor]
                     .type.substitute_params(inst);
        break;
      }
      case Tag::ExtSet: {
        if (f.factory()->is_axiomatic_type(f.name())) {
          result = Type::power(Type::given(f.name()));
          break;
        }
        std::vector<Type> args;
        for (std::size_t i = 0; i < children.size(); ++i) {
          Type elem = fresh();
          unify(Type::power(elem), ty(i), f);
          args.push_back(elem);
        }
        result = Type::power(Type::datatype(f.name(), std::move(args)));
        break;
      }
    }

    if (result) {
      if (f.type()) unify(*f.type(), *result, f);
      payload.type = result;
    }
    return mk_node(f.tag(), std::move(children), std::move(payload), f.factory());
  }

  // Second pass: resolve every annotation; leftover metas are errors or new
  // type parameters.
  Formula finalize(const Formula& f, bool generalize) {
    std::vector<Formula> children;
    children.reserve(f.arity());
    for (const auto& c : f.children()) children.push_back(finalize(c, generalize));
    Payload payload = f.payload();
    for (auto& b : payload.bound) b.type = close(resolve(*b.type), generalize, b.name);
    if (payload.type) payload.type = close(resolve(*payload.type), generalize, show(f));
    return mk_node(f.tag(), std::move(children), std::move(payload), f.factory());
  }

  Type close(const Type& t, bool generalize, const std::string& what) {
    if (!t.has_metas()) return t;
    if (!generalize)
      throw Error(ErrorKind::UnresolvedTypeParam, what,
                  "cannot infer the type of '" + what + "' (" + t.to_string() + ")");
    return t.map_leaves([&](const Type& leaf) -> std::optional<Type> {
      if (leaf.kind() != Type::Kind::Meta) return std::nullopt;
      auto it = generalized_.find(leaf.meta_id());
      if (it != generalized_.end()) return it->second;
      std::set<std::string> avoid = env_.type_params;
      for (const auto& [id, p] : generalized_) avoid.insert(p.name());
      Type p = Type::param(fresh_name("T", avoid));
      generalized_.emplace(leaf.meta_id(), p);
      return p;
    });
  }

  const std::map<std::string, Type>& inferred_free() const { return free_; }
  std::set<std::string> generalized_params() const {
    std::set<std::string> out;
    for (const auto& [id, p] : generalized_) out.insert(p.name());
    return out;
  }

 private:
  Type ident_type(const std::string& name) {
    for (auto it = scope_.rbegin(); it != scope_.rend(); ++it)
      if (it->first == name) return it->second;
    if (auto it = env_.vars.find(name); it != env_.vars.end()) return it->second;
    if (env_.type_params.count(name)) return Type::power(Type::param(name));
    if (env_.given_sets.count(name)) return Type::power(Type::given(name));
    auto [it, inserted] = free_.emplace(name, Type::integer());
    if (inserted) it->second = fresh();
    return it->second;
  }

  std::map<std::string, Type> instantiate(const std::vector<std::string>& params) {
    std::map<std::string, Type> inst;
    for (const auto& p : params) inst.emplace(p, fresh());
    return inst;
  }

  std::map<std::string, Type> instantiate_params(const OperatorSig* op) {
    std::set<std::string> params;
    for (const auto& a : op->args) a.type.collect_params(params);
    if (op->result) op->result->collect_params(params);
    return instantiate({params.begin(), params.end()});
  }

  bool occurs(int id, const Type& t) const {
    Type r = resolve(t);
    if (r.kind() == Type::Kind::Meta) return r.meta_id() == id;
    for (const auto& a : r.args())
      if (occurs(id, a)) return true;
    return false;
  }

  bool unify_rec(const Type& x, const Type& y) {
    Type a = resolve(x), b = resolve(y);
    if (a == b) return true;
    if (a.kind() == Type::Kind::Meta) {
      if (occurs(a.meta_id(), b)) return false;
      subst_.insert_or_assign(a.meta_id(), b);
      return true;
    }
    if (b.kind() == Type::Kind::Meta) return unify_rec(b, a);
    if (a.kind() != b.kind() || a.name() != b.name() || a.args().size() != b.args().size())
      return false;
    for (std::size_t i = 0; i < a.args().size(); ++i)
      if (!unify_rec(a.args()[i], b.args()[i])) return false;
    return true;
  }

  const TypeEnvironment& env_;
  int next_meta_ = 0;
  std::map<int, Type> subst_;
  std::vector<std::pair<std::string, Type>> scope_;
  std::map<std::string, Type> free_;
  std::map<int, Type> generalized_;
};

}  // namespace

std::vector<Formula> typecheck_together(const std::vector<Formula>& formulas,
                                        TypeEnvironment& env,
                                        const TypecheckOptions& options) {
  Inference inference(env);
  std::vector<Formula> provisional;
  provisional.reserve(formulas.size());
  for (const auto& f : formulas) provisional.push_back(inference.infer(f));
  std::vector<Formula> typed;
  typed.reserve(formulas.size());
  for (const auto& f : provisional) typed.push_back(inference.finalize(f, options.generalize));
  for (const auto& [name, t] : inference.inferred_free())
    env.vars.emplace(name, inference.close(inference.resolve(t), options.generalize, name));
  for (const auto& p : inference.generalized_params()) env.type_params.insert(p);
  return typed;
}

Formula typecheck(const Formula& f, const TypeEnvironment& env) {
  TypeEnvironment scratch = env;
  return typecheck_together({f}, scratch).front();
}

const Type& type_of(const Formula& expr) {
  if (!expr.type())
    throw Error(ErrorKind::TypeError, show(expr), "'" + show(expr) + "' is not typechecked");
  return *expr.type();
}

Type apply_type(const Type& t, const Specialisation& s) { return t.substitute_params(s.types); }

TypeEnvironment apply_env(const TypeEnvironment& env, const Specialisation& s) {
  TypeEnvironment out;
  out.given_sets = env.given_sets;
  for (const auto& p : env.type_params)
    if (!s.types.count(p)) out.type_params.insert(p);
  for (const auto& [p, t] : s.types) {
    std::set<std::string> params;
    t.collect_params(params);
    out.type_params.insert(params.begin(), params.end());
  }
  for (const auto& [name, t] : env.vars)
    if (!s.vars.count(name)) out.vars.emplace(name, apply_type(t, s));
  // Free identifiers of the images, with the types recorded on their nodes.
  std::function<void(const Formula&, std::vector<std::string>&)> collect =
      [&](const Formula& f, std::vector<std::string>& bound) {
        if (f.tag() == Tag::Ident && f.type() &&
            std::find(bound.begin(), bound.end(), f.name()) == bound.end() &&
            !out.type_params.count(f.name()) && !out.given_sets.count(f.name()))
          out.vars.emplace(f.name(), *f.type());
        const std::size_t mark = bound.size();
        for (const auto& b : f.bound()) bound.push_back(b.name);
        for (const auto& c : f.children()) collect(c, bound);
        bound.resize(mark);
      };
  for (const auto& [name, e] : s.vars) {
    std::vector<std::string> bound;
    collect(e, bound);
  }
  return out;
}

void check_consistent(const Specialisation& s, const TypeEnvironment& env) {
  for (const auto& [p, t] : s.types) {
    if (s.vars.count(p))
      throw Error(ErrorKind::InconsistentSpecialisation, p,
                  "'" + p + "' is specialised both as a type and as a variable");
    if (env.given_sets.count(p))
      throw Error(ErrorKind::InconsistentSpecialisation, p,
                  "type parameter '" + p + "' names a carrier set");
  }
  for (const auto& [v, e] : s.vars) {
    if (!e || !e.is_expression())
      throw Error(ErrorKind::InconsistentSpecialisation, v, "'" + v + "' must map to an expression");
    if (!e.type())
      throw Error(ErrorKind::InconsistentSpecialisation, v,
                  "image of '" + v + "' is not typechecked");
    auto it = env.vars.find(v);
    if (it == env.vars.end()) continue;
    Type expected = apply_type(it->second, s);
    if (*e.type() != expected)
      throw Error(ErrorKind::InconsistentSpecialisation, v,
                  "'" + v + "' has type " + expected.to_string() + " but is mapped to '" +
                      show(e) + "' of type " + e.type()->to_string());
  }
}

std::string fresh_name(const std::string& base, const std::set<std::string>& avoid) {
  std::string name = base;
  while (avoid.count(name)) name += '\'';
  return name;
}

namespace {

class Substituter {
 public:
  Substituter(const Specialisation& s, FactoryPtr factory) : s_(s), factory_(std::move(factory)) {
    for (const auto& [v, e] : s.vars) image_free_[v] = free_identifiers(e);
  }

  Formula run(const Formula& f) {
    std::map<std::string, std::string> renames;
    std::set<std::string> shadowed;
    return sub(f, renames, shadowed);
  }

 private:
  std::optional<Type> apply(const std::optional<Type>& t) const {
    if (!t) return t;
    return apply_type(*t, s_);
  }

  Formula sub(const Formula& f, std::map<std::string, std::string>& renames,
              std::set<std::string>& shadowed) {
    if (f.tag() == Tag::Ident) {
      Payload p = f.payload();
      p.type = apply(p.type);
      if (auto it = renames.find(f.name()); it != renames.end()) {
        p.name = it->second;
        return mk_node(Tag::Ident, {}, std::move(p), f.factory());
      }
      if (!shadowed.count(f.name())) {
        if (auto it = s_.vars.find(f.name()); it != s_.vars.end()) return it->second;
        if (auto it = s_.types.find(f.name()); it != s_.types.end())
          return type_to_expression(it->second, factory_union(f.factory(), factory_));
      }
      return mk_node(Tag::Ident, {}, std::move(p), f.factory());
    }

    Payload p = f.payload();
    p.type = apply(p.type);
    if (!is_binder(f.tag())) {
      std::vector<Formula> children;
      children.reserve(f.arity());
      for (const auto& c : f.children()) children.push_back(sub(c, renames, shadowed));
      return mk_node(f.tag(), std::move(children), std::move(p), f.factory());
    }

    // Images that will actually be inserted below this binder.
    const std::set<std::string> body_free = free_identifiers(f.child(0));
    std::set<std::string> incoming;
    std::set<std::string> bound_here;
    for (const auto& b : f.bound()) bound_here.insert(b.name);
    for (const auto& name : body_free) {
      if (bound_here.count(name) || shadowed.count(name)) continue;
      if (auto it = image_free_.find(name); it != image_free_.end())
        incoming.insert(it->second.begin(), it->second.end());
      if (auto it = renames.find(name); it != renames.end()) incoming.insert(it->second);
    }

    auto saved_renames = renames;
    auto saved_shadowed = shadowed;
    std::set<std::string> avoid = incoming;
    avoid.insert(body_free.begin(), body_free.end());
    for (const auto& [from, to] : renames) avoid.insert(to);
    for (auto& b : p.bound) {
      b.type = apply(b.type);
      if (incoming.count(b.name)) {
        std::string fresh = fresh_name(b.name, avoid);
        avoid.insert(fresh);
        renames[b.name] = fresh;
        b.name = fresh;
      } else {
        renames.erase(b.name);
        shadowed.insert(b.name);
      }
    }
    Formula body = sub(f.child(0), renames, shadowed);
    renames = std::move(saved_renames);
    shadowed = std::move(saved_shadowed);
    return mk_node(f.tag(), {std::move(body)}, std::move(p), f.factory());
  }

  const Specialisation& s_;
  FactoryPtr factory_;
  std::map<std::string, std::set<std::string>> image_free_;
};

}  // namespace

Formula specialise(const Formula& f, const Specialisation& s, const TypeEnvironment& env) {
  check_consistent(s, env);
  if (s.empty()) return f;
  return Substituter(s, s.factory ? s.factory : FormulaFactory::core()).run(f);
}

Specialisation compose(const Specialisation& s1, const Specialisation& s2,
                       const TypeEnvironment& env) {
  Specialisation out;
  out.factory = s1.factory && s2.factory ? factory_union(s1.factory, s2.factory)
                                         : (s1.factory ? s1.factory : s2.factory);
  const TypeEnvironment mid = apply_env(env, s1);
  for (const auto& [p, t] : s1.types) out.types.emplace(p, apply_type(t, s2));
  for (const auto& [p, t] : s2.types) out.types.emplace(p, t);
  for (const auto& [v, e] : s1.vars) out.vars.emplace(v, specialise(e, s2, mid));
  for (const auto& [v, e] : s2.vars) out.vars.emplace(v, e);
  return out;
}

Formula type_to_expression(const Type& t, const FactoryPtr& factory) {
  const FactoryPtr f = factory ? factory : FormulaFactory::core();
  Payload p;
  p.type = Type::power(t);
  switch (t.kind()) {
    case Type::Kind::Int: return mk_node(Tag::IntegerSet, {}, std::move(p));
    case Type::Kind::Bool: return mk_node(Tag::BoolSet, {}, std::move(p));
    case Type::Kind::Param:
      p.name = t.name();
      return mk_node(Tag::Ident, {}, std::move(p));
    case Type::Kind::Given:
      p.name = t.name();
      if (f->is_axiomatic_type(t.name())) return mk_node(Tag::ExtSet, {}, std::move(p), f);
      return mk_node(Tag::Ident, {}, std::move(p));
    case Type::Kind::Power:
      return mk_node(Tag::Pow, {type_to_expression(t.inner(), f)}, std::move(p));
    case Type::Kind::Product:
      return mk_node(Tag::CProd,
                     {type_to_expression(t.left(), f), type_to_expression(t.right(), f)},
                     std::move(p));
    case Type::Kind::Datatype: {
      std::vector<Formula> args;
      for (const auto& a : t.args()) args.push_back(type_to_expression(a, f));
      p.name = t.name();
      return mk_node(Tag::ExtSet, std::move(args), std::move(p), f);
    }
    case Type::Kind::Meta: break;
  }
  throw Error(ErrorKind::UnresolvedTypeParam, t.to_string(),
              "type " + t.to_string() + " has no set expression");
}

std::optional<Type> expression_to_type(const Formula& e) {
  switch (e.tag()) {
    case Tag::IntegerSet: return Type::integer();
    case Tag::BoolSet: return Type::boolean();
    case Tag::Pow: {
      auto inner = expression_to_type(e.child(0));
      if (!inner) return std::nullopt;
      return Type::power(*inner);
    }
    case Tag::CProd: {
      auto l = expression_to_type(e.child(0));
      auto r = expression_to_type(e.child(1));
      if (!l || !r) return std::nullopt;
      return Type::product(*l, *r);
    }
    case Tag::ExtSet: {
      if (e.factory()->is_axiomatic_type(e.name())) return Type::given(e.name());
      std::vector<Type> args;
      for (const auto& c : e.children()) {
        auto a = expression_to_type(c);
        if (!a) return std::nullopt;
        args.push_back(*a);
      }
      return Type::datatype(e.name(), std::move(args));
    }
    case Tag::Ident: {
      if (!e.type() || !e.type()->is_power()) return std::nullopt;
      const Type& inner = e.type()->inner();
      if ((inner.kind() == Type::Kind::Param || inner.kind() == Type::Kind::Given) &&
          inner.name() == e.name())
        return inner;
      return std::nullopt;
    }
    default: return std::nullopt;
  }
}

}  // namespace theoria
