#include "theoria/proof_store.hpp"

#include "theoria/printer.hpp"

namespace theoria::store {

namespace {

Error corrupt(const std::string& what) { return Error(ErrorKind::CorruptProof, what); }

const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw corrupt(std::string("missing field '") + key + "'");
  return j.at(key);
}

std::string str(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_string()) throw corrupt(std::string("field '") + key + "' is not a string");
  return v.get<std::string>();
}

}  // namespace

// ---------------------------------------------------------------- types

json type_to_json(const Type& t) {
  switch (t.kind()) {
    case Type::Kind::Int: return json::array({"int"});
    case Type::Kind::Bool: return json::array({"bool"});
    case Type::Kind::Param: return json::array({"param", t.name()});
    case Type::Kind::Given: return json::array({"given", t.name()});
    case Type::Kind::Power: return json::array({"pow", type_to_json(t.inner())});
    case Type::Kind::Product:
      return json::array({"prod", type_to_json(t.left()), type_to_json(t.right())});
    case Type::Kind::Datatype: {
      json args = json::array();
      for (const auto& a : t.args()) args.push_back(type_to_json(a));
      return json::array({"data", t.name(), args});
    }
    case Type::Kind::Meta: return json::array({"meta", t.meta_id()});
  }
  return json();
}

Type type_from_json(const json& j) {
  if (!j.is_array() || j.empty() || !j[0].is_string()) throw corrupt("malformed type " + j.dump());
  const std::string k = j[0].get<std::string>();
  auto want = [&](std::size_t n) {
    if (j.size() != n) throw corrupt("malformed type " + j.dump());
  };
  if (k == "int") return want(1), Type::integer();
  if (k == "bool") return want(1), Type::boolean();
  if (k == "param" || k == "given") {
    want(2);
    if (!j[1].is_string()) throw corrupt("malformed type " + j.dump());
    return k == "param" ? Type::param(j[1].get<std::string>()) : Type::given(j[1].get<std::string>());
  }
  if (k == "pow") return want(2), Type::power(type_from_json(j[1]));
  if (k == "prod") return want(3), Type::product(type_from_json(j[1]), type_from_json(j[2]));
  if (k == "data") {
    want(3);
    if (!j[1].is_string() || !j[2].is_array()) throw corrupt("malformed type " + j.dump());
    std::vector<Type> args;
    for (const auto& a : j[2]) args.push_back(type_from_json(a));
    return Type::datatype(j[1].get<std::string>(), std::move(args));
  }
  throw corrupt("unknown type kind '" + k + "'");
}

// ---------------------------------------------------------------- formulas

json ast_to_json(const Formula& f) {
  json j;
  j["tag"] = std::string(tag_name(f.tag()));
  if (!f.name().empty()) j["name"] = f.name();
  if (f.tag() == Tag::IntLit || f.tag() == Tag::BoolLit) j["value"] = f.value();
  if (!f.bound().empty()) {
    json b = json::array();
    for (const auto& x : f.bound()) {
      json e{{"name", x.name}};
      if (x.type) e["type"] = type_to_json(*x.type);
      b.push_back(std::move(e));
    }
    j["bound"] = std::move(b);
  }
  if (f.type()) j["type"] = type_to_json(*f.type());
  if (f.payload().ascribed) j["ascribed"] = true;
  if (f.arity()) {
    json c = json::array();
    for (const auto& ch : f.children()) c.push_back(ast_to_json(ch));
    j["children"] = std::move(c);
  }
  return j;
}

json formula_to_json(const Formula& f) {
  return json{{"text", print_formula(f, PrintMode::Unicode)}, {"ast", ast_to_json(f)}};
}

namespace {

Formula ast_from_json(const json& j, const FactoryPtr& factory) {
  const std::string tag_text = str(j, "tag");
  auto tag = tag_from_name(tag_text);
  if (!tag) throw corrupt("unknown tag '" + tag_text + "'");
  Payload p;
  if (j.contains("name")) p.name = str(j, "name");
  if (j.contains("value")) {
    if (!j["value"].is_number_integer()) throw corrupt("non-integer value");
    p.value = j["value"].get<std::int64_t>();
  }
  if (j.contains("bound")) {
    for (const auto& b : j["bound"]) {
      BoundIdent x{str(b, "name"), std::nullopt};
      if (b.contains("type")) x.type = type_from_json(b["type"]);
      p.bound.push_back(std::move(x));
    }
  }
  if (j.contains("type")) p.type = type_from_json(j["type"]);
  p.ascribed = j.value("ascribed", false);
  std::vector<Formula> children;
  if (j.contains("children")) {
    if (!j["children"].is_array()) throw corrupt("children is not an array");
    for (const auto& c : j["children"]) children.push_back(ast_from_json(c, factory));
  }
  const bool extension = *tag == Tag::ExtOp || *tag == Tag::Constructor ||
                         *tag == Tag::Destructor || *tag == Tag::ExtSet;
  try {
    return mk_node(*tag, std::move(children), std::move(p), extension ? factory : nullptr);
  } catch (const Error& e) {
    throw corrupt(std::string("invalid formula node: ") + e.what());
  }
}

}  // namespace

Formula formula_from_json(const json& j, const FactoryPtr& factory) {
  if (j.is_object() && j.contains("ast")) return ast_from_json(j["ast"], factory);
  return ast_from_json(j, factory);
}

// ---------------------------------------------------------------- signatures

namespace {

json typed_names(const std::vector<TypedName>& v) {
  json out = json::array();
  for (const auto& n : v) out.push_back({{"name", n.name}, {"type", type_to_json(n.type)}});
  return out;
}

std::vector<TypedName> typed_names_from(const json& j) {
  if (!j.is_array()) throw corrupt("expected a list of typed names");
  std::vector<TypedName> out;
  for (const auto& n : j) out.push_back({str(n, "name"), type_from_json(field(n, "type"))});
  return out;
}

}  // namespace

json signature_to_json(const ExtensionSignature& sig) {
  if (const auto* d = std::get_if<DatatypeSig>(&sig)) {
    json ctors = json::array();
    for (const auto& c : d->constructors)
      ctors.push_back({{"name", c.name}, {"destructors", typed_names(c.destructors)}});
    return {{"kind", "datatype"}, {"name", d->name}, {"typeParams", d->type_params},
            {"constructors", ctors}};
  }
  if (const auto* a = std::get_if<AxiomaticTypeSig>(&sig))
    return {{"kind", "axiomaticType"}, {"name", a->name}};
  const auto& o = std::get<OperatorSig>(sig);
  return {{"kind", "operator"},
          {"name", o.name},
          {"notation", o.notation == Notation::Infix ? "infix" : "prefix"},
          {"formulaKind", o.is_predicate() ? "predicate" : "expression"},
          {"args", typed_names(o.args)},
          {"result", o.result ? type_to_json(*o.result) : json()},
          {"associative", o.associative},
          {"commutative", o.commutative},
          {"symbol", o.symbol ? json(*o.symbol) : json()}};
}

ExtensionSignature signature_from_json(const json& j) {
  const std::string kind = str(j, "kind");
  if (kind == "datatype") {
    DatatypeSig d;
    d.name = str(j, "name");
    for (const auto& p : field(j, "typeParams")) d.type_params.push_back(p.get<std::string>());
    for (const auto& c : field(j, "constructors"))
      d.constructors.push_back({str(c, "name"), typed_names_from(field(c, "destructors"))});
    return d;
  }
  if (kind == "axiomaticType") return AxiomaticTypeSig{str(j, "name")};
  if (kind == "operator") {
    OperatorSig o;
    o.name = str(j, "name");
    o.notation = str(j, "notation") == "infix" ? Notation::Infix : Notation::Prefix;
    o.formula_kind =
        str(j, "formulaKind") == "predicate" ? FormulaKind::Predicate : FormulaKind::Expression;
    o.args = typed_names_from(field(j, "args"));
    if (j.contains("result") && !j["result"].is_null()) o.result = type_from_json(j["result"]);
    o.associative = j.value("associative", false);
    o.commutative = j.value("commutative", false);
    if (j.contains("symbol") && !j["symbol"].is_null()) o.symbol = str(j, "symbol");
    return o;
  }
  throw corrupt("unknown signature kind '" + kind + "'");
}

std::vector<ExtensionSignature> factory_snapshot(const FactoryPtr& f) {
  std::vector<ExtensionSignature> out;
  if (!f) return out;
  for (const auto& [name, sig] : f->extensions()) out.push_back(sig);
  return out;
}

// ---------------------------------------------------------------- sequents, rules

json sequent_to_json(const Sequent& s) {
  json hyps = json::array();
  for (const auto& h : s.hypotheses) hyps.push_back(formula_to_json(h));
  return {{"hyps", hyps}, {"goal", formula_to_json(s.goal)}};
}

Sequent sequent_from_json(const json& j, const FactoryPtr& factory) {
  Sequent s;
  for (const auto& h : field(j, "hyps")) s.hypotheses.push_back(formula_from_json(h, factory));
  s.goal = formula_from_json(field(j, "goal"), factory);
  return s;
}

json rule_ref_to_json(const std::optional<RuleRef>& r) {
  if (!r) return json();
  return {{"theory", r->theory}, {"name", r->name}};
}

json application_to_json(const RuleApplication& app) {
  json input{{"hyp", app.input.hyp ? formula_to_json(*app.input.hyp) : json()},
             {"position", position_to_string(app.input.position)},
             {"direction", app.input.direction ? json(std::string(to_string(*app.input.direction))) : json()}};
  return {{"reasoner", std::string(reasoner_id(app.reasoner))},
          {"label", app.label()},
          {"contextDependent", context_dependent(app.reasoner)},
          {"rule", rule_ref_to_json(app.input.rule)},
          {"input", input}};
}

RuleApplication application_from_json(const json& j, const FactoryPtr& factory) {
  const std::string id = str(j, "reasoner");
  auto r = reasoner_from_id(id);
  if (!r) throw corrupt("unknown reasoner '" + id + "'");
  RuleApplication app{*r, {}};
  if (j.contains("rule") && !j["rule"].is_null())
    app.input.rule = RuleRef{str(j["rule"], "theory"), str(j["rule"], "name")};
  if (j.contains("input")) {
    const json& in = j["input"];
    if (in.contains("hyp") && !in["hyp"].is_null()) app.input.hyp = formula_from_json(in["hyp"], factory);
    if (in.contains("position")) {
      try {
        app.input.position = position_from_string(str(in, "position"));
      } catch (const Error& e) {
        throw corrupt(e.what());
      }
    }
    if (in.contains("direction") && !in["direction"].is_null()) {
      const std::string d = str(in, "direction");
      if (d != "forward" && d != "backward") throw corrupt("unknown direction '" + d + "'");
      app.input.direction = d == "forward" ? Direction::Forward : Direction::Backward;
    }
  }
  return app;
}

json specialisation_to_json(const Specialisation& s) {
  json types = json::object(), vars = json::object();
  for (const auto& [n, t] : s.types) types[n] = type_to_json(t);
  for (const auto& [n, e] : s.vars) vars[n] = formula_to_json(e);
  return {{"types", types}, {"vars", vars}};
}

json applicable_to_json(const Applicable& a) {
  return {{"reasoner", std::string(reasoner_id(a.reasoner))},
          {"rule", rule_ref_to_json(a.rule)},
          {"hyp", a.hyp ? formula_to_json(*a.hyp) : json()},
          {"hypIndex", a.hyp_index ? json(*a.hyp_index) : json()},
          {"position", position_to_string(a.position)},
          {"direction", a.direction ? json(std::string(to_string(*a.direction))) : json()},
          {"binding", specialisation_to_json(a.binding)}};
}

// ---------------------------------------------------------------- trees

json node_to_json(const ProofTree& t, int id) {
  const ProofNode& n = t.node(id);
  json children = json::array();
  for (int c : n.children) children.push_back(node_to_json(t, c));
  return {{"id", n.id},
          {"sequent", sequent_to_json(n.sequent)},
          {"rule", n.rule ? application_to_json(*n.rule) : json()},
          {"stale", n.stale},
          {"children", children}};
}

json tree_to_json(const ProofTree& t) {
  return {{"status", std::string(to_string(t.status()))},
          {"ruleCount", t.rule_count()},
          {"pending", t.pending()},
          {"root", node_to_json(t, t.root())}};
}

namespace {

void nodes_from_json(const json& j, int parent, const FactoryPtr& factory,
                     std::map<int, ProofNode>& out) {
  ProofNode n;
  const json& id = field(j, "id");
  if (!id.is_number_integer()) throw corrupt("node id is not an integer");
  n.id = id.get<int>();
  n.parent = parent;
  n.sequent = sequent_from_json(field(j, "sequent"), factory);
  if (j.contains("rule") && !j["rule"].is_null()) n.rule = application_from_json(j["rule"], factory);
  n.stale = j.value("stale", false);
  const json& kids = field(j, "children");
  if (!kids.is_array()) throw corrupt("children is not an array");
  for (const auto& c : kids) n.children.push_back(field(c, "id").get<int>());
  if (out.count(n.id)) throw corrupt("duplicate node id " + std::to_string(n.id));
  const int self = n.id;
  out.emplace(self, std::move(n));
  for (const auto& c : kids) nodes_from_json(c, self, factory, out);
}

}  // namespace

ProofTree tree_from_json(const json& root_node, const FactoryPtr& factory) {
  std::map<int, ProofNode> nodes;
  nodes_from_json(root_node, -1, factory, nodes);
  const int root = field(root_node, "id").get<int>();
  return ProofTree::from_nodes(std::move(nodes), root);
}

// ---------------------------------------------------------------- proofs

json proof_to_json(const StoredProof& p) {
  json sigs = json::array();
  for (const auto& s : p.signatures) sigs.push_back(signature_to_json(s));
  std::string fid;
  try {
    fid = FormulaFactory::make(p.signatures)->id();
  } catch (const Error&) {
  }
  return {{"format", kProofFormat},
          {"version", kProofFormatVersion},
          {"po", p.po},
          {"factory", {{"id", fid}, {"signatures", sigs}}},
          {"status", std::string(to_string(p.tree.status()))},
          {"ruleCount", p.tree.rule_count()},
          {"root", node_to_json(p.tree, p.tree.root())}};
}

StoredProof proof_from_json(const json& j) {
  try {
    if (str(j, "format") != kProofFormat) throw corrupt("not a proof file");
    const json& v = field(j, "version");
    if (!v.is_number_integer() || v.get<int>() != kProofFormatVersion)
      throw corrupt("unsupported proof format version " + v.dump());
    StoredProof p;
    p.po = str(j, "po");
    for (const auto& s : field(field(j, "factory"), "signatures"))
      p.signatures.push_back(signature_from_json(s));
    FactoryPtr f;
    try {
      f = FormulaFactory::make(p.signatures);
    } catch (const Error& e) {
      throw corrupt(std::string("invalid factory snapshot: ") + e.what());
    }
    p.tree = tree_from_json(field(j, "root"), f);
    return p;
  } catch (const json::exception& e) {
    throw corrupt(e.what());
  }
}

std::string dump_proof(const StoredProof& p) { return proof_to_json(p).dump(2) + "\n"; }

StoredProof parse_proof(std::string_view text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw corrupt("proof file is not valid JSON");
  return proof_from_json(j);
}

}  // namespace theoria::store
