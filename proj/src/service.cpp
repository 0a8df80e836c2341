#include "theoria/service.hpp"

#include <algorithm>
#include <ostream>
#include <regex>
#include <sstream>
#include <stdexcept>

#include "theoria/parser.hpp"

namespace theoria {

// ---------------------------------------------------------------- tactics

TacticReport run_auto(ProofTree& tree, const std::vector<AutoKind>& order, const RuleBase& base,
                      std::size_t budget) {
  TacticReport total;
  for (;;) {
    const std::size_t before = total.steps.size();
    for (AutoKind k : order) {
      if (tree.status() == TreeStatus::Closed) return total;
      try {
        TacticReport r = auto_tactic(tree, k, base, budget - total.steps.size());
        total.steps.insert(total.steps.end(), r.steps.begin(), r.steps.end());
      } catch (const BudgetExceeded& e) {
        total.steps.insert(total.steps.end(), e.report().steps.begin(), e.report().steps.end());
        throw BudgetExceeded(std::move(total), budget);
      }
    }
    if (total.steps.size() == before) return total;
  }
}

std::vector<AutoKind> parse_auto_order(const std::string& csv) {
  std::vector<AutoKind> out;
  std::stringstream in(csv);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item == "expand") out.push_back(AutoKind::Expand);
    else if (item == "rewrite") out.push_back(AutoKind::Rewrite);
    else if (item == "inference") out.push_back(AutoKind::Inference);
    else throw std::invalid_argument("unknown auto tactic '" + item + "'");
  }
  if (out.empty()) throw std::invalid_argument("empty auto tactic order");
  return out;
}

OpenedProof open_proof(const Workspace& ws, const ProofObligation& po, const RuleBase& base,
                       bool use_stored) {
  if (!po.sequent) throw Error(ErrorKind::TypeError, po.id, po.error);
  OpenedProof out{ProofTree(*po.sequent), std::nullopt};
  if (!use_stored) return out;
  auto stored = ws.load_proof(po);
  if (!stored) return out;
  out.verdict = check_reusable(*stored, *po.sequent, base);
  switch (out.verdict->kind) {
    case ReuseKind::Reusable: out.tree = stored->tree; break;
    case ReuseKind::NeedsReplay: out.tree = replay(*stored, *po.sequent, base); break;
    case ReuseKind::Incompatible: break;
  }
  return out;
}

// ---------------------------------------------------------------- prove

json outcome_to_json(const PoOutcome& o) {
  json steps = json::array();
  for (const auto& s : o.steps)
    steps.push_back({{"node", s.node}, {"rule", s.rule}, {"reasoner", std::string(reasoner_id(s.reasoner))}});
  return {{"po", o.id},
          {"status", o.status},
          {"reason", o.reason},
          {"ruleCount", o.rule_count},
          {"applications", o.steps.size()},
          {"replay", o.verdict ? json(std::string(to_string(*o.verdict))) : json()},
          {"budgetExceeded", o.budget_exceeded},
          {"steps", steps}};
}

PoOutcome prove_obligation(Workspace& ws, const ProofObligation& po, const ProveOptions& opts) {
  PoOutcome out;
  out.id = po.id;
  RuleBase base = ws.rule_base(po.theories);

  if (!po.sequent) {
    // The PO may no longer typecheck because an extension changed; a stored
    // proof still tells which one.
    if (opts.replay) {
      if (auto stored = ws.load_proof(po)) {
        FactoryPtr snapshot = FormulaFactory::make(stored->signatures);
        if (auto conflict = factory_conflict(*snapshot, *base.factory())) {
          out.status = "INCOMPATIBLE";
          out.reason = *conflict;
          out.verdict = ReuseKind::Incompatible;
          return out;
        }
      }
    }
    out.status = "ERROR";
    out.reason = po.error;
    return out;
  }

  OpenedProof opened = open_proof(ws, po, base, opts.replay);
  if (opened.verdict) out.verdict = opened.verdict->kind;
  if (opened.verdict && opened.verdict->kind == ReuseKind::Incompatible) {
    out.status = "INCOMPATIBLE";
    out.reason = opened.verdict->reason;
    return out;
  }
  ProofTree& tree = opened.tree;
  if (opts.run_auto) {
    try {
      out.steps = run_auto(tree, opts.order, base, opts.budget).steps;
    } catch (const BudgetExceeded& e) {
      out.steps = e.report().steps;
      out.budget_exceeded = true;
      out.reason = e.what();
    }
  }
  ws.save_proof(po, tree, base);
  out.status = std::string(to_string(tree.status()));
  out.rule_count = tree.rule_count();
  return out;
}

namespace {

bool parse_failure(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::IoError:
    case ErrorKind::SyntaxError:
    case ErrorKind::UnknownOperator:
    case ErrorKind::UnknownType:
    case ErrorKind::DuplicateName:
    case ErrorKind::InvalidNotation:
    case ErrorKind::InvalidSignature:
    case ErrorKind::DuplicateExtension:
    case ErrorKind::IncompatibleFactories:
    case ErrorKind::UnknownExtension:
    case ErrorKind::ArityMismatch:
    case ErrorKind::KindMismatch:
    case ErrorKind::CorruptProof:
      return true;
    default:
      return false;
  }
}

// The nearest directory at or above `first` that has a theories/ directory,
// else the directory of `first`.
fs::path default_root(const std::string& root, const fs::path& first) {
  if (!root.empty()) return root;
  std::error_code ec;
  fs::path start = fs::is_directory(first, ec) ? first : first.parent_path();
  if (start.empty()) start = ".";
  for (fs::path d = fs::absolute(start, ec); !d.empty(); d = d.parent_path()) {
    if (fs::is_directory(d / "theories", ec)) return d;
    if (d == d.parent_path()) break;
  }
  return start;
}

}  // namespace

int cmd_check(const std::vector<std::string>& paths, const std::string& root, std::ostream& out,
              std::ostream& err) {
  int code = 0;
  for (const auto& arg : paths) {
    const fs::path p(arg);
    try {
      std::error_code ec;
      if (!fs::exists(p, ec)) throw Error(ErrorKind::IoError, arg, "cannot read " + arg);
      Workspace ws(default_root(root, p));
      std::vector<const LoadedTheory*> checked;
      if (fs::is_directory(p, ec)) {
        for (const auto& n : ws.theory_names()) checked.push_back(&ws.load_theory(n));
      } else {
        checked.push_back(&ws.load_theory_file(p));
      }
      for (const LoadedTheory* lt : checked) {
        if (lt->diagnostics.empty()) {
          out << lt->path.string() << ": ok\n";
          continue;
        }
        code = std::max(code, 1);
        out << lt->path.string() << ": " << lt->diagnostics.size() << " diagnostic(s)\n";
        for (const auto& d : lt->diagnostics)
          out << "  " << d.code << " " << d.subject << (d.detail.empty() ? "" : ": " + d.detail) << "\n";
      }
    } catch (const Error& e) {
      err << arg << ": " << e.what() << "\n";
      code = parse_failure(e) ? 2 : std::max(code, 1);
    }
  }
  return code;
}

int cmd_prove(const std::vector<std::string>& seq_files, const std::string& root,
              const ProveOptions& opts, bool json_report, std::ostream& out, std::ostream& err) {
  int code = 0;
  json report = json::array();
  for (const auto& arg : seq_files) {
    try {
      Workspace ws(default_root(root, arg));
      ws.add_sequent_file(arg);
      for (const auto& po : ws.obligations()) {
        PoOutcome o;
        try {
          o = prove_obligation(ws, po, opts);
        } catch (const Error& e) {
          o.id = po.id;
          o.status = "ERROR";
          o.reason = e.what();
        }
        if (o.status == "ERROR") code = 2;
        else if (o.status != "CLOSED") code = std::max(code, 1);
        if (json_report) {
          report.push_back(outcome_to_json(o));
          continue;
        }
        out << o.id << " " << o.status;
        if (o.status == "INCOMPATIBLE") out << "(" << o.reason << ")";
        out << " rules=" << o.rule_count << " applications=" << o.steps.size();
        if (o.verdict) out << " replay=" << to_string(*o.verdict);
        if (o.budget_exceeded) out << " budget-exceeded";
        out << "\n";
        if (o.status == "ERROR") err << o.id << ": " << o.reason << "\n";
      }
    } catch (const Error& e) {
      err << arg << ": " << e.what() << "\n";
      code = 2;
    }
  }
  if (json_report) out << json{{"version", kApiVersion}, {"pos", report}}.dump(2) << "\n";
  return code;
}

// ---------------------------------------------------------------- HTTP service

int http_status(ErrorKind k) {
  switch (k) {
    case ErrorKind::UnknownObligation:
    case ErrorKind::UnknownNode:
      return 404;
    case ErrorKind::NodeNotPending:
      return 409;
    case ErrorKind::RuleNotApplicable:
    case ErrorKind::DirectionNotAllowed:
    case ErrorKind::NotExpandable:
    case ErrorKind::UnknownRule:
    case ErrorKind::InvalidPosition:
    case ErrorKind::BudgetExceeded:
    case ErrorKind::TypeError:
      return 422;
    case ErrorKind::IoError:
      return 500;
    default:
      return 400;
  }
}

json error_json(const Error& e) {
  return {{"version", kApiVersion},
          {"error", std::string(to_string(e.kind()))},
          {"subject", e.subject()},
          {"message", e.what()}};
}

Service::Service(fs::path root) : root_(std::move(root)) { state_ = load(); }

std::unique_ptr<Service::State> Service::load() {
  auto st = std::make_unique<State>();
  st->ws = std::make_unique<Workspace>(root_);
  st->ws->add_all_sequent_files();
  for (const auto& po : st->ws->obligations()) {
    auto e = std::make_unique<Entry>();
    e->base = std::make_unique<RuleBase>(st->ws->rule_base(po.theories));
    if (po.sequent) {
      try {
        OpenedProof opened = open_proof(*st->ws, po, *e->base, true);
        e->tree = std::move(opened.tree);
        e->verdict = opened.verdict;
      } catch (const Error& err) {
        if (err.kind() != ErrorKind::CorruptProof) throw;
        e->tree = ProofTree(*po.sequent);
        e->verdict = ReuseVerdict{ReuseKind::Incompatible, err.what()};
      }
    }
    st->order.push_back(po.id);
    st->entries.emplace(po.id, std::move(e));
  }
  return st;
}

Service::Entry& Service::entry(const std::string& po) {
  auto it = state_->entries.find(po);
  if (it == state_->entries.end())
    throw Error(ErrorKind::UnknownObligation, po, "no proof obligation '" + po + "'");
  return *it->second;
}

Service::Response Service::tree_response(const std::string& po, const Entry& e) {
  json body{{"version", kApiVersion}, {"po", po}};
  body["tree"] = e.tree ? store::tree_to_json(*e.tree) : json();
  return {200, body};
}

Service::Response Service::list_pos() {
  std::shared_lock lock(state_mutex_);
  json pos = json::array();
  for (const auto& id : state_->order) {
    Entry& e = *state_->entries.at(id);
    std::lock_guard guard(e.mutex);
    const ProofObligation& po = state_->ws->obligation(id);
    json item{{"id", id},
              {"name", po.name},
              {"file", fs::relative(po.seq_path, root_).generic_string()},
              {"status", e.tree ? std::string(to_string(e.tree->status())) : "ERROR"},
              {"ruleCount", e.tree ? e.tree->rule_count() : 0}};
    if (!po.sequent) item["error"] = po.error;
    if (e.verdict) item["replay"] = std::string(to_string(e.verdict->kind));
    pos.push_back(std::move(item));
  }
  return {200, {{"version", kApiVersion}, {"pos", pos}}};
}

Service::Response Service::get_tree(const std::string& po) {
  std::shared_lock lock(state_mutex_);
  Entry& e = entry(po);
  std::lock_guard guard(e.mutex);
  return tree_response(po, e);
}

Service::Response Service::applicable(const std::string& po, int node) {
  std::shared_lock lock(state_mutex_);
  Entry& e = entry(po);
  std::lock_guard guard(e.mutex);
  if (!e.tree) throw Error(ErrorKind::TypeError, po, state_->ws->obligation(po).error);
  const ProofNode& n = e.tree->node(node);
  json list = json::array();
  if (!n.rule)
    for (const auto& a : applicable_rules(n.sequent, *e.base)) list.push_back(store::applicable_to_json(a));
  return {200, {{"version", kApiVersion}, {"po", po}, {"node", node}, {"applicable", list}}};
}

Service::Response Service::mutate(const std::string& po,
                                  const std::function<json(Entry&, const ProofObligation&)>& fn) {
  std::shared_lock lock(state_mutex_);
  Entry& e = entry(po);
  std::lock_guard guard(e.mutex);
  const ProofObligation& obligation = state_->ws->obligation(po);
  if (!e.tree) throw Error(ErrorKind::TypeError, po, obligation.error);
  ProofTree before = *e.tree;
  json extra;
  try {
    extra = fn(e, obligation);
    state_->ws->save_proof(obligation, *e.tree, *e.base);
  } catch (...) {
    e.tree = std::move(before);
    throw;
  }
  e.verdict.reset();
  Response r = tree_response(po, e);
  for (auto& [k, v] : extra.items()) r.body[k] = v;
  return r;
}

namespace {

int int_field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key) || !j[key].is_number_integer())
    throw Error(ErrorKind::SyntaxError, key, std::string("request needs an integer '") + key + "'");
  return j[key].get<int>();
}

RuleApplication application_from_request(const json& req, const Sequent& s, const FactoryPtr& f) {
  if (!req.is_object() || !req.contains("reasoner") || !req["reasoner"].is_string())
    throw Error(ErrorKind::SyntaxError, "reasoner", "request needs a 'reasoner'");
  const std::string id = req["reasoner"].get<std::string>();
  auto r = reasoner_from_id(id);
  if (!r) throw Error(ErrorKind::UnknownRule, id, "unknown reasoner '" + id + "'");
  RuleApplication app{*r, {}};
  const json in = req.value("input", json::object());
  if (in.contains("rule") && !in["rule"].is_null()) {
    const json& rule = in["rule"];
    app.input.rule = RuleRef{rule.value("theory", ""), rule.value("name", "")};
  }
  if (in.contains("hypIndex") && !in["hypIndex"].is_null()) {
    const auto i = in["hypIndex"].get<std::size_t>();
    if (i >= s.hypotheses.size())
      throw Error(ErrorKind::RuleNotApplicable, std::to_string(i), "no hypothesis " + std::to_string(i));
    app.input.hyp = s.hypotheses[i];
  } else if (in.contains("hyp") && !in["hyp"].is_null()) {
    try {
      app.input.hyp = store::formula_from_json(in["hyp"], f);
    } catch (const Error& e) {
      throw Error(ErrorKind::SyntaxError, "hyp", e.what());
    }
  }
  if (in.contains("position") && in["position"].is_string())
    app.input.position = position_from_string(in["position"].get<std::string>());
  if (in.contains("direction") && in["direction"].is_string()) {
    const std::string d = in["direction"].get<std::string>();
    if (d != "forward" && d != "backward")
      throw Error(ErrorKind::SyntaxError, d, "unknown direction '" + d + "'");
    app.input.direction = d == "forward" ? Direction::Forward : Direction::Backward;
  }
  return app;
}

}  // namespace

Service::Response Service::apply(const std::string& po, const json& request) {
  return mutate(po, [&](Entry& e, const ProofObligation&) {
    const int node = int_field(request, "node");
    const ProofNode& n = e.tree->node(node);
    RuleApplication app = application_from_request(request, n.sequent, e.base->factory());
    e.tree->apply(node, app, *e.base);
    return json::object();
  });
}

Service::Response Service::run_auto_tactics(const std::string& po, const json& request) {
  std::vector<AutoKind> order{AutoKind::Expand, AutoKind::Rewrite, AutoKind::Inference};
  std::size_t budget = step_budget_from_env();
  if (request.is_object() && request.contains("tactics")) {
    order.clear();
    for (const auto& t : request["tactics"]) {
      const std::string name = t.is_string() ? t.get<std::string>() : "";
      try {
        auto one = parse_auto_order(name);
        order.insert(order.end(), one.begin(), one.end());
      } catch (const std::invalid_argument& ex) {
        throw Error(ErrorKind::SyntaxError, name, ex.what());
      }
    }
  }
  if (request.is_object() && request.contains("budget")) budget = int_field(request, "budget");
  return mutate(po, [&](Entry& e, const ProofObligation&) {
    TacticReport report;
    bool exceeded = false;
    try {
      report = run_auto(*e.tree, order, *e.base, budget);
    } catch (const BudgetExceeded& ex) {
      report = ex.report();
      exceeded = true;
    }
    json steps = json::array();
    for (const auto& s : report.steps)
      steps.push_back({{"node", s.node}, {"rule", s.rule}, {"reasoner", std::string(reasoner_id(s.reasoner))}});
    return json{{"report", {{"applications", report.applications()}, {"budgetExceeded", exceeded}, {"steps", steps}}}};
  });
}

Service::Response Service::prune(const std::string& po, const json& request) {
  return mutate(po, [&](Entry& e, const ProofObligation&) {
    e.tree->prune(int_field(request, "nodeId"));
    return json::object();
  });
}

Service::Response Service::replay_all() {
  std::unique_lock lock(state_mutex_);
  state_ = load();
  json results = json::array();
  for (const auto& id : state_->order) {
    Entry& e = *state_->entries.at(id);
    const ProofObligation& po = state_->ws->obligation(id);
    json item{{"id", id},
              {"verdict", e.verdict ? json(std::string(to_string(e.verdict->kind))) : json()},
              {"reason", e.verdict ? e.verdict->reason : ""},
              {"status", e.tree ? std::string(to_string(e.tree->status())) : "ERROR"}};
    if (e.tree && e.verdict && e.verdict->kind != ReuseKind::Incompatible)
      state_->ws->save_proof(po, *e.tree, *e.base);
    results.push_back(std::move(item));
  }
  return {200, {{"version", kApiVersion}, {"results", results}}};
}

Service::Response Service::handle(const std::string& method, const std::string& path,
                                  const std::string& body) {
  static const std::regex tree_re(R"(^/pos/([^/]+)/tree$)");
  static const std::regex applicable_re(R"(^/pos/([^/]+)/nodes/(-?[0-9]+)/applicable$)");
  static const std::regex action_re(R"(^/pos/([^/]+)/(apply|auto|prune)$)");
  try {
    json request = json::object();
    if (method == "POST" && !body.empty()) {
      request = json::parse(body, nullptr, false);
      if (request.is_discarded())
        throw Error(ErrorKind::SyntaxError, "body", "request body is not valid JSON");
    }
    std::smatch m;
    if (method == "GET" && path == "/pos") return list_pos();
    if (method == "GET" && std::regex_match(path, m, tree_re)) return get_tree(m[1]);
    if (method == "GET" && std::regex_match(path, m, applicable_re))
      return applicable(m[1], std::stoi(m[2]));
    if (method == "POST" && std::regex_match(path, m, action_re)) {
      if (m[2] == "apply") return apply(m[1], request);
      if (m[2] == "auto") return run_auto_tactics(m[1], request);
      return prune(m[1], request);
    }
    if (method == "POST" && path == "/replay") return replay_all();
    return {404, {{"version", kApiVersion}, {"error", "NotFound"}, {"subject", path},
                  {"message", "no route " + method + " " + path}}};
  } catch (const Error& e) {
    return {http_status(e.kind()), error_json(e)};
  } catch (const std::exception& e) {
    return {400, {{"version", kApiVersion}, {"error", "BadRequest"}, {"subject", ""}, {"message", e.what()}}};
  }
}

}  // namespace theoria
