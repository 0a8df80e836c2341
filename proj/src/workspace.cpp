#include "theoria/workspace.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "theoria/parser.hpp"
#include "theoria/proof_store.hpp"

namespace theoria {

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, p.string(), "cannot read " + p.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file_atomic(const fs::path& p, const std::string& text) {
  fs::path tmp = p;
  tmp += ".tmp" + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::IoError, p.string(), "cannot write " + tmp.string());
    out << text;
    out.flush();
    if (!out) throw Error(ErrorKind::IoError, p.string(), "cannot write " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, p, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(ErrorKind::IoError, p.string(), "cannot replace " + p.string());
  }
}

namespace {

bool hidden(const fs::path& p, const fs::path& root) {
  for (const auto& part : fs::relative(p, root))
    if (part.string().size() > 1 && part.string()[0] == '.') return true;
  return false;
}

std::vector<fs::path> files_below(const fs::path& root, const std::string& ext) {
  std::vector<fs::path> out;
  std::error_code ec;
  if (!fs::is_directory(root, ec)) return out;
  for (auto it = fs::recursive_directory_iterator(root, ec); it != fs::recursive_directory_iterator();
       it.increment(ec)) {
    if (ec) break;
    if (it->is_regular_file() && it->path().extension() == ext && !hidden(it->path(), root))
      out.push_back(it->path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

Error invalid(const std::string& subject, const std::string& msg) {
  return Error(ErrorKind::InvalidTheory, subject, msg);
}

}  // namespace

Workspace::Workspace(fs::path root) : root_(std::move(root)) {
  std::error_code ec;
  if (!fs::is_directory(root_, ec))
    throw Error(ErrorKind::IoError, root_.string(), root_.string() + " is not a directory");
  for (const auto& p : files_below(root_, ".thy")) {
    const TheoryHeader h = read_theory_header(read_file(p), p.string());
    auto [it, fresh] = index_.emplace(h.name, p);
    if (!fresh && it->second != p)
      throw Error(ErrorKind::DuplicateName, h.name,
                  "theory '" + h.name + "' is defined by " + it->second.string() + " and " + p.string());
  }
}

std::vector<std::string> Workspace::theory_names() const {
  std::vector<std::string> out;
  for (const auto& [n, p] : index_) out.push_back(n);
  return out;
}

void Workspace::closure(const std::string& name, std::vector<std::string>& order,
                        std::vector<std::string>& visiting) {
  if (std::find(order.begin(), order.end(), name) != order.end()) return;
  if (std::find(visiting.begin(), visiting.end(), name) != visiting.end())
    throw invalid(name, "import cycle through theory '" + name + "'");
  auto it = index_.find(name);
  if (it == index_.end())
    throw Error(ErrorKind::IoError, name, "no theory named '" + name + "' under " + root_.string());
  visiting.push_back(name);
  const TheoryHeader h = read_theory_header(read_file(it->second), it->second.string());
  for (const auto& i : h.imports) closure(i, order, visiting);
  visiting.pop_back();
  order.push_back(name);
}

const LoadedTheory& Workspace::load_theory(const std::string& name) {
  if (auto it = loaded_.find(name); it != loaded_.end()) return it->second;
  std::vector<std::string> order, visiting;
  closure(name, order, visiting);
  for (const auto& n : order) {
    if (loaded_.count(n)) continue;
    const fs::path& p = index_.at(n);
    const std::string text = read_file(p);
    const TheoryHeader h = read_theory_header(text, p.string());
    std::vector<FactoryPtr> imports;
    for (const auto& i : h.imports) {
      const LoadedTheory& dep = loaded_.at(i);
      if (!dep.theory)
        throw invalid(n, "imported theory '" + i + "' has " + std::to_string(dep.diagnostics.size()) +
                             " diagnostic(s)");
      imports.push_back(dep.theory->factory);
    }
    LoadedTheory lt;
    lt.path = p;
    auto parsed = std::make_shared<Theory>(parse_theory(text, imports, p.string()));
    lt.parsed = parsed;
    lt.diagnostics = validate_theory(*parsed);
    if (lt.diagnostics.empty()) lt.theory = std::make_shared<Theory>(elaborate_theory(*parsed));
    loaded_.emplace(n, std::move(lt));
  }
  return loaded_.at(name);
}

const LoadedTheory& Workspace::load_theory_file(const fs::path& file) {
  const TheoryHeader h = read_theory_header(read_file(file), file.string());
  auto it = index_.find(h.name);
  if (it == index_.end()) {
    index_.emplace(h.name, file);
  } else if (fs::weakly_canonical(it->second) != fs::weakly_canonical(file)) {
    throw Error(ErrorKind::DuplicateName, h.name,
                "theory '" + h.name + "' is defined by " + it->second.string() + " and " + file.string());
  }
  return load_theory(h.name);
}

RuleBase Workspace::rule_base(const std::vector<std::string>& theories) {
  std::vector<std::string> order, visiting;
  for (const auto& t : theories) closure(t, order, visiting);
  std::vector<TheoryPtr> out;
  for (const auto& n : order) {
    const LoadedTheory& lt = load_theory(n);
    if (!lt.theory)
      throw invalid(n, "theory '" + n + "' has " + std::to_string(lt.diagnostics.size()) +
                           " diagnostic(s)");
    out.push_back(lt.theory);
  }
  FactoryPtr f = FormulaFactory::core();
  for (const auto& t : out) f = factory_union(f, t->factory);
  return RuleBase(std::move(out));
}

std::vector<std::string> Workspace::add_sequent_file(const fs::path& file) {
  const std::string text = read_file(file);
  const auto names = read_sequent_theories(text, file.string());
  RuleBase base = rule_base(names);
  SequentFile sf = parse_sequent_file(text, base.factory(), file.string());
  std::vector<std::string> ids;
  const std::string stem = file.stem().string();
  for (const auto& e : sf.entries) {
    ProofObligation po;
    po.id = stem + "." + e.name;
    po.name = e.name;
    po.seq_path = file;
    po.proof_path = file.parent_path() / (po.id + ".prf.json");
    po.theories = names;
    po.given_sets = e.given_sets;
    if (std::any_of(obligations_.begin(), obligations_.end(),
                    [&](const ProofObligation& o) { return o.id == po.id; }))
      throw Error(ErrorKind::DuplicateName, po.id, "proof obligation '" + po.id + "' is defined twice");
    try {
      TypeEnvironment env;
      env.given_sets.insert(e.given_sets.begin(), e.given_sets.end());
      std::vector<Formula> all;
      for (const auto& h : e.hypotheses) all.push_back(h.formula);
      all.push_back(e.goal);
      auto typed = typecheck_together(all, env);
      Sequent s;
      s.goal = typed.back();
      typed.pop_back();
      for (auto& h : typed)
        if (!s.has_hypothesis(h)) s.hypotheses.push_back(std::move(h));
      po.sequent = std::move(s);
    } catch (const Error& err) {
      po.error = err.what();
    }
    ids.push_back(po.id);
    obligations_.push_back(std::move(po));
  }
  return ids;
}

void Workspace::add_all_sequent_files() {
  for (const auto& p : files_below(root_, ".seq")) add_sequent_file(p);
}

const ProofObligation& Workspace::obligation(const std::string& id) const {
  for (const auto& po : obligations_)
    if (po.id == id) return po;
  throw Error(ErrorKind::UnknownObligation, id, "no proof obligation '" + id + "'");
}

std::optional<StoredProof> Workspace::load_proof(const ProofObligation& po) const {
  std::error_code ec;
  if (!fs::exists(po.proof_path, ec)) return std::nullopt;
  StoredProof p = store::parse_proof(read_file(po.proof_path));
  if (p.po != po.id)
    throw Error(ErrorKind::CorruptProof, po.id,
                po.proof_path.string() + " holds a proof of '" + p.po + "'");
  return p;
}

void Workspace::save_proof(const ProofObligation& po, const ProofTree& tree,
                           const RuleBase& base) const {
  StoredProof p;
  p.po = po.id;
  FactoryPtr f = base.factory();
  if (po.sequent) f = factory_union(f, po.sequent->factory());
  p.signatures = store::factory_snapshot(f);
  p.tree = tree;
  write_file_atomic(po.proof_path, store::dump_proof(p));
}

}  // namespace theoria
