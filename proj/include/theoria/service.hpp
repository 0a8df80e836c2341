#pragma once

#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <vector>

#include "theoria/proof_store.hpp"
#include "theoria/workspace.hpp"

namespace theoria {

using store::json;

inline constexpr int kApiVersion = 1;

// Runs the auto tactics in `order`, repeating the whole sequence until a round
// makes no application. `budget` is shared by all rounds. Throws BudgetExceeded
// carrying every application made.
TacticReport run_auto(ProofTree& tree, const std::vector<AutoKind>& order, const RuleBase& base,
                      std::size_t budget);

std::vector<AutoKind> parse_auto_order(const std::string& csv);  // throws std::invalid_argument

// The tree a PO starts from: the stored proof when it is reusable, its replay
// when it needs one, otherwise a fresh root.
struct OpenedProof {
  ProofTree tree;
  std::optional<ReuseVerdict> verdict;  // set when a stored proof existed
};
OpenedProof open_proof(const Workspace& ws, const ProofObligation& po, const RuleBase& base,
                       bool use_stored);

struct ProveOptions {
  bool run_auto = false;
  bool replay = false;
  std::vector<AutoKind> order{AutoKind::Expand, AutoKind::Rewrite, AutoKind::Inference};
  std::size_t budget = kDefaultStepBudget;
};

struct PoOutcome {
  std::string id;
  std::string status;  // CLOSED, OPEN, STALE, INCOMPATIBLE or ERROR
  std::string reason;
  std::size_t rule_count = 0;
  std::optional<ReuseKind> verdict;
  std::vector<TacticStep> steps;
  bool budget_exceeded = false;
};
json outcome_to_json(const PoOutcome& o);

// Proves one PO and persists the result (except INCOMPATIBLE and ERROR).
PoOutcome prove_obligation(Workspace& ws, const ProofObligation& po, const ProveOptions& opts);

// Exit codes: 0 all fine, 1 diagnostics / unfinished proofs, 2 IO or parse failure.
int cmd_check(const std::vector<std::string>& paths, const std::string& root, std::ostream& out,
              std::ostream& err);
int cmd_prove(const std::vector<std::string>& seq_files, const std::string& root,
              const ProveOptions& opts, bool json_report, std::ostream& out, std::ostream& err);

// JSON-over-HTTP API, independent of the transport. Every mutation is
// persisted before the response is produced; a failed one changes nothing.
class Service {
 public:
  struct Response {
    int status = 200;
    json body;
  };

  explicit Service(fs::path root);

  Response handle(const std::string& method, const std::string& path, const std::string& body);

  Response list_pos();
  Response get_tree(const std::string& po);
  Response applicable(const std::string& po, int node);
  Response apply(const std::string& po, const json& request);
  Response run_auto_tactics(const std::string& po, const json& request);
  Response prune(const std::string& po, const json& request);
  Response replay_all();

 private:
  struct Entry {
    std::mutex mutex;
    std::unique_ptr<RuleBase> base;
    std::optional<ProofTree> tree;  // none when the PO does not typecheck
    std::optional<ReuseVerdict> verdict;
  };
  struct State {
    std::unique_ptr<Workspace> ws;
    std::map<std::string, std::unique_ptr<Entry>> entries;
    std::vector<std::string> order;
  };

  std::unique_ptr<State> load();
  Entry& entry(const std::string& po);                // throws UnknownObligation
  Response tree_response(const std::string& po, const Entry& e);
  Response mutate(const std::string& po, const std::function<json(Entry&, const ProofObligation&)>& fn);

  fs::path root_;
  std::shared_mutex state_mutex_;
  std::unique_ptr<State> state_;
};

// HTTP status for a kernel error.
int http_status(ErrorKind k);
json error_json(const Error& e);

// The HTTP transport. bind() with port 0 picks a free port; listen() blocks
// until stop() is called from another thread.
class HttpServer {
 public:
  HttpServer(Service& service, const std::string& static_dir = "");
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  bool serves_static() const;
  int bind(const std::string& host, int port);  // bound port, or -1
  void listen();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Blocks serving `service` on host:port; static files under `static_dir` when
// given. Returns 2 when the port cannot be bound.
int serve_http(Service& service, const std::string& host, int port, const std::string& static_dir,
               std::ostream& err);

}  // namespace theoria
