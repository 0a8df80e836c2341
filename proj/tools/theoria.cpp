#include <iostream>

#include <CLI11.hpp>

#include "theoria/service.hpp"

int main(int argc, char** argv) {
  using namespace theoria;
  CLI::App app{"theoria: extensible proof kernel"};
  app.require_subcommand(1);

  std::string root;
  std::vector<std::string> check_paths;
  auto* check = app.add_subcommand("check", "validate theory files");
  check->add_option("paths", check_paths, ".thy files or directories")->required();
  check->add_option("--root", root, "directory searched for imported theories");

  std::vector<std::string> seq_files;
  bool run_auto = false, replay = false, report = false;
  std::string order = "expand,rewrite,inference";
  auto* prove = app.add_subcommand("prove", "prove the obligations of .seq files");
  prove->add_option("seq", seq_files, ".seq files")->required();
  prove->add_option("--root", root, "workspace directory holding the theories");
  prove->add_flag("--auto", run_auto, "run the auto tactics");
  prove->add_flag("--replay", replay, "reuse or replay stored proofs first");
  prove->add_flag("--report", report, "print a JSON report");
  prove->add_option("--order", order, "auto tactic order")->capture_default_str();

  std::string host = "127.0.0.1", static_dir;
  int port = 8080;
  auto* serve = app.add_subcommand("serve", "serve the proof API over HTTP");
  serve->add_option("--root", root, "workspace directory")->capture_default_str();
  serve->add_option("--port", port, "TCP port")->capture_default_str();
  serve->add_option("--host", host, "interface to bind")->capture_default_str();
  serve->add_option("--static", static_dir, "directory of UI assets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  if (*check) return cmd_check(check_paths, root, std::cout, std::cerr);
  if (*prove) {
    ProveOptions opts;
    opts.run_auto = run_auto;
    opts.replay = replay;
    opts.budget = step_budget_from_env();
    try {
      opts.order = parse_auto_order(order);
    } catch (const std::invalid_argument& e) {
      std::cerr << e.what() << "\n";
      return 2;
    }
    return cmd_prove(seq_files, root, opts, report, std::cout, std::cerr);
  }
  try {
    Service service(root.empty() ? "." : root);
    return serve_http(service, host, port, static_dir, std::cerr);
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }
}
