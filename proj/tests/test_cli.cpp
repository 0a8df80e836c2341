#include <doctest.h>

#include <sstream>
#include <thread>

#include <httplib.h>

#include "support.hpp"

#include "theoria/service.hpp"

using namespace test;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run check(const std::vector<std::string>& paths, const std::string& root = "") {
  std::ostringstream out, err;
  int code = cmd_check(paths, root, out, err);
  return {code, out.str(), err.str()};
}

Run prove(const std::vector<std::string>& files, ProveOptions opts = {}, bool report = false) {
  std::ostringstream out, err;
  int code = cmd_prove(files, "", opts, report, out, err);
  return {code, out.str(), err.str()};
}

ProveOptions auto_opts() {
  ProveOptions o;
  o.run_auto = true;
  return o;
}

bool contains(const std::string& hay, const std::string& needle) { return hay.find(needle) != std::string::npos; }

json post(Service& s, const std::string& path, const json& body, int expect) {
  Service::Response r = s.handle("POST", path, body.dump());
  INFO(path << " -> " << r.body.dump());
  CHECK(r.status == expect);
  return r.body;
}

json get(Service& s, const std::string& path, int expect = 200) {
  Service::Response r = s.handle("GET", path, "");
  INFO(path << " -> " << r.body.dump());
  CHECK(r.status == expect);
  return r.body;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("check exit codes") {
    Run ok = check({(fixtures() / "theories").string()});
    CHECK(ok.code == 0);
    CHECK(contains(ok.out, "list.thy: ok"));
    CHECK(check({(fixtures() / "theories" / "real.thy").string()}).code == 0);
    CHECK(check({(fixtures() / "missing.thy").string()}).code == 2);

    TempWorkspace tmp;
    write_file_atomic(tmp / "theories/bad.thy", R"(theory Bad
datatype Bag
  constructor none
  constructor one(x: ℤ)
operator size(b: Bag) : ℤ
  inductive b
  case one(x) => 1
)");
    Run diag = check({(tmp / "theories/bad.thy").string()});
    CHECK(diag.code == 1);
    CHECK(contains(diag.out, "IncompleteInduction size: none"));

    write_file_atomic(tmp / "theories/bad.thy", "theory Bad\noperator\n");
    CHECK(check({(tmp / "theories/bad.thy").string()}).code == 2);
  }

  TEST_CASE("prove writes one proof per obligation beside the sequent file") {
    TempWorkspace tmp;
    Run r = prove({(tmp / "pos/list.seq").string()}, auto_opts());
    CHECK(r.code == 0);
    CHECK(contains(r.out, "list.isEmpty_nil CLOSED"));
    CHECK(contains(r.out, "list.length_nil CLOSED"));
    for (const char* po : {"isEmpty_nil", "not_isEmpty_cons", "length_nil"}) {
      const fs::path file = tmp / (std::string("pos/list.") + po + ".prf.json");
      REQUIRE(fs::exists(file));
      json j = json::parse(read_file(file));
      CHECK(j["format"] == "theoria-proof");
      CHECK(j["version"] == 1);
      CHECK(j["status"] == "CLOSED");
    }
    Run fresh = prove({(tmp / "pos/list.seq").string()});
    CHECK(fresh.code == 1);
    CHECK(contains(fresh.out, "list.isEmpty_nil OPEN rules=0"));

    Run report = prove({(tmp / "pos/real.seq").string()}, auto_opts(), true);
    CHECK(report.code == 0);
    json j = json::parse(report.out);
    REQUIRE(j["pos"].size() == 2);
    CHECK(j["pos"][0]["po"] == "real.sum_zero_right");
    CHECK(j["pos"][0]["status"] == "CLOSED");
    CHECK(j["pos"][0]["applications"].get<int>() == j["pos"][0]["ruleCount"].get<int>());
  }

  TEST_CASE("prove exit codes") {
    TempWorkspace tmp;
    write_file_atomic(tmp / "pos/empty.seq", "theories Basic\n");
    Run empty = prove({(tmp / "pos/empty.seq").string()}, auto_opts());
    CHECK(empty.code == 0);
    CHECK(empty.out.empty());

    write_file_atomic(tmp / "pos/bad.seq", "theories Basic\n\nsequent oops\n  goal x + 1 = TRUE\n");
    Run bad = prove({(tmp / "pos/bad.seq").string()}, auto_opts());
    CHECK(bad.code == 2);
    CHECK(contains(bad.out, "bad.oops ERROR"));

    CHECK(prove({(tmp / "pos/missing.seq").string()}, auto_opts()).code == 2);

    ProveOptions tight = auto_opts();
    tight.budget = 5;
    Run loop = prove({(tmp / "loop/loop.seq").string()}, tight);
    CHECK(loop.code == 1);
    CHECK(contains(loop.out, "loop.spin OPEN rules=5 applications=5 budget-exceeded"));
  }

  TEST_CASE("prove --replay verdicts") {
    TempWorkspace tmp;
    const std::string seq = (tmp / "pos/list.seq").string();
    REQUIRE(prove({seq}, auto_opts()).code == 0);
    ProveOptions replay;
    replay.replay = true;
    Run same = prove({seq}, replay);
    CHECK(same.code == 0);
    CHECK(contains(same.out, "list.isEmpty_nil CLOSED rules=2 applications=0 replay=NEEDS_REPLAY"));

    tmp.replace_in("theories/basic.thy", "inference eq_refl ", "inference eq_refl_renamed ");
    Run renamed = prove({seq}, replay);
    CHECK(renamed.code == 1);
    CHECK(contains(renamed.out, "list.isEmpty_nil STALE"));
  }

  TEST_CASE("service endpoints") {
    TempWorkspace tmp;
    Service svc(tmp.dir());
    json pos = get(svc, "/pos");
    CHECK(pos["version"] == 1);
    std::set<std::string> ids;
    for (const auto& p : pos["pos"]) ids.insert(p["id"].get<std::string>());
    CHECK(ids.count("list.length_nil"));
    CHECK(ids.count("loop.spin"));

    json tree = get(svc, "/pos/list.length_nil/tree");
    CHECK(tree["tree"]["status"] == "OPEN");
    const int root = tree["tree"]["root"]["id"];
    json app = get(svc, "/pos/list.length_nil/nodes/" + std::to_string(root) + "/applicable");
    std::set<std::string> names;
    for (const auto& a : app["applicable"]) names.insert(a["rule"]["name"].get<std::string>());
    CHECK(names.count("add_zero"));
    CHECK(names.count("length_nil_rewrite"));

    json step = post(svc, "/pos/list.length_nil/apply",
                     {{"node", root},
                      {"reasoner", "theory.autoRewrite"},
                      {"input", {{"rule", {{"theory", "Basic"}, {"name", "add_zero"}}}, {"position", "0"}}}},
                     200);
    REQUIRE(step["tree"]["root"]["children"].size() == 1);
    const int child = step["tree"]["root"]["children"][0]["id"];
    const fs::path stored = tmp / "pos/list.length_nil.prf.json";
    REQUIRE(fs::exists(stored));
    const std::string bytes = read_file(stored);

    json bad = post(svc, "/pos/list.length_nil/apply",
                    {{"node", child},
                     {"reasoner", "theory.manualRewrite"},
                     {"input", {{"rule", {{"theory", "Basic"}, {"name", "div_self"}}}, {"position", "0"}}}},
                    422);
    CHECK(bad["error"] == "RuleNotApplicable");
    CHECK(read_file(stored) == bytes);
    post(svc, "/pos/list.length_nil/apply", {{"node", root}, {"reasoner", "core.trueGoal"}}, 409);
    post(svc, "/pos/list.length_nil/apply", {{"node", 4242}, {"reasoner", "core.trueGoal"}}, 404);
    post(svc, "/pos/list.length_nil/apply", {{"reasoner", "core.trueGoal"}}, 400);
    post(svc, "/pos/nope.nope/apply", {{"node", 0}, {"reasoner", "core.trueGoal"}}, 404);
    CHECK(read_file(stored) == bytes);
    CHECK(svc.handle("POST", "/pos/list.length_nil/apply", "{not json").status == 400);
    CHECK(svc.handle("GET", "/nowhere", "").status == 404);

    json done = post(svc, "/pos/list.length_nil/auto", {{"tactics", {"rewrite", "inference"}}}, 200);
    CHECK(done["tree"]["status"] == "CLOSED");
    CHECK(done["report"]["applications"].get<int>() >= 2);
    CHECK(done["report"]["budgetExceeded"] == false);
    post(svc, "/pos/list.length_nil/auto", {{"tactics", {"sideways"}}}, 400);

    json spun = post(svc, "/pos/loop.spin/auto", {{"budget", 6}}, 200);
    CHECK(spun["report"]["budgetExceeded"] == true);
    CHECK(spun["tree"]["ruleCount"] == 6);

    json pruned = post(svc, "/pos/list.length_nil/prune", {{"nodeId", child}}, 200);
    CHECK(pruned["tree"]["status"] == "OPEN");
    CHECK(pruned["tree"]["ruleCount"] == 1);

    json replayed = post(svc, "/replay", json::object(), 200);
    bool found = false;
    for (const auto& r : replayed["results"])
      if (r["id"] == "list.length_nil") {
        found = true;
        CHECK(r["verdict"] == "NEEDS_REPLAY");
        CHECK(r["status"] == "OPEN");
      }
    CHECK(found);
    CHECK(get(svc, "/pos/list.length_nil/tree")["tree"]["ruleCount"] == 1);
  }

  TEST_CASE("service over real HTTP") {
    TempWorkspace tmp;
    Service svc(tmp.dir());
    HttpServer server(svc);
    const int port = server.bind("127.0.0.1", 0);
    REQUIRE(port > 0);
    std::thread t([&] { server.listen(); });
    httplib::Client client("127.0.0.1", port);
    httplib::Result res;
    for (int i = 0; i < 100 && !(res = client.Get("/pos")); ++i)
      std::this_thread::sleep_for(std::chrono::milliseconds(20));
    REQUIRE(res);
    CHECK(res->status == 200);
    CHECK(json::parse(res->body)["pos"].size() >= 7);

    auto r = client.Post("/pos/real.sum_zero_right/auto", R"({"tactics":["rewrite","inference"]})",
                         "application/json");
    REQUIRE(r);
    CHECK(r->status == 200);
    CHECK(json::parse(r->body)["tree"]["status"] == "CLOSED");
    auto missing = client.Get("/pos/none.none/tree");
    REQUIRE(missing);
    CHECK(missing->status == 404);
    CHECK(json::parse(missing->body)["error"] == "UnknownObligation");
    server.stop();
    t.join();
  }

  TEST_CASE("service and command line build identical trees") {
    TempWorkspace a, b;
    Service svc(a.dir());
    for (const char* po : {"list.isEmpty_nil", "list.not_isEmpty_cons", "list.length_nil"})
      post(svc, std::string("/pos/") + po + "/auto", json::object(), 200);
    REQUIRE(prove({(b / "pos/list.seq").string()}, auto_opts()).code == 0);
    for (const char* po : {"isEmpty_nil", "not_isEmpty_cons", "length_nil"}) {
      const std::string file = std::string("pos/list.") + po + ".prf.json";
      json ja = json::parse(read_file(a / file));
      json jb = json::parse(read_file(b / file));
      CHECK(ja["root"] == jb["root"]);
      CHECK(ja["factory"] == jb["factory"]);
    }
  }
}
