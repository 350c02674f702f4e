#include <doctest.h>
#include <sys/wait.h>
#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "mdim/errors.hpp"
#include "mdim/run.hpp"
#include "mdim/serialize.hpp"
#include "mdim/store.hpp"

using namespace mdim;
namespace fs = std::filesystem;

namespace {

fs::path scratch() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / ("mdim_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct CliResult {
  int code = -1;
  std::string out;
  std::string err;
};

CliResult cli(const std::string& args) {
  static int k = 0;
  const auto o = scratch() / ("out" + std::to_string(k) + ".txt");
  const auto e = scratch() / ("err" + std::to_string(k++) + ".txt");
  const std::string cmd = std::string(MDIM_CLI_PATH) + " " + args + " >" + o.string() + " 2>" + e.string();
  const int st = std::system(cmd.c_str());
  CliResult r;
  r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  r.out = slurp(o);
  r.err = slurp(e);
  return r;
}

std::string config_file(const std::string& name, const json& j) {
  const auto p = scratch() / (name + ".json");
  std::ofstream(p) << j.dump();
  return p.string();
}

struct Case {
  std::string command;
  json params;
  bool seeded;
  bool builds_complexes;
  json bad;  // params that fail validation
};

std::vector<Case> cases() {
  const json path2 = {{"kind", "standard_path"}, {"resolution", 2}};
  const json dist3 = {{"kind", "distinguishing"}, {"resolution", 3}};
  const json three = {{"kind", "finite"}, {"points", {"0", "1/2", "1"}}};
  return {
      {"dim-cover", {{"cube", {{"d", 2}, {"m", 2}}}, {"box_cover", path2}, {"power", 2}, {"L", 0}, {"L_max", 1}}, false, true,
       {{"cube", {{"d", 2}, {"m", 2}}}}},
      {"mdim-window", {{"subshift", {{"kind", "full"}}}, {"cover", path2}, {"n_max", 3}}, false, true,
       {{"subshift", {{"kind", "nonsense"}}}, {"cover", path2}}},
      {"mdim-sofic",
       {{"subshift", {{"kind", "full"}}}, {"cover", dist3}, {"models", {{{"cyclic", {{"n", 3}, {"k", 1}}}}}}, {"F", {"0", "1"}}},
       false, true, {{"subshift", {{"kind", "full"}}}, {"cover", dist3}, {"models", json::array()}}},
      {"entropy-sofic",
       {{"subshift", {{"kind", "trivial"}}},
        {"cover", dist3},
        {"models", {{{"cyclic_model", {{"n", 2}, {"elements", {0, 1}}}}}, {{"cyclic", {{"n", 4}, {"k", 1}}}}}},
        {"F", {"0", "1"}}},
       false, true, {{"subshift", {{"kind", "trivial"}}}, {"cover", dist3}, {"models", {{{"cyclic", {{"n", 2}, {"k", 1}}}}}}}},
      {"psi",
       {{"B", three}, {"window", {{"n", 2}, {"m", 2}}}, {"continuity", {{"trials", 4}, {"eps", "1/2"}, {"n", 2}, {"m", 12}}}},
       true, true, {{"B", {{"kind", "finite"}, {"points", {"3/2"}}}}}},
      {"cpmd", {{"B", {{"kind", "cantor"}}}}, false, false, {{"B", {{"kind", "geometric"}, {"limit", "0"}}}}},
      {"pairs", {{"cover", dist3}, {"n_max", 4}, {"samples", 2}}, true, true, {{"cover", dist3}, {"n_max", 0}}},
      {"check-sofic", {{"models", {{{"cyclic", {{"n", 5}, {"k", 1}}}}, {{"cyclic_model", {{"n", 3}, {"elements", {0, 3}}}}}}}},
       false, false, {{"models", {{{"unknown", 1}}}}}},
      {"probe-semicont", {{"B", three}, {"cover", path2}, {"n", 2}, {"trials", 4}}, true, true,
       {{"B", {{"kind", "finite"}, {"points", {"1/3"}}}}, {"cover", path2}, {"n", 2}}},
      {"verify-inequalities", {{"trials", 6}}, true, true, {{"trials", 0}}},
  };
}

}  // namespace

TEST_CASE("config hash and canonical form") {
  RunConfig a;
  a.command = "cpmd";
  a.params = json::parse(R"({"B":{"kind":"cantor"},"max_intervals":8})");
  RunConfig b = a;
  b.params = json::parse(R"({"max_intervals":8,"B":{"kind":"cantor"}})");
  CHECK(config_hash(a) == config_hash(b));
  CHECK(config_hash(a).size() == 16);
  b.seed = 3;
  CHECK(config_hash(a) != config_hash(b));
  CHECK(command_needs_seed("pairs"));
  CHECK_FALSE(command_needs_seed("cpmd"));
  CHECK(known_commands().size() == 10);
}

TEST_CASE("run validates") {
  RunConfig c;
  c.command = "frobnicate";
  CHECK_THROWS_AS(run(c), UsageError);
  c.command = "verify-inequalities";
  CHECK_THROWS_AS(run(c), UsageError);  // no seed
  c.seed = 1;
  c.cap = 0;
  CHECK_THROWS_AS(run(c), UsageError);
  c.command = "dim-cover";
  c.cap = kDefaultSimplexCap;
  c.params = {{"cube", {{"d", "two"}, {"m", 2}}}};
  CHECK_THROWS_AS(run(c), UsageError);
}

TEST_CASE("dim-cover on an empty restriction is -inf") {
  RunConfig c;
  c.command = "dim-cover";
  c.params = {{"cube", {{"d", 1}, {"m", 2}}},
              {"box_cover", {{"kind", "standard_path"}, {"resolution", 2}}},
              {"restriction", {{"kind", "empty"}}}};
  auto out = run(c);
  CHECK(out.record.payload.at("results")[0].at("value") == "-inf");
  CHECK(out.record.payload.at("ord") == "-inf");
}

TEST_CASE("store append and query") {
  const auto store = (scratch() / "store.jsonl").string();
  fs::remove(store);
  RunConfig c;
  c.command = "cpmd";
  c.params = {{"B", {{"kind", "finite"}, {"points", {"0", "1"}}}}};
  auto r1 = run(c).record;
  auto r2 = run(c).record;
  CHECK(r1.run_id != r2.run_id);
  CHECK(r1.config_hash == r2.config_hash);
  CHECK(canonical_dump(r1.payload) == canonical_dump(r2.payload));
  store_append(store, r1);
  store_append(store, r2);
  RunConfig p;
  p.command = "check-sofic";
  p.params = {{"models", {{{"cyclic", {{"n", 5}, {"k", 1}}}}}}};
  store_append(store, run(p).record);
  std::ofstream(store, std::ios::app) << "{not json\n";
  std::vector<std::string> warnings;
  StoreFilter f;
  f.run_id = r1.run_id;
  auto one = store_query(store, f, &warnings);
  REQUIRE(one.size() == 1);
  CHECK(one[0].payload == r1.payload);
  CHECK(warnings.size() == 1);
  StoreFilter by_cmd;
  by_cmd.command = "check-sofic";
  auto cs = store_query(store, by_cmd);
  REQUIRE(cs.size() == 1);
  CHECK(cs[0].command == "check-sofic");
  StoreFilter by_hash;
  by_hash.config_hash = r1.config_hash;
  CHECK(store_query(store, by_hash).size() == 2);
  StoreFilter late;
  late.since = "9999";
  CHECK(store_query(store, late).empty());
  StoreFilter early;
  early.until = "1970";
  CHECK(store_query(store, early).empty());
}

TEST_CASE("cli: every command succeeds, reruns identically, and honors exit codes") {
  const auto store = (scratch() / "cli_store.jsonl").string();
  for (const auto& c : cases()) {
    CAPTURE(c.command);
    const auto cfg = config_file(c.command, {{"params", c.params}});
    const std::string seed = c.seeded ? " --seed 7" : "";
    const std::string run_only = c.command + " --config " + cfg;
    const std::string base = run_only + " --out " + store;
    auto first = cli(base + seed + " --payload-only");
    CHECK(first.code == 0);
    CHECK_FALSE(first.out.empty());
    auto again = cli(base + seed + " --payload-only");
    CHECK(again.code == 0);
    CHECK(first.out == again.out);
    if (c.seeded) {
      auto unseeded = cli(base);
      CHECK(unseeded.code == 2);
      CHECK(json::parse(unseeded.err).at("error").at("kind") == "validation");
    }
    auto bad = cli(c.command + " --config " + config_file(c.command + "_bad", {{"params", c.bad}}) + " --out " + store + seed);
    CHECK(bad.code == 2);
    CHECK(json::parse(bad.err).at("error").contains("message"));
    if (c.builds_complexes) {
      auto capped = cli(base + seed + " --cap-simplices 3");
      CHECK(capped.code == 3);
      CHECK(json::parse(capped.err).at("error").at("kind") == "cap");
    }
    auto internal = cli(run_only + seed + " --out /dev/full");
    CHECK(internal.code == 4);
  }
  auto q = cli("query --out " + store + " --command pairs");
  CHECK(q.code == 0);
  int lines = 0;
  std::istringstream is(q.out);
  for (std::string line; std::getline(is, line);) {
    ++lines;
    CHECK(json::parse(line).at("command") == "pairs");
  }
  CHECK(lines == 2);
}

TEST_CASE("cli: mdim-window csv rows and misc usage errors") {
  const auto csv = (scratch() / "w.csv").string();
  fs::remove(csv);
  const auto cfg = config_file("window", {{"command", "mdim-window"},
                                          {"subshift", {{"kind", "full"}}},
                                          {"cover", {{"kind", "standard_path"}, {"resolution", 2}}},
                                          {"n_max", 3}});
  auto r = cli("mdim-window --config " + cfg + " --no-store --csv " + csv);
  REQUIRE(r.code == 0);
  auto rec = json::parse(r.out);
  const std::string h = rec.at("config_hash");
  CHECK(slurp(csv) == "n,value,config_hash\n1,1," + h + "\n2,1," + h + "\n3,1," + h + "\n");
  CHECK(cli("mdim-window --config " + cfg + " --no-store --payload-only").out ==
        canonical_dump(rec.at("payload")) + "\n");
  CHECK(cli("cpmd --config " + cfg + " --no-store").code == 2);  // config names another command
  CHECK(cli("cpmd --config /nonexistent/config.json --no-store").code == 2);
  CHECK(cli("no-such-command --config " + cfg).code == 2);
  CHECK(cli("mdim-window --config " + cfg + " --seed notanumber").code == 2);
  const auto cantor = config_file("cantor", {{"B", {{"kind", "cantor"}}}});
  auto v = cli("cpmd --config " + cantor + " --no-store --payload-only");
  REQUIRE(v.code == 0);
  auto p = json::parse(v.out);
  CHECK(p.at("verdict") == "no");
  CHECK(p.at("factor").at("formula") == "pi(x) = f(x_0)");
}
