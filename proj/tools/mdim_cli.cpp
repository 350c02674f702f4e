#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "mdim/errors.hpp"
#include "mdim/run.hpp"
#include "mdim/serialize.hpp"
#include "mdim/store.hpp"

using nlohmann::json;

namespace {

int fail(const char* kind, const std::string& msg, int code) {
  std::cerr << json{{"error", {{"kind", kind}, {"message", msg}, {"exit_code", code}}}}.dump() << "\n";
  return code;
}

// config file: {"command":..., "params":{...}, "seed":..., "strict":..., "cap":...};
// without "params" every other top-level key is taken as a parameter
mdim::RunConfig read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw mdim::UsageError("cannot read config " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw mdim::UsageError("config " + path + " is not valid json: " + e.what());
  }
  if (!j.is_object()) throw mdim::UsageError("config must be an object");
  mdim::RunConfig c;
  try {
    if (j.contains("command")) c.command = j.at("command").get<std::string>();
    if (j.contains("seed") && !j.at("seed").is_null()) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("strict")) c.strict = j.at("strict").get<bool>();
    if (j.contains("cap")) c.cap = j.at("cap").get<std::size_t>();
  } catch (const json::exception& e) {
    throw mdim::UsageError(std::string("bad config field: ") + e.what());
  }
  if (j.contains("params")) {
    c.params = j.at("params");
  } else {
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (it.key() != "command" && it.key() != "seed" && it.key() != "strict" && it.key() != "cap") {
        c.params[it.key()] = it.value();
      }
    }
  }
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mean dimension toolkit"};
  app.require_subcommand(1);

  std::string config_path, out_path = "mdim-results.jsonl", csv_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> cap;
  bool strict = false, payload_only = false, no_store = false;

  for (const auto& name : mdim::known_commands()) {
    auto* sub = app.add_subcommand(name, "run " + name);
    sub->add_option("--config", config_path, "json config file")->required();
    sub->add_option("--seed", seed, "seed for sampling commands");
    sub->add_option("--out", out_path, "result store (line-delimited json)");
    sub->add_option("--csv", csv_path, "append n,value rows here");
    sub->add_flag("--strict", strict, "refuse to snap off-grid data");
    sub->add_option("--cap-simplices", cap, "simplex cap");
    sub->add_flag("--payload-only", payload_only, "print only the canonical payload");
    sub->add_flag("--no-store", no_store, "do not append to the store");
  }

  std::string q_run, q_cmd, q_hash, q_since, q_until;
  auto* query = app.add_subcommand("query", "query the result store");
  query->add_option("--out", out_path, "result store");
  query->add_option("--run-id", q_run);
  query->add_option("--command", q_cmd);
  query->add_option("--config-hash", q_hash);
  query->add_option("--since", q_since, "ISO timestamp prefix, inclusive");
  query->add_option("--until", q_until, "ISO timestamp prefix, inclusive");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage", e.what(), 2);
  }

  try {
    if (query->parsed()) {
      mdim::StoreFilter f;
      if (!q_run.empty()) f.run_id = q_run;
      if (!q_cmd.empty()) f.command = q_cmd;
      if (!q_hash.empty()) f.config_hash = q_hash;
      if (!q_since.empty()) f.since = q_since;
      if (!q_until.empty()) f.until = q_until;
      std::vector<std::string> warnings;
      for (const auto& r : mdim::store_query(out_path, f, &warnings)) std::cout << r.to_json().dump() << "\n";
      for (const auto& w : warnings) std::cerr << json{{"warning", w}}.dump() << "\n";
      return 0;
    }
    const std::string command = app.get_subcommands().front()->get_name();
    mdim::RunConfig c = read_config(config_path);
    if (!c.command.empty() && c.command != command) {
      throw mdim::UsageError("config is for '" + c.command + "', not '" + command + "'");
    }
    c.command = command;
    if (seed) c.seed = seed;
    if (strict) c.strict = true;
    if (cap) c.cap = *cap;
    mdim::RunOutput out = mdim::run(c);
    if (!no_store) mdim::store_append(out_path, out.record);
    if (!csv_path.empty()) mdim::write_csv(csv_path, out);
    std::cout << (payload_only ? mdim::canonical_dump(out.record.payload) : out.record.to_json().dump(2)) << "\n";
    return 0;
  } catch (const mdim::UsageError& e) {
    return fail("validation", e.what(), 2);
  } catch (const mdim::UnsupportedError& e) {
    return fail("unsupported", e.what(), 2);
  } catch (const mdim::CapError& e) {
    return fail("cap", e.what(), 3);
  } catch (const std::exception& e) {
    return fail("internal", e.what(), 4);
  }
}
