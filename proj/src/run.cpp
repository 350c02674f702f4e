#include "mdim/run.hpp"

#include <unistd.h>

#include <atomic>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>

#include "mdim/constructions.hpp"
#include "mdim/errors.hpp"
#include "mdim/inequality_suite.hpp"
#include "mdim/pairs.hpp"
#include "mdim/serialize.hpp"
#include "mdim/shift_space.hpp"
#include "mdim/sofic.hpp"

namespace mdim {

namespace {

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03lldZ", tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday,
                tm.tm_hour, tm.tm_min, tm.tm_sec, static_cast<long long>(ms));
  return buf;
}

using json = nlohmann::json;

int get_int(const json& p, const char* key, int def) {
  if (!p.contains(key)) return def;
  if (!p.at(key).is_number_integer()) throw UsageError(std::string("'") + key + "' must be an integer");
  return p.at(key).get<int>();
}

Rational get_rat(const json& p, const char* key, const Rational& def) {
  return p.contains(key) ? rational_from_json(p.at(key)) : def;
}

const json& need(const json& p, const char* key) {
  if (!p.contains(key)) throw UsageError(std::string("missing parameter '") + key + "'");
  return p.at(key);
}

std::vector<std::string> labels(const json& j) {
  std::vector<std::string> out;
  for (const auto& x : j) out.push_back(x.is_string() ? x.get<std::string>() : x.dump());
  return out;
}

std::vector<SoficApproximation> parse_models(const json& arr) {
  if (!arr.is_array() || arr.empty()) throw UsageError("'models' must be a nonempty list");
  std::vector<SoficApproximation> out;
  for (const auto& m : arr) {
    if (m.contains("cyclic")) {
      out.push_back(cyclic_approximation(need(m.at("cyclic"), "n").get<int>(), need(m.at("cyclic"), "k").get<int>()));
    } else if (m.contains("cyclic_model")) {
      const auto& c = m.at("cyclic_model");
      out.push_back(cyclic_model(need(c, "n").get<int>(), need(c, "elements").get<std::vector<int>>()));
    } else if (m.contains("file")) {
      out.push_back(load_model(m.at("file").get<std::string>()));
    } else if (m.contains("text")) {
      out.push_back(parse_model(m.at("text").get<std::string>()));
    } else {
      throw UsageError("model entries need 'cyclic', 'cyclic_model', 'file' or 'text'");
    }
  }
  return out;
}

DimOptions dim_options(const RunConfig& c) {
  DimOptions o;
  o.cap = c.cap;
  const auto& p = c.params;
  if (p.contains("mode")) {
    const auto mode = p.at("mode").get<std::string>();
    if (mode == "heuristic") {
      o.mode = SearchMode::Heuristic;
    } else if (mode != "exact") {
      throw UsageError("mode must be 'exact' or 'heuristic'");
    }
  }
  if (p.contains("node_limit")) o.node_limit = p.at("node_limit").get<std::uint64_t>();
  return o;
}

std::uint64_t seed_of(const RunConfig& c) {
  if (!c.seed) throw UsageError("command '" + c.command + "' samples and needs --seed");
  return *c.seed;
}

MdimOracle oracle_of(const RunConfig& c) {
  MdimOracle o;
  o.opts = dim_options(c);
  if (c.params.contains("oracle")) {
    const auto& j = c.params.at("oracle");
    o.n = get_int(j, "n", o.n);
    o.L = get_int(j, "L", o.L);
    o.threshold = get_rat(j, "threshold", Rational(1, 2 * o.n));
  }
  return o;
}

EstimatorParams estimator_params(const RunConfig& c) {
  EstimatorParams e;
  const auto& p = c.params;
  if (p.contains("F")) e.F = labels(p.at("F"));
  e.delta = get_rat(p, "delta", e.delta);
  e.R = get_int(p, "R", e.R);
  e.L = get_int(p, "L", e.L);
  e.strict = c.strict || p.value("map_strict", false);
  e.opts = dim_options(c);
  return e;
}

RunOutput cmd_dim_cover(const RunConfig& c) {
  const auto& p = c.params;
  ComplexPtr K;
  if (p.contains("cube")) {
    K = std::make_shared<SimplicialComplex>(
        build_triangulated_cube(need(p.at("cube"), "d").get<int>(), need(p.at("cube"), "m").get<int>(), c.cap));
  } else {
    K = std::make_shared<SimplicialComplex>(complex_from_json(need(p, "complex"), c.cap));
  }
  std::optional<Cover> alpha;
  if (p.contains("box_cover")) {
    BoxCover b = box_cover_from_json(p.at("box_cover"));
    if (p.contains("power")) b = product_cover(b, get_int(p, "power", 1), c.cap);
    alpha = b.to_cover(K);
  } else {
    alpha = cover_from_json(K, need(p, "cover"));
  }
  const Restriction Y = p.contains("restriction") ? restriction_from_json(*K, p.at("restriction")) : Restriction::whole();
  const DimOptions o = dim_options(c);
  RunOutput out;
  json results = json::array();
  const int L = get_int(p, "L", 0);
  const int L_max = get_int(p, "L_max", L);
  if (L < 0 || L_max < L) throw UsageError("need 0 <= L <= L_max");
  for (int l = L; l <= L_max; ++l) {
    DimResult r = dee_hat(*alpha, Y, l, o);
    results.push_back(dim_result_to_json(r, p.value("witness", true)));
    out.csv.push_back({std::to_string(l), r.value.to_string()});
  }
  out.record.payload = {{"ord", to_json(ord(*alpha, Y))},
                        {"elements", alpha->size()},
                        {"simplices", K->num_simplices()},
                        {"results", results}};
  return out;
}

RunOutput cmd_mdim_window(const RunConfig& c) {
  const auto& p = c.params;
  const auto X = SubshiftDescriptor::from_json(need(p, "subshift"));
  const auto alpha = box_cover_from_json(need(p, "cover"));
  auto es = mdim_window_estimate(X, alpha, get_int(p, "n_max", 3), get_int(p, "L", 0), get_int(p, "m", 0),
                                 dim_options(c), c.strict);
  RunOutput out;
  json rows = json::array();
  for (const auto& e : es) {
    rows.push_back({{"n", e.n},
                    {"value", to_json(e.value)},
                    {"exact", e.result.exact},
                    {"lower_bound", to_json(ExtRational::ratio(e.result.lower_bound, e.n))}});
    out.csv.push_back({std::to_string(e.n), e.value.to_string()});
  }
  std::vector<std::string> warnings;
  const int m = get_int(p, "m", 0) ? get_int(p, "m", 0) : alpha.resolution();
  window_boxes(X, 1, m, false, nullptr, &warnings);
  out.record.payload = {{"subshift", X.to_json()}, {"estimates", rows}, {"warnings", warnings}};
  return out;
}

RunOutput cmd_sofic(const RunConfig& c, bool entropy) {
  const auto& p = c.params;
  const auto X = SubshiftDescriptor::from_json(need(p, "subshift"));
  const auto alpha = box_cover_from_json(need(p, "cover"));
  const auto models = parse_models(need(p, "models"));
  const auto params = estimator_params(c);
  RunOutput out;
  json rows = json::array();
  if (entropy) {
    for (const auto& e : sofic_entropy_estimate(X, alpha, params, models)) {
      rows.push_back(e.to_json());
      out.csv.push_back({std::to_string(e.n), e.count ? json(e.value()).dump() : "-inf"});
    }
  } else {
    for (const auto& e : sofic_mdim_estimate(X, alpha, params, models)) {
      rows.push_back(e.to_json());
      out.csv.push_back({std::to_string(e.n), e.value.to_string()});
    }
  }
  out.record.payload = {{"subshift", X.to_json()},
                        {"F", params.F},
                        {"delta", params.delta.to_string()},
                        {"map_strict", params.strict},
                        {"estimates", rows}};
  return out;
}

RunOutput cmd_psi(const RunConfig& c) {
  const auto& p = c.params;
  const auto B = CompactSet::from_json(need(p, "B"));
  const auto X = psi(B);
  RunOutput out;
  json ivs = json::array();
  auto cont = contiguous_intervals(B, Rational(1, 729));
  for (std::size_t i = 0; i < cont.size() && i < 16; ++i) {
    ivs.push_back({{"lo", cont[i].lo.to_string()},
                   {"hi", cont[i].hi.to_string()},
                   {"lo_closed", cont[i].lo_closed},
                   {"hi_closed", cont[i].hi_closed}});
  }
  out.record.payload = {{"descriptor", X.to_json()}, {"contiguous_intervals", ivs}};
  if (p.contains("window")) {
    const int n = get_int(p.at("window"), "n", 2), m = get_int(p.at("window"), "m", 4);
    auto w = window_projection(X, n, m, c.strict, c.cap);
    out.record.payload["window"] = {{"n", n},
                                    {"m", m},
                                    {"snapped", w.snapped},
                                    {"warnings", w.warnings},
                                    {"complex", complex_to_json(*w.complex)},
                                    {"consistent", window_consistency(X, n, m).ok()}};
  }
  if (p.contains("continuity")) {
    const auto& q = p.at("continuity");
    auto rep = psi_continuity_suite(seed_of(c), get_int(q, "trials", 50), get_rat(q, "eps", Rational(1, 2)),
                                    get_int(q, "n", 2), get_int(q, "m", 12));
    json trials = json::array();
    for (const auto& t : rep.trials) trials.push_back(t.to_json());
    out.record.payload["continuity"] = {{"violations", rep.violations}, {"trials", trials}};
  }
  return out;
}

RunOutput cmd_cpmd(const RunConfig& c) {
  const auto B = CompactSet::from_json(need(c.params, "B"));
  RunOutput out;
  out.record.payload = cpmd_verdict(B, get_int(c.params, "max_intervals", 64)).to_json();
  out.record.payload["B"] = B.to_json();
  return out;
}

RunOutput cmd_pairs(const RunConfig& c) {
  const auto& p = c.params;
  const std::uint64_t seed = seed_of(c);
  BoxCover alpha = box_cover_from_json(need(p, "cover"));
  const MdimOracle oracle = oracle_of(c);
  RunOutput out;
  if (!is_standard(alpha)) {
    auto sc = standardize(alpha, oracle);
    out.record.payload["standardize"] = sc.to_json();
    if (!sc.ok) throw UsageError("standardize failed: " + sc.failure);
    alpha = sc.cover;
  }
  auto pr = find_pair_regions(alpha, get_int(p, "n_max", 8), oracle);
  out.record.payload["regions"] = pr.to_json();
  json samples = json::array();
  bool all = pr.candidate.has_value() && pr.check().ok();
  if (pr.candidate) {
    Rng rng(derive_seed(seed, 11));
    const auto [x, y] = *pr.candidate;
    for (const auto& cov : sample_distinguishing_covers(pr.M, x, y, get_int(p, "samples", 5), rng)) {
      const int f = cov.resolution() / pr.M;
      const bool d = distinguishes(cov, x * f, y * f);
      const auto r = oracle.test(cov);
      all = all && d && r.positive;
      samples.push_back({{"cover", box_cover_to_json(compress_cover(cov))}, {"distinguishes", d}, {"oracle", r.to_json()}});
    }
  }
  out.record.payload["samples"] = samples;
  out.record.payload["all_positive"] = all;
  return out;
}

RunOutput cmd_check_sofic(const RunConfig& c) {
  const auto models = parse_models(need(c.params, "models"));
  RunOutput out;
  json rows = json::array();
  for (std::size_t i = 0; i < models.size(); ++i) {
    const auto F = c.params.contains("F") ? labels(c.params.at("F")) : models[i].elements;
    auto q = approximation_quality(models[i], F);
    bool exact = true;
    for (const auto& pq : q) {
      if (pq.multiplicative && *pq.multiplicative != Rational(1)) exact = false;
      if (pq.free && *pq.free != Rational(1)) exact = false;
    }
    rows.push_back({{"model", i}, {"n", models[i].n}, {"pairs", quality_to_json(q)}, {"all_one", exact}});
  }
  out.record.payload = {{"models", rows}};
  return out;
}

RunOutput cmd_probe(const RunConfig& c) {
  const auto& p = c.params;
  const auto B = CompactSet::from_json(need(p, "B"));
  const auto alpha = box_cover_from_json(need(p, "cover"));
  const int n = get_int(p, "n", 2);
  auto cube = std::make_shared<SimplicialComplex>(build_triangulated_cube(n, alpha.resolution(), c.cap));
  const Cover beta = product_cover(alpha, n).to_cover(cube);
  auto rep = semicontinuity_probe(B, beta, estimator_params(c), get_int(p, "trials", 30), seed_of(c));
  RunOutput out;
  out.record.payload = rep.to_json();
  return out;
}

RunOutput cmd_inequalities(const RunConfig& c) {
  auto rep = run_inequality_suite(seed_of(c), get_int(c.params, "trials", 100), dim_options(c));
  RunOutput out;
  out.record.payload = rep.to_json();
  return out;
}

}  // namespace

const std::vector<std::string>& known_commands() {
  static const std::vector<std::string> cmds{"dim-cover", "mdim-window", "mdim-sofic",  "entropy-sofic",   "psi",
                                             "cpmd",      "pairs",       "check-sofic", "probe-semicont", "verify-inequalities"};
  return cmds;
}

bool command_needs_seed(const std::string& command) {
  return command == "pairs" || command == "probe-semicont" || command == "verify-inequalities";
}

json RunConfig::canonical() const {
  return {{"command", command},
          {"params", params},
          {"seed", seed ? json(*seed) : json(nullptr)},
          {"strict", strict},
          {"cap", cap}};
}

std::string config_hash(const RunConfig& c) { return hex(fnv1a(canonical_dump(c.canonical()))); }

json ResultRecord::to_json() const {
  return {{"run_id", run_id},   {"timestamp", timestamp}, {"command", command}, {"config_hash", config_hash},
          {"version", version}, {"schema", schema},       {"config", config},   {"payload", payload}};
}

ResultRecord ResultRecord::from_json(const json& j) {
  ResultRecord r;
  r.run_id = j.at("run_id").get<std::string>();
  r.timestamp = j.at("timestamp").get<std::string>();
  r.command = j.at("command").get<std::string>();
  r.config_hash = j.at("config_hash").get<std::string>();
  r.version = j.at("version").get<std::string>();
  r.schema = j.at("schema").get<int>();
  r.config = j.value("config", json::object());
  r.payload = j.at("payload");
  return r;
}

RunOutput run(const RunConfig& config) {
  const auto& cmds = known_commands();
  if (std::find(cmds.begin(), cmds.end(), config.command) == cmds.end()) {
    throw UsageError("unknown command '" + config.command + "'");
  }
  if (config.cap == 0) throw UsageError("cap must be positive");
  if (!config.params.is_object()) throw UsageError("config parameters must be an object");
  if (command_needs_seed(config.command)) seed_of(config);
  RunOutput out;
  try {
    const auto& c = config.command;
    if (c == "dim-cover") out = cmd_dim_cover(config);
    else if (c == "mdim-window") out = cmd_mdim_window(config);
    else if (c == "mdim-sofic") out = cmd_sofic(config, false);
    else if (c == "entropy-sofic") out = cmd_sofic(config, true);
    else if (c == "psi") out = cmd_psi(config);
    else if (c == "cpmd") out = cmd_cpmd(config);
    else if (c == "pairs") out = cmd_pairs(config);
    else if (c == "check-sofic") out = cmd_check_sofic(config);
    else if (c == "probe-semicont") out = cmd_probe(config);
    else out = cmd_inequalities(config);
  } catch (const json::exception& e) {
    throw UsageError(std::string("bad parameter: ") + e.what());
  }
  static std::atomic<std::uint64_t> counter{0};
  ResultRecord& r = out.record;
  r.command = config.command;
  r.config = config.canonical();
  r.config_hash = config_hash(config);
  r.timestamp = utc_now();
  r.run_id = hex(fnv1a(r.config_hash + r.timestamp + std::to_string(::getpid()) + std::to_string(counter++)));
  return out;
}

void write_csv(const std::string& path, const RunOutput& out) {
  const bool fresh = !std::filesystem::exists(path) || std::filesystem::file_size(path) == 0;
  std::ofstream f(path, std::ios::app);
  if (!f) throw UsageError("cannot write csv " + path);
  if (fresh) f << "n,value,config_hash\n";
  for (const auto& row : out.csv) f << row.n << ',' << row.value << ',' << out.record.config_hash << '\n';
}

}  // namespace mdim
