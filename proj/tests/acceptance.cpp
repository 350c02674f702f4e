// Prints one PASS/FAIL line per acceptance criterion; exit status 1 if any fails.
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

#include "mdim/constructions.hpp"
#include "mdim/errors.hpp"
#include "mdim/inequality_suite.hpp"
#include "mdim/pairs.hpp"
#include "mdim/rng.hpp"
#include "mdim/run.hpp"
#include "mdim/serialize.hpp"
#include "mdim/sofic.hpp"

using namespace mdim;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

Rational R(std::int64_t p, std::int64_t q = 1) { return Rational(p, q); }

int failures = 0;

void report(int id, bool ok, const std::string& detail) {
  if (!ok) ++failures;
  std::cout << (ok ? "PASS" : "FAIL") << " criterion " << id << ": " << detail << std::endl;
}

void guarded(int id, const std::function<void()>& body) {
  try {
    body();
  } catch (const std::exception& e) {
    report(id, false, std::string("exception: ") + e.what());
  }
}

ComplexPtr cube(int d, int m) { return std::make_shared<SimplicialComplex>(build_triangulated_cube(d, m)); }

// complete backtracking over labelings in vertex order, pruning only on the
// running maximum; returns the minimal cost
std::int64_t exhaustive_min(const LabelProblem& p) {
  const int n = static_cast<int>(p.domain.size());
  std::vector<std::vector<int>> cons_of(n);
  for (int c = 0; c < static_cast<int>(p.constraints.size()); ++c) {
    for (int v : p.constraints[c]) cons_of[v].push_back(c);
  }
  std::vector<int> lab(n, -1);
  int best = std::numeric_limits<int>::max();
  auto distinct = [&](int c) {
    std::set<int> s;
    for (int v : p.constraints[c]) {
      if (lab[v] >= 0) s.insert(lab[v]);
    }
    return static_cast<int>(s.size());
  };
  std::function<void(int, int)> go = [&](int i, int worst) {
    if (worst >= best) return;
    if (i == n) {
      best = worst;
      return;
    }
    for (int l : p.domain[i]) {
      lab[i] = l;
      int w = worst;
      for (int c : cons_of[i]) w = std::max(w, distinct(c));
      go(i + 1, w);
    }
    lab[i] = -1;
  };
  go(0, 0);
  return best - 1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------------------

void criterion1() {
  const auto t0 = Clock::now();
  std::ostringstream d;
  bool ok = true;
  struct Setup {
    const char* name;
    BoxCover cover;
  };
  std::vector<Setup> setups{{"m=2 standard path cover", standard_path_cover(2)},
                            {"m=3 distinguishing cover", distinguishing_interval_cover(3)}};
  for (const auto& s : setups) {
    for (int L = 0; L <= 1; ++L) {
      auto es = mdim_window_estimate(FullShift{}, s.cover, 3, L);
      d << s.name << " L=" << L << ":";
      for (const auto& e : es) {
        d << ' ' << e.value;
        ok = ok && e.result.exact && e.value == ExtRational(R(1));
      }
      d << "; ";
    }
  }
  const double t = seconds_since(t0);
  ok = ok && t <= 300;
  d << "time " << t << "s";
  report(1, ok, d.str());
}

void criterion2() {
  const auto t0 = Clock::now();
  std::ostringstream d;
  bool ok = true;
  for (int m : {2, 3}) {
    const BoxCover a = m == 2 ? standard_path_cover(2) : distinguishing_interval_cover(3);
    for (int n = 2; n <= 3; ++n) {
      auto K = cube(n, m);
      Cover c = product_cover(a, n).to_cover(K);
      for (int L = 0; L <= 1; ++L) {
        auto r = dee_hat(c, Restriction::whole(), L);
        ok = ok && r.exact && r.value == ExtInt(n) && witness_admissible(r) && witness_order(r, c.size()) == r.value;
        d << "m=" << m << " n=" << n << " L=" << L << " -> " << r.value << (r.exact ? "" : "?") << "; ";
      }
      auto level = prepare_level(c, Restriction::whole(), 0);
      const auto brute = exhaustive_min(build_label_problem(level, c.size()));
      ok = ok && brute == n;
      d << "exhaustive L=0 -> " << brute << "; ";
    }
  }
  const double t = seconds_since(t0);
  ok = ok && t <= 600;
  d << "time " << t << "s";
  report(2, ok, d.str());
}

void criterion3() {
  std::ostringstream d;
  bool ok = true;
  const auto alpha = distinguishing_interval_cover(3);
  auto win = mdim_window_estimate(TrivialAction{}, alpha, 4, 0);
  d << "windows:";
  for (const auto& e : win) {
    d << ' ' << e.value;
    ok = ok && e.value == ExtRational(R(1, e.n));
  }
  EstimatorParams p;
  p.F = {"0", "1"};
  p.delta = R(1, 20);
  std::vector<SoficApproximation> ladder;
  for (int n : {2, 4, 8}) ladder.push_back(cyclic_model(n, {0, 1}));
  auto es = sofic_mdim_estimate(TrivialAction{}, alpha, p, ladder);
  d << "; sofic:";
  for (std::size_t i = 0; i < es.size(); ++i) {
    d << ' ' << es[i].value;
    ok = ok && es[i].exact;
    if (i > 0) ok = ok && es[i].value <= es[i - 1].value;
  }
  // tube oracle at n = 4: enumerate microstates by their defects
  const auto& s4 = ladder[1];
  const int m = alpha.resolution();
  std::vector<std::vector<int>> tube;
  const std::vector<int> F{s4.index_of("0"), s4.index_of("1")};
  std::vector<int> x(4, 0);
  TruncatedMetric metric{p.R};
  while (true) {
    std::vector<Rational> xs;
    for (int v : x) xs.push_back(R(v, m));
    if (in_map(constant_microstate(xs, p.R + 1), F, s4, metric, p.delta, false)) tube.push_back(x);
    int i = 0;
    while (i < 4 && ++x[i] > m) x[i++] = 0;
    if (i == 4) break;
  }
  auto T = std::make_shared<SimplicialComplex>(kuhn_spanned(4, m, tube));
  auto oracle = dee_hat(product_cover(alpha, 4).to_cover(T), Restriction::whole(), 0);
  const auto oracle_value = ExtRational::ratio(oracle.value, 4);
  ok = ok && oracle.exact && es[1].value == oracle_value && es[1].value <= ExtRational(R(1, 2));
  d << "; tube oracle n=4: " << tube.size() << " points, value " << oracle_value;
  auto en = sofic_entropy_estimate(TrivialAction{}, alpha, p, ladder);
  d << "; entropy:";
  for (std::size_t i = 0; i < en.size(); ++i) {
    d << ' ' << en[i].value();
    ok = ok && en[i].count.has_value();
    if (i > 0) ok = ok && en[i].value() <= en[i - 1].value();
  }
  report(3, ok, d.str());
}

void criterion4() {
  const auto t0 = Clock::now();
  auto rep = run_inequality_suite(42, 100, {});
  const std::vector<std::string> kinds{"dhat_le_ord", "refinement_monotonicity", "shifted_subadditivity",
                                       "product_bound", "pullback_bound"};
  bool all_kinds = true;
  for (const auto& k : kinds) all_kinds = all_kinds && rep.per_check.count(k) && rep.per_check.at(k) > 0;
  const double t = seconds_since(t0);
  std::ostringstream d;
  d << rep.trials << " trials, " << rep.checks << " checks, " << rep.violations << " violations, all five kinds "
    << (all_kinds ? "present" : "MISSING") << ", time " << t << "s";
  report(4, rep.trials >= 100 && rep.violations == 0 && all_kinds && t <= 900, d.str());
}

void criterion5() {
  Rng rng(derive_seed(5, 55));
  int instances = 0, violations = 0;
  TruncatedMetric metric{2};
  std::vector<SoficApproximation> models{cyclic_approximation(5, 1), cyclic_approximation(7, 2),
                                         cyclic_model(4, {0, 1})};
  for (const auto& s : models) {
    std::vector<int> F;
    for (std::size_t i = 0; i < s.elements.size(); ++i) F.push_back(static_cast<int>(i));
    for (int t = 0; t < 60; ++t) {
      const int radius = 2 + 3;
      Microstate phi;
      if (t % 3 == 0) {
        std::vector<Rational> z;
        for (int v = 0; v < s.n; ++v) z.push_back(R(uniform_int(rng, 0, 8), 8));
        phi = periodic_microstate(z, radius);
        // perturb one coordinate of one point
        phi.points[uniform_int(rng, 0, s.n - 1)].coords[radius] = R(uniform_int(rng, 0, 8), 8);
      } else {
        for (int v = 0; v < s.n; ++v) {
          TruncatedPoint q{radius, {}};
          for (int g = -radius; g <= radius; ++g) q.coords.push_back(R(uniform_int(rng, 0, 4), 4));
          phi.points.push_back(q);
        }
      }
      const Rational delta(uniform_int(rng, 0, 12), 12);
      const bool half = in_map(phi, F, s, metric, delta / 2, false);
      const bool strict = in_map(phi, F, s, metric, delta, true);
      const bool full = in_map(phi, F, s, metric, delta, false);
      ++instances;
      if ((half && !strict) || (strict && !full)) ++violations;
      // constant microstates of the trivial action never leave Map
      std::vector<Rational> cx(s.n, R(uniform_int(rng, 0, 6), 6));
      ++instances;
      if (!in_map(constant_microstate(cx, radius), F, s, metric, delta, false)) ++violations;
    }
  }
  // sentinels
  const auto alpha = distinguishing_interval_cover(3);
  EstimatorParams zero;
  zero.F = {"0", "1"};
  zero.delta = R(0);
  zero.strict = true;
  const std::vector<SoficApproximation> ms{cyclic_approximation(3, 1), cyclic_model(4, {0, 1})};
  int sentinel_bad = 0;
  for (const SubshiftDescriptor& X : std::vector<SubshiftDescriptor>{FullShift{}, TrivialAction{}}) {
    for (const auto& e : sofic_mdim_estimate(X, alpha, zero, ms)) sentinel_bad += !e.value.is_neg_inf();
  }
  // entropy is -inf exactly when mdim is, on the same microstate spaces
  int agree_bad = 0, agree_n = 0;
  for (const SubshiftDescriptor& X :
       std::vector<SubshiftDescriptor>{FullShift{}, TrivialAction{}, BlockShift{R(0), R(1, 3)}}) {
    for (int strict = 0; strict <= 1; ++strict) {
      for (const auto& delta : {R(0), R(1, 20)}) {
        EstimatorParams p;
        p.F = {"0", "1"};
        p.delta = delta;
        p.strict = strict;
        auto a = sofic_mdim_estimate(X, alpha, p, ms);
        auto b = sofic_entropy_estimate(X, alpha, p, ms);
        for (std::size_t i = 0; i < a.size(); ++i) {
          ++agree_n;
          agree_bad += a[i].value.is_neg_inf() != !b[i].count.has_value();
        }
      }
    }
  }
  std::ostringstream d;
  d << "sandwich/constants: " << violations << " violations in " << instances << " instances; strict delta=0 non -inf: "
    << sentinel_bad << "; entropy/mdim -inf disagreements: " << agree_bad << " of " << agree_n;
  report(5, violations == 0 && sentinel_bad == 0 && agree_bad == 0, d.str());
}

void criterion6() {
  const auto t0 = Clock::now();
  const Rational eps(1, 2);
  auto rep = psi_continuity_suite(2024, 50, eps, 3, 12);
  int premised = 0;
  for (const auto& t : rep.trials) premised += t.premise;
  const double t = seconds_since(t0);
  std::ostringstream d;
  d << rep.trials.size() << " pairs, " << premised << " with d_H < delta/4 (delta = " << psi_modulus(eps) << "), "
    << rep.violations << " violations, time " << t << "s";
  report(6, rep.trials.size() == 50 && premised == 50 && rep.violations == 0 && t <= 300, d.str());
}

void criterion7() {
  auto fin = cpmd_verdict(CompactSet::finite({R(0), R(1, 3), R(1)}));
  auto geo = cpmd_verdict(CompactSet::geometric(R(0), R(1, 2), R(1, 2)));
  auto can = cpmd_verdict(CompactSet::cantor());
  bool ok = fin.yes && geo.yes && geo.rank.rank == 2 && !can.yes;
  std::ostringstream d;
  d << "finite " << (fin.yes ? "yes" : "no") << "; geometric " << (geo.yes ? "yes" : "no") << " rank "
    << geo.rank.rank << "; cantor " << (can.yes ? "yes" : "no");
  if (can.staircase && can.factor) {
    const auto& s = *can.staircase;
    const bool third = can.factor->eval(R(1, 3)) == R(1, 2) && cantor_function(R(1, 3)) == R(1, 2);
    ok = ok && s.constant_on_intervals && s.violations.empty() && s.f0 == R(0) && s.f1 == R(1) && s.non_constant &&
         third;
    d << ", staircase constant on " << s.intervals << " intervals (" << s.samples << " samples), f(0)=" << s.f0
      << " f(1)=" << s.f1 << " f(1/3)=" << can.factor->eval(R(1, 3));
  } else {
    ok = false;
    d << ", no factor produced";
  }
  report(7, ok, d.str());
}

void criterion8() {
  MdimOracle oracle;
  auto alpha = distinguishing_interval_cover(3);
  bool ok = is_standard(alpha) && oracle.test(alpha).positive;
  auto pr = find_pair_regions(alpha, 8, oracle);
  const auto inv = pr.check();
  ok = ok && inv.ok() && pr.candidate.has_value() && pr.steps.size() == 8;
  std::ostringstream d;
  d << "grid " << pr.M << ", " << pr.steps.size() << " steps, invariants " << (inv.ok() ? "ok" : "broken");
  if (pr.candidate) {
    const auto [x, y] = *pr.candidate;
    Rng rng(derive_seed(8, 11));
    int dist = 0, pos = 0;
    auto covers = sample_distinguishing_covers(pr.M, x, y, 5, rng);
    for (const auto& c : covers) {
      const int f = c.resolution() / pr.M;
      dist += distinguishes(c, x * f, y * f);
      pos += oracle.test(c).positive;
    }
    ok = ok && covers.size() == 5 && dist == 5 && pos == 5;
    d << ", candidate (" << Rational(x, pr.M) << ", " << Rational(y, pr.M) << "), " << dist << "/5 distinguish, "
      << pos << "/5 positive";
  } else {
    d << ", no candidate: " << pr.failure;
  }
  report(8, ok, d.str());
}

void criterion9() {
  const auto t0 = Clock::now();
  auto K = cube(2, 2);
  Cover beta = product_cover(standard_path_cover(2), 2).to_cover(K);
  EstimatorParams p;
  p.F = {"0", "1"};
  auto rep = semicontinuity_probe(CompactSet::finite({R(0), R(1, 2), R(1)}), beta, p, 30, 9);
  int moved = 0;
  bool within = true;
  for (const auto& t : rep.trials) {
    moved += t.distance > R(0);
    within = within && t.distance < rep.rho;
  }
  std::ostringstream d;
  d << rep.trials.size() << " perturbations (" << moved << " moved) within rho=" << rep.rho << " on grid "
    << rep.fine_grid << ", base ord " << rep.base_ord << ", " << rep.violations << " drops, time "
    << seconds_since(t0) << "s";
  report(9, rep.trials.size() == 30 && within && moved > 0 && rep.violations == 0, d.str());
}

void criterion10() {
  bool ok = true;
  int models = 0;
  for (int k = 1; k <= 3; ++k) {
    for (int n = 2 * k + 1; n <= 2 * k + 5; ++n) {
      auto s = cyclic_approximation(n, k);
      std::vector<std::string> F;
      for (int g = -k; g <= k; ++g) F.push_back(std::to_string(g));
      for (const auto& q : approximation_quality(s, F)) {
        ok = ok && q.multiplicative && *q.multiplicative == R(1);
        if (q.g != q.h) ok = ok && q.free && *q.free == R(1);
      }
      ++models;
    }
  }
  // corrupted loaded model: s(1) gets a fixed point
  const std::vector<int> id{0, 1, 2, 3, 4, 5}, plus{1, 2, 3, 4, 5, 0}, minus{5, 0, 1, 2, 3, 4};
  std::vector<int> bad = plus;
  std::swap(bad[0], bad[5]);
  std::ostringstream text;
  text << "size 6\nidentity 0\n";
  auto row = [&](const std::string& l, const std::vector<int>& p) {
    text << l << ":";
    for (int v : p) text << ' ' << v;
    text << '\n';
  };
  row("0", id);
  row("1", bad);
  row("-1", minus);
  text << "1 * -1 = 0\n-1 * 1 = 0\n0 * 0 = 0\n0 * 1 = 1\n1 * 0 = 1\n0 * -1 = -1\n-1 * 0 = -1\n";
  auto s = parse_model(text.str());
  auto q = approximation_quality(s, {"-1", "0", "1"});
  const std::map<std::string, const std::vector<int>*> perm{{"0", &id}, {"1", &bad}, {"-1", &minus}};
  const std::map<std::pair<std::string, std::string>, std::string> prod{
      {{"1", "-1"}, "0"}, {{"-1", "1"}, "0"}, {{"0", "0"}, "0"}, {{"0", "1"}, "1"},
      {{"1", "0"}, "1"},  {{"0", "-1"}, "-1"}, {{"-1", "0"}, "-1"}};
  int below = 0, matched = 0, compared = 0;
  for (const auto& pq : q) {
    const auto& g = *perm.at(pq.g);
    const auto& h = *perm.at(pq.h);
    if (auto it = prod.find({pq.g, pq.h}); it != prod.end()) {
      const auto& gh = *perm.at(it->second);
      int c = 0;
      for (int v = 0; v < 6; ++v) c += gh[v] == g[h[v]];
      ++compared;
      matched += pq.multiplicative && *pq.multiplicative == Rational(c, 6);
      below += pq.multiplicative && *pq.multiplicative < R(1);
    }
    if (pq.g != pq.h) {
      int c = 0;
      for (int v = 0; v < 6; ++v) c += g[v] != h[v];
      ++compared;
      matched += pq.free && *pq.free == Rational(c, 6);
      below += pq.free && *pq.free < R(1);
    }
  }
  ok = ok && matched == compared && below > 0;
  std::ostringstream d;
  d << models << " cyclic models (k<=3) all fractions 1: " << (ok || matched != compared ? "yes" : "no")
    << "; corrupted model: " << matched << "/" << compared << " fractions match direct counts, " << below
    << " below 1";
  report(10, ok, d.str());
}

void criterion11() {
  const fs::path dir = fs::temp_directory_path() / ("mdim_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  int k = 0;
  auto cli = [&](const std::string& args, std::string* out = nullptr) {
    const auto o = dir / ("o" + std::to_string(k) + ".txt");
    const auto e = dir / ("e" + std::to_string(k++) + ".txt");
    const int st =
        std::system((std::string(MDIM_CLI_PATH) + " " + args + " >" + o.string() + " 2>" + e.string()).c_str());
    if (out) *out = slurp(o);
    return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  };
  auto cfg = [&](const std::string& name, const json& params) {
    const auto p = dir / (name + ".json");
    std::ofstream(p) << json{{"params", params}}.dump();
    return p.string();
  };
  const json path2 = {{"kind", "standard_path"}, {"resolution", 2}};
  const json dist3 = {{"kind", "distinguishing"}, {"resolution", 3}};
  const json three = {{"kind", "finite"}, {"points", {"0", "1/2", "1"}}};
  const json cyc = {{{"cyclic", {{"n", 3}, {"k", 1}}}}, {{"cyclic_model", {{"n", 4}, {"elements", {0, 1}}}}}};
  struct C {
    std::string cmd;
    json params;
    json bad;
    bool cap;
  };
  const std::vector<C> cmds{
      {"dim-cover", {{"cube", {{"d", 2}, {"m", 3}}}, {"box_cover", dist3}, {"power", 2}, {"L_max", 1}}, {{"L", -1}}, true},
      {"mdim-window", {{"subshift", {{"kind", "full"}}}, {"cover", path2}, {"n_max", 3}}, {{"cover", path2}}, true},
      {"mdim-sofic", {{"subshift", {{"kind", "trivial"}}}, {"cover", dist3}, {"models", cyc}, {"F", {"0", "1"}}},
       {{"subshift", {{"kind", "trivial"}}}, {"cover", dist3}, {"models", cyc}, {"F", {"9"}}}, true},
      {"entropy-sofic", {{"subshift", {{"kind", "full"}}}, {"cover", dist3}, {"models", cyc}, {"F", {"0", "1"}}},
       {{"subshift", {{"kind", "full"}}}, {"cover", dist3}, {"models", cyc}, {"delta", "-1"}}, true},
      {"psi", {{"B", three}, {"window", {{"n", 2}, {"m", 4}}}, {"continuity", {{"trials", 10}}}}, {{"B", 5}}, true},
      {"cpmd", {{"B", {{"kind", "cantor"}}}}, {{"B", {{"kind", "finite"}, {"points", json::array()}}}}, false},
      {"pairs", {{"cover", dist3}, {"n_max", 5}, {"samples", 3}}, {{"cover", path2}, {"n_max", 0}}, true},
      {"check-sofic", {{"models", cyc}}, {{"models", {{{"file", (dir / "missing.txt").string()}}}}}, false},
      {"probe-semicont", {{"B", three}, {"cover", path2}, {"n", 2}, {"trials", 10}},
       {{"B", {{"kind", "cantor"}}}, {"cover", path2}}, true},
      {"verify-inequalities", {{"trials", 10}}, {{"trials", "many"}}, true},
  };
  int identical = 0, codes_ok = 0, codes_total = 0;
  std::string failed;
  const std::string store = (dir / "store.jsonl").string();
  for (const auto& c : cmds) {
    const std::string seed = command_needs_seed(c.cmd) || c.cmd == "psi" ? " --seed 11" : "";
    const std::string base = c.cmd + " --config " + cfg(c.cmd, c.params);
    std::string a, b;
    const int r1 = cli(base + seed + " --out " + store + " --payload-only", &a);
    const int r2 = cli(base + seed + " --out " + store + " --payload-only", &b);
    if (r1 == 0 && r2 == 0 && a == b && !a.empty()) {
      ++identical;
    } else {
      failed += " rerun:" + c.cmd;
    }
    auto expect = [&](int got, int want, const std::string& what) {
      ++codes_total;
      if (got == want) {
        ++codes_ok;
      } else {
        failed += " " + what + ":" + c.cmd + "=" + std::to_string(got);
      }
    };
    expect(cli(c.cmd + " --config " + cfg(c.cmd + "_bad", c.bad) + seed + " --no-store"), 2, "validation");
    if (!seed.empty() && c.cmd != "psi") expect(cli(base + " --no-store"), 2, "seed");
    if (c.cap) expect(cli(base + seed + " --no-store --cap-simplices 2"), 3, "cap");
    expect(cli(base + seed + " --out /dev/full"), 4, "internal");
  }
  std::string q;
  const int qc = cli("query --out " + store + " --command pairs", &q);
  const bool query_ok = qc == 0 && std::count(q.begin(), q.end(), '\n') == 2;
  fs::remove_all(dir);
  std::ostringstream d;
  d << identical << "/" << cmds.size() << " commands byte-identical on rerun; " << codes_ok << "/" << codes_total
    << " exit-code checks; store query " << (query_ok ? "ok" : "broken") << failed;
  report(11, identical == static_cast<int>(cmds.size()) && codes_ok == codes_total && query_ok, d.str());
}

}  // namespace

int main() {
  const std::vector<std::function<void()>> all{criterion1, criterion2, criterion3, criterion4,  criterion5, criterion6,
                                               criterion7, criterion8, criterion9, criterion10, criterion11};
  for (std::size_t i = 0; i < all.size(); ++i) guarded(static_cast<int>(i + 1), all[i]);
  std::cout << (failures == 0 ? "all criteria pass" : std::to_string(failures) + " criteria fail") << std::endl;
  return failures == 0 ? 0 : 1;
}
