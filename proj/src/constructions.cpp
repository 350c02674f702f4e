#include "mdim/constructions.hpp"

#include <algorithm>
#include <set>

#include "mdim/errors.hpp"
#include "mdim/rng.hpp"

namespace mdim {

namespace {

const Rational kGraphMinLen(1, 243);
const Rational kStairMinLen(1, 6561);

std::vector<Rational> grid_values(const CompactSet& S, int m) {
  std::vector<Rational> out;
  for (int k : snap_to_grid(S, m)) out.emplace_back(k, m);
  return out;
}

}  // namespace

SubshiftDescriptor psi(const CompactSet& B) { return SubshiftDescriptor(PsiShift{B}); }

BlockGraphReport block_graph(const CompactSet& B, const Rational& min_len) {
  BlockGraphReport r;
  auto ivs = contiguous_intervals(B, min_len);
  std::sort(ivs.begin(), ivs.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  r.intervals = static_cast<int>(ivs.size());
  r.components = ivs.empty() ? 0 : 1;
  for (std::size_t i = 0; i < ivs.size(); ++i) {
    r.covered += ivs[i].length();
    if (i + 1 < ivs.size() && ivs[i].hi != ivs[i + 1].lo) ++r.components;
  }
  return r;
}

StaircaseCheck check_staircase(const FactorDescriptor& f, const CompactSet& B, int max_intervals,
                               int samples_per_interval) {
  StaircaseCheck c;
  auto ivs = contiguous_intervals(B, kStairMinLen);
  if (static_cast<int>(ivs.size()) > max_intervals) ivs.resize(max_intervals);
  for (const auto& iv : ivs) {
    ++c.intervals;
    const Rational step = iv.length() / Rational(samples_per_interval + 1);
    const Rational ref = f.eval(iv.lo + step);
    for (int j = 1; j <= samples_per_interval; ++j) {
      const Rational t = iv.lo + step * Rational(j);
      ++c.samples;
      if (f.eval(t) != ref) {
        c.constant_on_intervals = false;
        c.violations.push_back("f(" + t.to_string() + ") != f(" + (iv.lo + step).to_string() + ") on " +
                               to_string(iv));
      }
    }
  }
  c.f0 = f.eval(Rational(0));
  c.f1 = f.eval(Rational(1));
  c.non_constant = c.f0 != c.f1;
  return c;
}

CpmdVerdict cpmd_verdict(const CompactSet& B, int max_intervals) {
  CpmdVerdict v;
  v.rank = cb_rank(B);
  v.blocks = block_graph(B, kGraphMinLen);
  if (is_countable(B)) {
    v.yes = true;
    v.witness = "countable (CB rank " + v.rank.code() + ")";
    return v;
  }
  auto K = perfect_component(B);
  if (!K) throw std::logic_error("uncountable set without a perfect component");
  v.factor = FactorDescriptor{*K};
  v.staircase = check_staircase(*v.factor, B, max_intervals);
  v.witness = "uncountable; zero mean dimension factor pi(x) = f(x_0) with f the staircase of the perfect part";
  return v;
}

nlohmann::json CpmdVerdict::to_json() const {
  nlohmann::json j{{"verdict", yes ? "yes" : "no"},
                   {"cb_rank", rank.code()},
                   {"witness", witness},
                   {"block_graph",
                    {{"intervals", blocks.intervals}, {"components", blocks.components}, {"covered", blocks.covered.to_string()}}}};
  if (factor) j["factor"] = {{"formula", factor->formula}, {"kernel", factor->kernel.to_json()}};
  if (staircase) {
    j["staircase"] = {{"intervals", staircase->intervals},
                      {"samples", staircase->samples},
                      {"constant_on_intervals", staircase->constant_on_intervals},
                      {"violations", staircase->violations},
                      {"f0", staircase->f0.to_string()},
                      {"f1", staircase->f1.to_string()},
                      {"non_constant", staircase->non_constant}};
  }
  return j;
}

std::vector<std::vector<int>> psi_window_points(const CompactSet& B, int n, int m) {
  std::set<std::vector<int>> pts;
  for (const auto& box : window_boxes(psi(B), n, m, false)) {
    std::vector<int> p(n);
    for (int i = 0; i < n; ++i) p[i] = box[i].first;
    while (true) {
      pts.insert(p);
      int i = n - 1;
      while (i >= 0 && p[i] == box[i].second) {
        p[i] = box[i].first;
        --i;
      }
      if (i < 0) break;
      ++p[i];
    }
  }
  return {pts.begin(), pts.end()};
}

Rational psi_modulus(const Rational& eps) { return eps; }

PsiContinuityReport psi_continuity_check(const CompactSet& A, const CompactSet& B, const Rational& eps, int n, int m) {
  if (!is_on_grid(A, m) || !is_on_grid(B, m)) throw UsageError("continuity check needs finite sets on the grid");
  if (eps <= Rational(0)) throw UsageError("eps must be positive");
  PsiContinuityReport r;
  r.eps = eps;
  r.delta = psi_modulus(eps);
  r.set_distance = hausdorff_distance(grid_values(A, m), grid_values(B, m)).value;
  r.window_distance = hausdorff_distance(psi_window_points(A, n, m), psi_window_points(B, n, m), m).value;
  r.premise = r.set_distance < r.delta / Rational(4);
  r.pass = !r.premise || r.window_distance < eps;
  return r;
}

nlohmann::json PsiContinuityReport::to_json() const {
  return {{"eps", eps.to_string()},
          {"delta", delta.to_string()},
          {"set_distance", set_distance.to_string()},
          {"window_distance", window_distance.to_string()},
          {"premise", premise},
          {"pass", pass}};
}

PsiSuiteReport psi_continuity_suite(std::uint64_t seed, int trials, const Rational& eps, int n, int m) {
  PsiSuiteReport rep;
  const Rational quarter = psi_modulus(eps) / Rational(4);
  // largest step count s with s/m < delta/4
  std::int64_t smax = (quarter * Rational(m)).ceil() - 1;
  if (smax < 0) smax = 0;
  Rng rng(derive_seed(seed, 6));
  for (int t = 0; t < trials; ++t) {
    const int size = static_cast<int>(uniform_int(rng, 1, 5));
    std::set<int> a, b;
    while (static_cast<int>(a.size()) < size) a.insert(static_cast<int>(uniform_int(rng, 0, m)));
    for (int x : a) {
      b.insert(std::clamp(x + static_cast<int>(uniform_int(rng, -smax, smax)), 0, m));
      if (uniform_int(rng, 0, 2) == 0) b.insert(std::clamp(x + static_cast<int>(uniform_int(rng, -smax, smax)), 0, m));
    }
    std::vector<Rational> av, bv;
    for (int x : a) av.emplace_back(x, m);
    for (int x : b) bv.emplace_back(x, m);
    auto r = psi_continuity_check(CompactSet::finite(av), CompactSet::finite(bv), eps, n, m);
    if (!r.pass) ++rep.violations;
    rep.trials.push_back(std::move(r));
  }
  return rep;
}

}  // namespace mdim
