#include "mdim/inequality_suite.hpp"

#include <algorithm>
#include <map>

#include "mdim/errors.hpp"
#include "mdim/serialize.hpp"

namespace mdim {

Cover random_star_cover(const ComplexPtr& K, Rng& rng, int min_elems, int max_elems) {
  const int nv = K->num_vertices();
  const int k = static_cast<int>(uniform_int(rng, min_elems, std::min(max_elems, std::max(min_elems, nv))));
  std::vector<std::vector<int>> groups(k);
  std::vector<int> order(nv);
  for (int v = 0; v < nv; ++v) order[v] = v;
  // first k vertices seed the groups so none is empty
  for (int i = nv - 1; i > 0; --i) std::swap(order[i], order[uniform_int(rng, 0, i)]);
  for (int i = 0; i < nv; ++i) {
    const int v = order[i];
    const int g = i < k ? i : static_cast<int>(uniform_int(rng, 0, k - 1));
    groups[g].push_back(v);
    if (uniform_int(rng, 0, 2) == 0) {
      const int h = static_cast<int>(uniform_int(rng, 0, k - 1));
      if (h != g) groups[h].push_back(v);
    }
  }
  std::vector<OpenSimplexSet> elems;
  for (auto& g : groups) {
    if (g.empty()) continue;
    std::sort(g.begin(), g.end());
    elems.push_back(OpenSimplexSet::star(*K, g));
  }
  return Cover(K, std::move(elems));
}

BoxCover random_interval_cover(int m, Rng& rng) {
  // cut points 0 < c_1 < ... < c_r < m; consecutive pieces overlap around each cut
  std::vector<int> cuts;
  for (int k = 1; k < m; ++k) {
    if (uniform_int(rng, 0, 1) == 0) cuts.push_back(k);
  }
  std::vector<GridInterval> ivs;
  int lo = 0;
  for (int c : cuts) {
    ivs.push_back(GridInterval{lo, std::min(m, c + 1), true, c + 1 == m});
    lo = std::max(0, c - 1);
  }
  ivs.push_back(GridInterval{lo, m, lo == 0, true});
  return BoxCover::intervals(m, ivs);
}

SimplicialMap halving_map(const ComplexPtr& fine, const ComplexPtr& coarse) {
  std::map<std::vector<int>, int> at;
  for (int v = 0; v < coarse->num_vertices(); ++v) at[grid_coords(*coarse, v)] = v;
  std::vector<int> vmap(fine->num_vertices());
  for (int v = 0; v < fine->num_vertices(); ++v) {
    auto p = grid_coords(*fine, v);
    for (int& c : p) c /= 2;
    vmap[v] = at.at(p);
  }
  return SimplicialMap(fine, coarse, std::move(vmap));
}

nlohmann::json SuiteReport::to_json() const {
  nlohmann::json fails = nlohmann::json::array();
  for (const auto& t : failing) {
    fails.push_back({{"trial", t.index}, {"complex", t.complex}, {"L", t.L}, {"report", inequality_report_to_json(t.report)}});
  }
  return {{"trials", trials}, {"checks", checks}, {"violations", violations}, {"per_check", per_check}, {"failing", fails}};
}

SuiteReport run_inequality_suite(std::uint64_t seed, int trials, const DimOptions& opts) {
  if (trials < 1) throw UsageError("trials must be >= 1");
  SuiteReport rep;
  Rng rng(derive_seed(seed, 4));
  auto path = std::make_shared<SimplicialComplex>(build_triangulated_cube(1, 6, opts.cap));
  auto path_fine = std::make_shared<SimplicialComplex>(build_triangulated_cube(1, 12, opts.cap));
  auto square = std::make_shared<SimplicialComplex>(build_triangulated_cube(2, 2, opts.cap));
  auto square_fine = std::make_shared<SimplicialComplex>(build_triangulated_cube(2, 4, opts.cap));
  for (int t = 0; t < trials; ++t) {
    const bool is_path = t % 2 == 0;
    const ComplexPtr& K = is_path ? path : square;
    const ComplexPtr& Kf = is_path ? path_fine : square_fine;
    const int L = is_path ? static_cast<int>(t / 2 % 2) : 0;
    Cover a = random_star_cover(K, rng);
    Cover b = random_star_cover(K, rng);
    InequalityExtras ex;
    ex.product_factor = std::make_shared<BoxCover>(random_interval_cover(4, rng));
    ex.product_n = 2;
    ex.map = std::make_shared<SimplicialMap>(halving_map(Kf, K));
    ex.target_cover = std::make_shared<Cover>(random_star_cover(K, rng));
    SuiteTrial tr{t, is_path ? "path" : "square", L, verify_inequalities(a, b, L, ex, opts)};
    ++rep.trials;
    for (const auto& c : tr.report.checks) {
      ++rep.checks;
      ++rep.per_check[c.name.substr(0, c.name.find('('))];
      if (!c.pass) ++rep.violations;
    }
    if (!tr.report.all_pass()) rep.failing.push_back(std::move(tr));
  }
  return rep;
}

}  // namespace mdim
