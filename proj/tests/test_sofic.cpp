#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "mdim/errors.hpp"
#include "mdim/inequality_suite.hpp"
#include "mdim/rng.hpp"
#include "mdim/sofic.hpp"

using namespace mdim;

namespace {

Rational R(std::int64_t p, std::int64_t q = 1) { return Rational(p, q); }

const PairQuality& pair(const std::vector<PairQuality>& q, const std::string& g, const std::string& h) {
  for (const auto& p : q) {
    if (p.g == g && p.h == h) return p;
  }
  FAIL("pair not reported");
  return q.front();
}

std::string model_text(int n, const std::vector<std::pair<std::string, std::vector<int>>>& perms,
                       const std::vector<std::string>& products) {
  std::ostringstream os;
  os << "# test model\nsize " << n << "\nidentity 0\n";
  for (const auto& [l, p] : perms) {
    os << l << ":";
    for (int v : p) os << ' ' << v;
    os << '\n';
  }
  for (const auto& pr : products) os << pr << '\n';
  return os.str();
}

// exhaustive set cover
std::int64_t brute_cover(const Cover& c) {
  const int k = c.size();
  const int ns = c.complex().num_simplices();
  std::int64_t best = k;
  for (int mask = 1; mask < (1 << k); ++mask) {
    std::vector<char> hit(ns, 0);
    for (int i = 0; i < k; ++i) {
      if (mask >> i & 1) {
        for (int id : c.element(i).ids()) hit[id] = 1;
      }
    }
    if (std::all_of(hit.begin(), hit.end(), [](char h) { return h; })) {
      best = std::min<std::int64_t>(best, __builtin_popcount(mask));
    }
  }
  return best;
}

}  // namespace

TEST_CASE("cyclic approximation quality") {
  auto s = cyclic_approximation(5, 1);
  auto q = approximation_quality(s, {"-1", "0", "1"});
  for (const auto& p : q) {
    if (p.multiplicative) CHECK(*p.multiplicative == R(1));
    if (p.free) CHECK(*p.free == R(1));
  }
  CHECK(*pair(q, "0", "1").free == R(1));
  CHECK_THROWS_AS(cyclic_approximation(6, 3), UsageError);
  auto c = cyclic_model(3, {0, 3});
  auto qc = approximation_quality(c, {"0", "3"});
  CHECK(*pair(qc, "0", "3").free == R(0));
}

TEST_CASE("loaded model with a corrupted permutation") {
  // cyclic on 5 points with s(1) corrupted by swapping two images
  std::vector<int> plus{1, 2, 3, 4, 0}, minus{4, 0, 1, 2, 3}, id{0, 1, 2, 3, 4};
  std::vector<int> bad = plus;
  std::swap(bad[0], bad[4]);  // 0 becomes a fixed point
  const std::string text =
      model_text(5, {{"0", id}, {"1", bad}, {"-1", minus}}, {"1 * -1 = 0", "-1 * 1 = 0", "0 * 1 = 1", "1 * 0 = 1",
                                                             "0 * -1 = -1", "-1 * 0 = -1", "0 * 0 = 0"});
  const std::string path = "corrupted_model_test.txt";
  {
    std::ofstream f(path);
    f << text;
  }
  auto s = load_model(path);
  std::remove(path.c_str());
  CHECK(s.n == 5);
  auto q = approximation_quality(s, {"-1", "0", "1"});
  // direct counts on the raw arrays
  auto count = [](const std::vector<int>& gh, const std::vector<int>& g, const std::vector<int>& h) {
    int c = 0;
    for (int v = 0; v < 5; ++v) c += gh[v] == g[h[v]];
    return Rational(c, 5);
  };
  auto differ = [](const std::vector<int>& g, const std::vector<int>& h) {
    int c = 0;
    for (int v = 0; v < 5; ++v) c += g[v] != h[v];
    return Rational(c, 5);
  };
  CHECK(*pair(q, "1", "-1").multiplicative == count(id, bad, minus));
  CHECK(*pair(q, "-1", "1").multiplicative == count(id, minus, bad));
  CHECK(*pair(q, "1", "-1").multiplicative < R(1));
  CHECK(*pair(q, "0", "1").multiplicative == R(1));
  CHECK(*pair(q, "1", "0").free == differ(bad, id));
  CHECK(*pair(q, "1", "0").free < R(1));
  CHECK_THROWS_AS(parse_model("size 3\n0: 0 1 1\n"), UsageError);
  CHECK_THROWS_AS(load_model("no_such_model_file.txt"), UsageError);
}

TEST_CASE("microstate defects") {
  auto s = cyclic_approximation(6, 1);
  TruncatedMetric d{2};
  auto c = constant_microstate(std::vector<Rational>(6, R(1, 3)), 3);
  for (int g = 0; g < 3; ++g) CHECK(microstate_defect(c, g, s, d).squared == R(0));
  auto p = periodic_microstate({R(0), R(1, 2), R(1), R(1, 4), R(0), R(3, 4)}, 3);
  for (int g = 0; g < 3; ++g) CHECK(microstate_defect(p, g, s, d).squared == R(0));
  // delta at the diameter always admits
  Rng rng(derive_seed(3, 5));
  for (int t = 0; t < 10; ++t) {
    std::vector<Rational> x;
    for (int v = 0; v < 6; ++v) x.push_back(R(uniform_int(rng, 0, 8), 8));
    auto phi = constant_microstate(x, 3);
    CHECK(in_map(phi, {0, 1, 2}, s, d, R(1), false));
  }
  CHECK_FALSE(in_map(c, {0, 1, 2}, s, d, R(0), true));
}

TEST_CASE("property: trivial tube matches the defect oracle") {
  for (int n : {3, 4}) {
    auto s = cyclic_approximation(n, 1);
    EstimatorParams p;
    p.F = {"0", "1"};
    p.delta = R(1, 20);
    const int m = 4;
    auto pts = tube_points(s, m, p);
    std::set<std::vector<int>> got(pts.begin(), pts.end());
    std::set<std::vector<int>> want;
    TruncatedMetric metric{p.R};
    std::vector<int> x(n, 0);
    const std::vector<int> F{s.index_of("0"), s.index_of("1")};
    while (true) {
      std::vector<Rational> xs;
      for (int v : x) xs.push_back(R(v, m));
      if (in_map(constant_microstate(xs, p.R + 1), F, s, metric, p.delta, false)) want.insert(x);
      int i = 0;
      while (i < n && ++x[i] > m) x[i++] = 0;
      if (i == n) break;
    }
    CHECK(got == want);
    CHECK(want.size() == static_cast<std::size_t>(m + 1));  // only the constants at this delta
  }
}

TEST_CASE("sofic estimates") {
  auto alpha = distinguishing_interval_cover(3);
  SUBCASE("full shift is 1 per model") {
    EstimatorParams p;
    p.F = {"0", "1"};
    auto es = sofic_mdim_estimate(FullShift{}, alpha, p, {cyclic_approximation(3, 1), cyclic_model(2, {0, 1})});
    REQUIRE(es.size() == 2);
    for (const auto& e : es) CHECK(e.value == ExtRational(R(1)));
  }
  SUBCASE("strict with zero delta is empty") {
    EstimatorParams p;
    p.delta = R(0);
    p.strict = true;
    auto es = sofic_mdim_estimate(FullShift{}, alpha, p, {cyclic_approximation(3, 1)});
    CHECK(es[0].value.is_neg_inf());
    auto en = sofic_entropy_estimate(FullShift{}, alpha, p, {cyclic_approximation(3, 1)});
    CHECK_FALSE(en[0].count.has_value());
    CHECK(en[0].value() == -std::numeric_limits<double>::infinity());
  }
  SUBCASE("trivial action at n = 4") {
    EstimatorParams p;
    p.F = {"0", "1"};
    auto es = sofic_mdim_estimate(TrivialAction{}, alpha, p, {cyclic_approximation(4, 1)});
    CHECK(es[0].value <= ExtRational(R(1, 2)));
    CHECK(es[0].exact);
  }
  SUBCASE("single element cover has zero entropy") {
    auto one = BoxCover::intervals(3, {{0, 3, true, true}});
    EstimatorParams p;
    p.F = {"0", "1"};
    auto en = sofic_entropy_estimate(FullShift{}, one, p, {cyclic_approximation(3, 1)});
    REQUIRE(en[0].count);
    CHECK(*en[0].count == 1);
    CHECK(en[0].value() == 0.0);
  }
}

TEST_CASE("property: minimal subcover equals exhaustive set cover") {
  Rng rng(derive_seed(11, 6));
  auto K = std::make_shared<SimplicialComplex>(build_triangulated_cube(2, 2));
  for (int t = 0; t < 25; ++t) {
    Cover c = random_star_cover(K, rng, 2, 6);
    CHECK(min_subcover(c, Restriction::whole()) == brute_cover(c));
  }
}

TEST_CASE("semicontinuity probe sees the base point without a drop") {
  auto K = std::make_shared<SimplicialComplex>(build_triangulated_cube(2, 2));
  Cover beta = product_cover(standard_path_cover(2), 2).to_cover(K);
  EstimatorParams p;
  p.F = {"0", "1"};
  auto rep = semicontinuity_probe(CompactSet::finite({R(0), R(1, 2), R(1)}), beta, p, 8, 17);
  REQUIRE(rep.trials.size() == 8);
  CHECK(rep.trials[0].distance == R(0));
  CHECK(rep.trials[0].ord == rep.base_ord);
  CHECK(rep.violations == 0);
  for (const auto& t : rep.trials) CHECK(t.distance < rep.rho);
}
