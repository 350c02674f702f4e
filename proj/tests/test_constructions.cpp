#include <doctest.h>

#include <set>

#include "mdim/constructions.hpp"
#include "mdim/errors.hpp"
#include "mdim/rng.hpp"

using namespace mdim;

namespace {

Rational R(std::int64_t p, std::int64_t q = 1) { return Rational(p, q); }

// x (grid units) lies in psi(B)'s window iff it is constant in B, or all
// letters lie in the closure of one interval contiguous to B
bool in_psi_window(const std::vector<int>& x, const std::vector<int>& B, int m) {
  bool constant = true;
  for (int v : x) constant = constant && v == x[0];
  if (constant && std::find(B.begin(), B.end(), x[0]) != B.end()) return true;
  std::vector<int> edges;
  if (B.front() > 0) edges.push_back(0);
  edges.insert(edges.end(), B.begin(), B.end());
  if (B.back() < m) edges.push_back(m);
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    bool inside = true;
    for (int v : x) inside = inside && edges[i] <= v && v <= edges[i + 1];
    if (inside) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("psi of small sets") {
  auto X = psi(CompactSet::finite({R(0), R(1)}));
  CHECK(X.tag() == "psi");
  auto pts = psi_window_points(CompactSet::finite({R(0), R(1)}), 2, 2);
  CHECK(pts.size() == 9);  // the whole square
  auto three = psi_window_points(CompactSet::finite({R(0), R(1, 2), R(1)}), 2, 2);
  std::set<std::vector<int>> got(three.begin(), three.end());
  CHECK(got == std::set<std::vector<int>>{{0, 0}, {0, 1}, {1, 0}, {1, 1}, {1, 2}, {2, 1}, {2, 2}});
}

TEST_CASE("property: psi windows agree with the pointwise rule") {
  Rng rng(derive_seed(8, 7));
  const int m = 8;
  for (int t = 0; t < 20; ++t) {
    std::vector<int> B;
    for (int k = 0; k <= m; ++k) {
      if (uniform_int(rng, 0, 3) == 0) B.push_back(k);
    }
    if (B.empty()) B.push_back(static_cast<int>(uniform_int(rng, 0, m)));
    std::vector<Rational> pts;
    for (int b : B) pts.push_back(R(b, m));
    const int n = static_cast<int>(uniform_int(rng, 1, 3));
    auto w = psi_window_points(CompactSet::finite(pts), n, m);
    std::set<std::vector<int>> got(w.begin(), w.end());
    std::set<std::vector<int>> want;
    std::vector<int> x(n, 0);
    while (true) {
      if (in_psi_window(x, B, m)) want.insert(x);
      int i = 0;
      while (i < n && ++x[i] > m) x[i++] = 0;
      if (i == n) break;
    }
    CAPTURE(t);
    CHECK(got == want);
  }
}

TEST_CASE("CPMD verdicts") {
  SUBCASE("finite") {
    auto v = cpmd_verdict(CompactSet::finite({R(0), R(1)}));
    CHECK(v.yes);
    CHECK(v.rank.rank == 1);
    CHECK_FALSE(v.factor.has_value());
  }
  SUBCASE("convergent sequence") {
    auto v = cpmd_verdict(CompactSet::geometric(R(0), R(1, 2), R(1, 2)));
    CHECK(v.yes);
    CHECK(v.rank.rank == 2);
    CHECK(v.blocks.components == 1);
  }
  SUBCASE("Cantor set") {
    auto v = cpmd_verdict(CompactSet::cantor());
    CHECK_FALSE(v.yes);
    REQUIRE(v.factor);
    REQUIRE(v.staircase);
    CHECK(v.staircase->constant_on_intervals);
    CHECK(v.staircase->non_constant);
    CHECK(v.staircase->f0 == R(0));
    CHECK(v.staircase->f1 == R(1));
    CHECK(v.factor->eval(R(1, 3)) == R(1, 2));
    CHECK(v.to_json().at("verdict") == "no");
  }
  SUBCASE("Cantor part inside a union") {
    auto B = CompactSet::unite({CompactSet::finite({R(0)}), CompactSet::affine(R(1, 2), R(1, 2), CompactSet::cantor())});
    auto v = cpmd_verdict(B);
    CHECK_FALSE(v.yes);
    REQUIRE(v.staircase);
    CHECK(v.staircase->non_constant);
    CHECK(v.staircase->violations.empty());
  }
}

TEST_CASE("psi continuity") {
  auto same = psi_continuity_check(CompactSet::finite({R(0), R(1, 2)}), CompactSet::finite({R(0), R(1, 2)}), R(1, 2), 2, 4);
  CHECK(same.set_distance == R(0));
  CHECK(same.window_distance == R(0));
  CHECK(same.pass);
  const int m = 16;
  auto near = psi_continuity_check(CompactSet::finite({R(0), R(1)}), CompactSet::finite({R(0), R(m - 1, m), R(1)}),
                                   R(1, 2), 2, m);
  CHECK(near.premise);
  CHECK(near.pass);
  CHECK(near.window_distance < R(1, 2));
  CHECK_THROWS_AS(psi_continuity_check(CompactSet::finite({R(1, 3)}), CompactSet::finite({R(0)}), R(1, 2), 2, 4),
                  UsageError);
  auto suite = psi_continuity_suite(1, 50, R(1, 2), 3, 12);
  CHECK(suite.trials.size() == 50);
  CHECK(suite.violations == 0);
  int premised = 0;
  for (const auto& t : suite.trials) premised += t.premise;
  CHECK(premised == 50);
}
