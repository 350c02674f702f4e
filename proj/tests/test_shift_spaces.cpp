#include <doctest.h>

#include <set>

#include "mdim/compact_set.hpp"
#include "mdim/errors.hpp"
#include "mdim/rng.hpp"
#include "mdim/shift_space.hpp"

using namespace mdim;

namespace {

Rational R(std::int64_t p, std::int64_t q = 1) { return Rational(p, q); }

// ternary digits -> binary digits, stopping at the first 1
Rational staircase_by_digits(Rational t, int depth) {
  Rational out(0), w(1, 2);
  for (int i = 0; i < depth; ++i) {
    t *= 3;
    const auto d = t.floor();
    t -= Rational(d);
    if (d == 1) return out + w;
    if (d == 2) out += w;
    w /= 2;
    if (t == Rational(0)) break;
  }
  return out;
}

std::vector<double> values(const std::vector<WindowEstimate>& es) {
  std::vector<double> v;
  for (const auto& e : es) v.push_back(e.value.value().to_double());
  return v;
}

}  // namespace

TEST_CASE("contiguous intervals") {
  auto two = contiguous_intervals(CompactSet::finite({R(0), R(1)}), R(1, 100));
  REQUIRE(two.size() == 1);
  CHECK(two[0] == Interval{R(0), R(1), false, false});
  auto half = contiguous_intervals(CompactSet::finite({R(1, 2)}), R(1, 100));
  REQUIRE(half.size() == 2);
  CHECK(half[0] == Interval{R(0), R(1, 2), true, false});
  CHECK(half[1] == Interval{R(1, 2), R(1), false, true});
  auto c = contiguous_intervals(CompactSet::cantor(), R(1, 10));
  REQUIRE(c.size() == 3);
  CHECK(c[0] == Interval{R(1, 3), R(2, 3), false, false});
  CHECK(c[1] == Interval{R(1, 9), R(2, 9), false, false});
  CHECK(c[2] == Interval{R(7, 9), R(8, 9), false, false});
  CHECK(contiguous_intervals(CompactSet::cantor(), R(1, 30)).size() == 7);
}

TEST_CASE("Cantor-Bendixson ranks") {
  auto f = CompactSet::finite({R(0), R(1, 3), R(1)});
  CHECK_FALSE(cb_derivative(f).has_value());
  CHECK(cb_rank(f).rank == 1);
  CHECK(is_countable(f));
  auto g = CompactSet::geometric(R(0), R(1, 2), R(1, 2));
  auto dg = cb_derivative(g);
  REQUIRE(dg);
  CHECK(*dg == CompactSet::finite({R(0)}));
  CHECK(cb_rank(g).rank == 2);
  CHECK(is_countable(g));
  // the geometric points really are isolated: each sample has a gap next to it
  for (int k = 0; k < 6; ++k) {
    Rational p = R(1, 2);
    for (int i = 0; i < k; ++i) p /= 2;
    CHECK(g.contains(p));
    CHECK_FALSE(g.intersects(Interval{p, p + p / 4, false, true}));
  }
  auto c = CompactSet::cantor();
  CHECK(cb_rank(c).perfect_kernel);
  CHECK(cb_rank(c).code() == "perfect-kernel");
  CHECK_FALSE(is_countable(c));
  auto dc = cb_derivative(c);
  REQUIRE(dc);
  CHECK(*dc == c);
  CHECK_FALSE(is_countable(CompactSet::unite({f, CompactSet::affine(R(1, 3), R(0), c)})));
}

TEST_CASE("Cantor function") {
  CHECK(cantor_function(R(0)) == R(0));
  CHECK(cantor_function(R(1)) == R(1));
  CHECK(cantor_function(R(1, 3)) == R(1, 2));
  CHECK(cantor_function(R(2, 5)) == R(1, 2));
  CHECK(cantor_function(R(3, 5)) == R(1, 2));
  CHECK(cantor_function(R(1, 4)) == R(1, 3));  // 1/4 = 0.0202... ternary
}

TEST_CASE("property: Cantor function matches the ternary digit oracle") {
  Rng rng(derive_seed(5, 3));
  const std::int64_t den = 6561;  // 3^8
  for (int t = 0; t < 200; ++t) {
    const Rational x(uniform_int(rng, 0, den), den);
    CAPTURE(x.to_string());
    CHECK(cantor_function(x) == staircase_by_digits(x, 12));
  }
  // the affine image carries the rescaled staircase
  auto K = CompactSet::affine(R(1, 2), R(1, 2), CompactSet::cantor());
  CHECK(cantor_function_eval(K, R(1, 2) + R(1, 6)) == R(1, 2));
  CHECK(cantor_function_eval(K, R(1, 4)) == R(0));
}

TEST_CASE("grid snapping") {
  CHECK(snap_to_grid(CompactSet::finite({R(0), R(1, 3), R(1)}), 4) == std::vector<int>{0, 1, 4});
  CHECK(is_on_grid(CompactSet::finite({R(0), R(1, 2)}), 4));
  CHECK_FALSE(is_on_grid(CompactSet::finite({R(1, 3)}), 4));
  CHECK_FALSE(is_on_grid(CompactSet::cantor(), 9));
}

TEST_CASE("window projections") {
  SUBCASE("full shift is the whole square") {
    auto w = window_projection(FullShift{}, 2, 2);
    CHECK(*w.complex == build_triangulated_cube(2, 2));
  }
  SUBCASE("trivial action is the diagonal path") {
    auto w = window_projection(TrivialAction{}, 2, 4);
    CHECK(w.complex->num_vertices() == 5);
    CHECK(w.complex->top_dim() == 1);
    for (const auto& p : w.grid_points()) CHECK(p[0] == p[1]);
  }
  SUBCASE("psi of the endpoints is the whole square") {
    auto w = window_projection(PsiShift{CompactSet::finite({R(0), R(1)})}, 2, 2);
    CHECK(*w.complex == build_triangulated_cube(2, 2));
  }
  SUBCASE("off-grid data") {
    PsiShift p{CompactSet::finite({R(0), R(1, 3), R(1)})};
    CHECK_THROWS_AS(window_projection(p, 2, 2, true), UsageError);
    auto w = window_projection(p, 2, 2, false);
    CHECK_FALSE(w.warnings.empty());
  }
  CHECK_THROWS_AS(window_projection(FullShift{}, 4, 4, false, 100), CapError);
}

TEST_CASE("property: psi windows match the pointwise definition") {
  // B = {0, 1/2, 1}: a word lies in the window iff all letters lie in one
  // closed block [0,1/2] or [1/2,1]
  PsiShift X{CompactSet::finite({R(0), R(1, 2), R(1)})};
  for (int n = 1; n <= 3; ++n) {
    const int m = 4;
    auto w = window_projection(X, n, m);
    auto pts = w.grid_points();
    std::set<std::vector<int>> got(pts.begin(), pts.end());
    std::set<std::vector<int>> want;
    std::vector<int> x(n, 0);
    while (true) {
      bool lo = true, hi = true;
      for (int v : x) {
        lo = lo && v <= 2;
        hi = hi && v >= 2;
      }
      if (lo || hi) want.insert(x);
      int i = 0;
      while (i < n && ++x[i] > m) x[i++] = 0;
      if (i == n) break;
    }
    CHECK(got == want);
    CHECK(window_consistency(X, n, m).ok());
  }
}

TEST_CASE("window consistency for every descriptor") {
  std::vector<SubshiftDescriptor> xs{FullShift{}, TrivialAction{}, BlockShift{R(1, 4), R(3, 4)},
                                     PsiShift{CompactSet::geometric(R(0), R(1, 2), R(1, 2))}};
  for (const auto& X : xs) {
    CAPTURE(X.tag());
    for (int n = 1; n <= 2; ++n) CHECK(window_consistency(X, n, 4).ok());
    CHECK(SubshiftDescriptor::from_json(X.to_json()).to_json() == X.to_json());
  }
  CHECK_THROWS_AS(SubshiftDescriptor(BlockShift{R(3, 4), R(1, 4)}), UsageError);
}

TEST_CASE("Hausdorff distances") {
  CHECK(hausdorff_distance({R(0)}, {R(1)}).value == R(1));
  CHECK(hausdorff_distance({R(0), R(1, 2)}, {R(0), R(1, 2)}).value == R(0));
  std::vector<Rational> grid;
  for (int k = 0; k <= 4; ++k) grid.push_back(R(k, 4));
  CHECK(hausdorff_distance(grid, {R(0), R(1, 2), R(1)}).value == R(1, 4));
  // weighted grid version: center coordinate has weight 1
  CHECK(hausdorff_distance(std::vector<std::vector<int>>{{0, 0}}, {{0, 4}}, 4).value == R(1));
  CHECK(hausdorff_distance(std::vector<std::vector<int>>{{0, 0}}, {{4, 0}}, 4).value == R(1, 2));
  TruncatedMetric d{2};
  TruncatedPoint x{2, {R(0), R(0), R(0), R(0), R(0)}};
  TruncatedPoint y{2, {R(1), R(0), R(1, 4), R(0), R(0)}};
  CHECK(d.distance(x, y) == R(1, 4));
  CHECK(d.distance(x, x) == R(0));
}

TEST_CASE("window estimates") {
  auto alpha = distinguishing_interval_cover(3);
  CHECK(values(mdim_window_estimate(FullShift{}, alpha, 3, 0)) == std::vector<double>{1, 1, 1});
  auto triv = mdim_window_estimate(TrivialAction{}, alpha, 3, 0);
  REQUIRE(triv.size() == 3);
  for (int n = 1; n <= 3; ++n) CHECK(triv[n - 1].value == ExtRational(R(1, n)));
  auto psi01 = mdim_window_estimate(PsiShift{CompactSet::finite({R(0), R(1)})}, alpha, 2, 0);
  CHECK(values(psi01) == std::vector<double>{1, 1});
  // a block inside one element has value 0
  auto blk = mdim_window_estimate(BlockShift{R(0), R(1, 3)}, alpha, 2, 0);
  CHECK(values(blk) == std::vector<double>{0, 0});
  for (const auto& e : triv) CHECK(e.result.exact);
}
