#include "mdim/shift_space.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "mdim/errors.hpp"

namespace mdim {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

int round_to_grid(const Rational& x, int m) { return (x * Rational(m) + Rational(1, 2)).floor(); }

Rational rat(const nlohmann::json& x) {
  return x.is_string() ? Rational::parse(x.get<std::string>()) : Rational::parse(x.dump());
}

}  // namespace

SubshiftDescriptor::SubshiftDescriptor(Variant v) : v_(std::move(v)) {
  if (auto* b = std::get_if<BlockShift>(&v_)) {
    if (b->lo < Rational(0) || b->hi > Rational(1) || b->hi < b->lo) throw UsageError("block needs 0 <= lo <= hi <= 1");
  }
}

std::string SubshiftDescriptor::tag() const {
  return std::visit(overloaded{[](const FullShift&) { return std::string("full"); },
                               [](const TrivialAction&) { return std::string("trivial"); },
                               [](const PsiShift&) { return std::string("psi"); },
                               [](const BlockShift&) { return std::string("block"); }},
                    v_);
}

nlohmann::json SubshiftDescriptor::to_json() const {
  using nlohmann::json;
  return std::visit(overloaded{[](const FullShift&) { return json{{"kind", "full"}}; },
                               [](const TrivialAction&) { return json{{"kind", "trivial"}}; },
                               [](const PsiShift& p) { return json{{"kind", "psi"}, {"B", p.B.to_json()}}; },
                               [](const BlockShift& b) {
                                 return json{{"kind", "block"}, {"lo", b.lo.to_string()}, {"hi", b.hi.to_string()}};
                               }},
                    v_);
}

SubshiftDescriptor SubshiftDescriptor::from_json(const nlohmann::json& j) {
  try {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "full") return SubshiftDescriptor(FullShift{});
    if (kind == "trivial") return SubshiftDescriptor(TrivialAction{});
    if (kind == "psi") return SubshiftDescriptor(PsiShift{CompactSet::from_json(j.at("B"))});
    if (kind == "block") return SubshiftDescriptor(BlockShift{rat(j.at("lo")), rat(j.at("hi"))});
    throw UsageError("unknown subshift kind '" + kind + "'");
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("malformed subshift: ") + e.what());
  }
}

std::vector<std::vector<int>> WindowProjection::grid_points() const {
  std::vector<std::vector<int>> out;
  for (int v = 0; v < complex->num_vertices(); ++v) out.push_back(grid_coords(*complex, v));
  return out;
}

std::vector<GridBox> window_boxes(const SubshiftDescriptor& X, int n, int m, bool strict, std::vector<int>* snapped,
                                  std::vector<std::string>* warnings) {
  if (n < 1 || m < 1) throw UsageError("window needs n >= 1 and m >= 1");
  auto cube = [n](int lo, int hi) { return GridBox(n, {lo, hi}); };
  std::vector<GridBox> boxes;
  std::vector<int> pts;
  std::visit(overloaded{[&](const FullShift&) { boxes.push_back(cube(0, m)); },
                        [&](const TrivialAction&) {},
                        [&](const BlockShift& b) {
                          const bool aligned = (b.lo * Rational(m)).is_integer() && (b.hi * Rational(m)).is_integer();
                          if (!aligned) {
                            if (strict) throw UsageError("block endpoints are not on grid " + std::to_string(m));
                            if (warnings) warnings->push_back("block endpoints snapped to grid " + std::to_string(m));
                          }
                          int lo = round_to_grid(b.lo, m), hi = round_to_grid(b.hi, m);
                          pts = {lo, hi};
                          boxes.push_back(cube(lo, hi));
                        },
                        [&](const PsiShift& p) {
                          if (!is_on_grid(p.B, m)) {
                            if (strict) throw UsageError("B is not a set of grid points at m=" + std::to_string(m));
                            if (warnings) warnings->push_back("B snapped to grid " + std::to_string(m));
                          }
                          pts = snap_to_grid(p.B, m);
                          if (pts.front() > 0) boxes.push_back(cube(0, pts.front()));
                          for (std::size_t i = 0; i + 1 < pts.size(); ++i) boxes.push_back(cube(pts[i], pts[i + 1]));
                          if (pts.back() < m) boxes.push_back(cube(pts.back(), m));
                          if (boxes.empty()) boxes.push_back(cube(pts.front(), pts.front()));
                        }},
             X.variant());
  if (snapped) *snapped = pts;
  return boxes;
}

WindowProjection window_projection(const SubshiftDescriptor& X, int n, int m, bool strict, std::size_t cap) {
  WindowProjection w;
  w.n = n;
  w.m = m;
  if (std::holds_alternative<TrivialAction>(X.variant())) {
    if (n < 1 || m < 1) throw UsageError("window needs n >= 1 and m >= 1");
    std::vector<std::vector<int>> diag;
    for (int k = 0; k <= m; ++k) diag.emplace_back(n, k);
    w.complex = std::make_shared<SimplicialComplex>(kuhn_spanned(n, m, diag, cap));
    return w;
  }
  auto boxes = window_boxes(X, n, m, strict, &w.snapped, &w.warnings);
  w.complex = std::make_shared<SimplicialComplex>(kuhn_box_union(n, m, boxes, cap));
  return w;
}

Restriction window_restriction_in(const SimplicialComplex& cube, const WindowProjection& w) {
  std::map<std::vector<int>, int> at;
  for (int v = 0; v < cube.num_vertices(); ++v) at[grid_coords(cube, v)] = v;
  std::vector<int> ids;
  for (int id = 0; id < w.complex->num_simplices(); ++id) {
    Simplex s;
    for (int v : w.complex->simplex(id)) {
      auto it = at.find(grid_coords(*w.complex, v));
      if (it == at.end()) throw UsageError("window vertex not in cube");
      s.push_back(it->second);
    }
    std::sort(s.begin(), s.end());
    auto t = cube.find(s);
    if (!t) throw UsageError("window simplex not in cube");
    ids.push_back(*t);
  }
  return Restriction::closed(cube, SimplexSet(cube.num_simplices(), std::move(ids)));
}

ConsistencyReport window_consistency(const SubshiftDescriptor& X, int n, int m) {
  ConsistencyReport rep;
  const WindowProjection small = window_projection(X, n, m);
  const WindowProjection big = window_projection(X, n + 1, m);
  std::map<std::vector<int>, int> at;
  for (int v = 0; v < small.complex->num_vertices(); ++v) at[grid_coords(*small.complex, v)] = v;
  std::set<std::vector<int>> target;
  for (const auto& [p, v] : at) target.insert(p);

  std::set<std::vector<int>> last, first;
  std::vector<std::vector<int>> big_pts = big.grid_points();
  for (const auto& p : big_pts) {
    last.emplace(p.begin(), p.end() - 1);
    first.emplace(p.begin() + 1, p.end());
  }
  rep.projection_last = last == target;
  rep.projection_first = first == target;
  for (int id = 0; id < big.complex->num_simplices() && rep.simplices_project; ++id) {
    Simplex s;
    for (int v : big.complex->simplex(id)) {
      const auto& p = big_pts[v];
      auto it = at.find(std::vector<int>(p.begin(), p.end() - 1));
      if (it == at.end()) {
        rep.simplices_project = false;
        break;
      }
      s.push_back(it->second);
    }
    if (!rep.simplices_project) break;
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    rep.simplices_project = small.complex->find(s).has_value();
  }
  return rep;
}

Rational TruncatedMetric::distance(const TruncatedPoint& x, const TruncatedPoint& y) const {
  if (R > x.radius || R > y.radius) throw UsageError("truncation radius exceeds point radius");
  Rational best(0);
  for (int g = -R; g <= R; ++g) {
    Rational w(1, std::int64_t{1} << std::abs(g));
    best = mdim::max(best, w * (x.at(g) - y.at(g)).abs());
  }
  return best;
}

HausdorffEstimate hausdorff_distance(const std::vector<Rational>& A, const std::vector<Rational>& B) {
  if (A.empty() || B.empty()) throw UsageError("Hausdorff distance of an empty set");
  auto directed = [](const std::vector<Rational>& P, const std::vector<Rational>& Q) {
    Rational worst(0);
    for (const auto& p : P) {
      Rational best = (p - Q.front()).abs();
      for (const auto& q : Q) best = mdim::min(best, (p - q).abs());
      worst = mdim::max(worst, best);
    }
    return worst;
  };
  HausdorffEstimate h;
  h.value = mdim::max(directed(A, B), directed(B, A));
  h.window = 1;
  return h;
}

HausdorffEstimate hausdorff_distance(const std::vector<std::vector<int>>& P, const std::vector<std::vector<int>>& Q,
                                     int m) {
  if (P.empty() || Q.empty()) throw UsageError("Hausdorff distance of an empty set");
  const int n = static_cast<int>(P.front().size());
  const int c = n / 2;
  int R = 0;
  for (int i = 0; i < n; ++i) R = std::max(R, std::abs(i - c));
  if (R > 40) throw CapError("window too long for exact weights");
  std::vector<std::int64_t> w(n);
  for (int i = 0; i < n; ++i) w[i] = std::int64_t{1} << (R - std::abs(i - c));
  auto dist = [&](const std::vector<int>& x, const std::vector<int>& y) {
    std::int64_t d = 0;
    for (int i = 0; i < n; ++i) d = std::max(d, w[i] * std::abs(x[i] - y[i]));
    return d;
  };
  auto directed = [&](const std::vector<std::vector<int>>& A, const std::vector<std::vector<int>>& B) {
    std::int64_t worst = 0;
    for (const auto& a : A) {
      std::int64_t best = INT64_MAX;
      for (const auto& b : B) {
        best = std::min(best, dist(a, b));
        if (best <= worst) break;
      }
      worst = std::max(worst, best);
    }
    return worst;
  };
  HausdorffEstimate h;
  h.value = Rational(std::max(directed(P, Q), directed(Q, P)), m * (std::int64_t{1} << R));
  h.resolution = m;
  h.window = n;
  return h;
}

HausdorffEstimate window_hausdorff(const WindowProjection& a, const WindowProjection& b) {
  if (a.n != b.n || a.m != b.m) throw UsageError("windows differ in length or resolution");
  return hausdorff_distance(a.grid_points(), b.grid_points(), a.m);
}

std::vector<WindowEstimate> mdim_window_estimate(const SubshiftDescriptor& X, const BoxCover& alpha, int n_max, int L,
                                                 int m, const DimOptions& opts, bool strict) {
  if (alpha.dim() != 1) throw UsageError("window estimator needs a cover of the alphabet [0,1]");
  if (n_max < 1) throw UsageError("n_max must be >= 1");
  const int grid = m ? m : alpha.resolution();
  std::vector<WindowEstimate> out;
  for (int n = 1; n <= n_max; ++n) {
    WindowProjection w = window_projection(X, n, grid, strict, opts.cap);
    Cover c = product_cover(alpha, n).to_cover(w.complex);
    WindowEstimate e;
    e.n = n;
    e.result = dee_hat(c, w.restriction, L, opts);
    e.value = ExtRational::ratio(e.result.value, n);
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace mdim
