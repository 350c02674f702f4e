#include "mdim/pairs.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "mdim/errors.hpp"
#include "mdim/serialize.hpp"

namespace mdim {

namespace {

int grid_of(const CellSet& s) { return static_cast<int>(s.size() - 1) / 2; }

nlohmann::json mask_to_json(const CellSet& s) {
  const int M = grid_of(s);
  nlohmann::json out = nlohmann::json::array();
  const int n = static_cast<int>(s.size());
  for (int c = 0; c < n;) {
    if (!s[c]) {
      ++c;
      continue;
    }
    int e = c;
    while (e + 1 < n && s[e + 1]) ++e;
    const int lo = c / 2, hi = (e + 1) / 2;
    out.push_back({{"lo", Rational(lo, M).to_string()},
                   {"hi", Rational(hi, M).to_string()},
                   {"lo_closed", c % 2 == 0},
                   {"hi_closed", e % 2 == 0}});
    c = e + 1;
  }
  return out;
}

ExtRational per_coordinate(const ExtInt& v, int n) { return ExtRational::ratio(v, n); }

bool at_least(const ExtInt& v, int n, const Rational& threshold) {
  return !v.is_neg_inf() && Rational(v.value(), n) >= threshold;
}

}  // namespace

CellSet cell_closure(const CellSet& s) {
  CellSet out = s;
  for (std::size_t c = 1; c < s.size(); c += 2) {
    if (s[c]) out[c - 1] = out[c + 1] = 1;
  }
  return out;
}

CellSet cell_complement(const CellSet& s) {
  CellSet out(s.size());
  for (std::size_t c = 0; c < s.size(); ++c) out[c] = !s[c];
  return out;
}

CellSet cell_union(const CellSet& a, const CellSet& b) {
  CellSet out(a.size());
  for (std::size_t c = 0; c < a.size(); ++c) out[c] = a[c] || b[c];
  return out;
}

bool cell_subset(const CellSet& a, const CellSet& b) {
  for (std::size_t c = 0; c < a.size(); ++c) {
    if (a[c] && !b[c]) return false;
  }
  return true;
}

bool cell_empty(const CellSet& s) { return std::none_of(s.begin(), s.end(), [](char x) { return x; }); }

CellSet closed_ball(int M, int c, int r) {
  CellSet out(2 * M + 1, 0);
  const int lo = std::max(0, c - r), hi = std::min(M, c + r);
  for (int code = 2 * lo; code <= 2 * hi; ++code) out[code] = 1;
  return out;
}

int cell_diameter(const CellSet& s) {
  int lo = -1, hi = -1;
  for (int c = 0; c < static_cast<int>(s.size()); c += 2) {
    if (!s[c]) continue;
    if (lo < 0) lo = c / 2;
    hi = c / 2;
  }
  return lo < 0 ? -1 : hi - lo;
}

CellSet element_mask(const BoxCover& alpha, int i) {
  if (alpha.dim() != 1) throw UsageError("alphabet covers are one-dimensional");
  CellSet out(2 * alpha.resolution() + 1, 0);
  for (const auto& box : alpha.elements()[i]) out = cell_union(out, box[0]);
  return out;
}

BoxCover cover_from_masks(int M, const std::vector<CellSet>& masks) {
  std::vector<std::vector<Box>> elems;
  for (const auto& m : masks) elems.push_back({Box{m}});
  return BoxCover(M, 1, std::move(elems));
}

BoxCover refine_cover(const BoxCover& alpha, int factor) {
  if (factor < 1) throw UsageError("refinement factor must be >= 1");
  const int M = alpha.resolution(), N = M * factor;
  std::vector<CellSet> masks;
  for (int i = 0; i < alpha.size(); ++i) {
    const CellSet old = element_mask(alpha, i);
    CellSet m(2 * N + 1, 0);
    for (int k = 0; k <= N; ++k) m[2 * k] = k % factor == 0 ? old[2 * (k / factor)] : old[2 * (k / factor) + 1];
    for (int k = 0; k < N; ++k) m[2 * k + 1] = old[2 * (k / factor) + 1];
    masks.push_back(std::move(m));
  }
  return cover_from_masks(N, masks);
}

BoxCover compress_cover(const BoxCover& alpha) {
  const int M = alpha.resolution();
  std::vector<CellSet> masks;
  for (int i = 0; i < alpha.size(); ++i) masks.push_back(element_mask(alpha, i));
  auto pattern = [&](int code) {
    std::vector<char> p;
    for (const auto& m : masks) p.push_back(m[code]);
    return p;
  };
  std::vector<int> ess;
  for (int k = 0; k <= M; ++k) {
    if (k == 0 || k == M || pattern(2 * k) != pattern(2 * k - 1) || pattern(2 * k) != pattern(2 * k + 1)) {
      ess.push_back(k);
    }
  }
  const int K = static_cast<int>(ess.size()) - 1;
  if (K < 1) return alpha;
  std::vector<CellSet> out(masks.size(), CellSet(2 * K + 1, 0));
  for (std::size_t e = 0; e < masks.size(); ++e) {
    for (int a = 0; a <= K; ++a) {
      out[e][2 * a] = masks[e][2 * ess[a]];
      if (a < K) out[e][2 * a + 1] = masks[e][2 * ess[a] + 1];
    }
  }
  return cover_from_masks(K, out);
}

bool is_dense(const CellSet& open) {
  const CellSet c = cell_closure(open);
  return std::all_of(c.begin(), c.end(), [](char x) { return x; });
}

bool is_standard(const BoxCover& alpha) {
  return alpha.dim() == 1 && alpha.size() == 2 && !is_dense(element_mask(alpha, 0)) &&
         !is_dense(element_mask(alpha, 1));
}

bool distinguishes(const BoxCover& alpha, int x, int y) {
  if (alpha.size() != 2) return false;
  const int M = alpha.resolution();
  if (x < 0 || x > M || y < 0 || y > M) throw UsageError("pair outside the grid");
  return !cell_closure(element_mask(alpha, 1))[2 * x] && !cell_closure(element_mask(alpha, 0))[2 * y];
}

nlohmann::json OracleResult::to_json() const {
  return {{"value", mdim::to_json(value)},
          {"exact", exact},
          {"positive", positive},
          {"compressed_grid", compressed_grid},
          {"nodes", nodes}};
}

OracleResult MdimOracle::test(const BoxCover& alpha) const {
  const BoxCover c = compress_cover(alpha);
  auto cube = std::make_shared<SimplicialComplex>(build_triangulated_cube(n, c.resolution(), opts.cap));
  DimOptions o = opts;
  o.cutoff = (threshold * Rational(n)).ceil() - 1;
  DimResult r = dee_hat(product_cover(c, n).to_cover(cube), Restriction::whole(), L, o);
  OracleResult out;
  out.compressed_grid = c.resolution();
  out.nodes = r.stats.nodes;
  out.exact = r.exact;
  out.value = per_coordinate(r.exact ? r.value : r.lower_bound, n);
  out.positive = at_least(r.lower_bound, n, threshold);
  return out;
}

OracleResult MdimOracle::value(const BoxCover& alpha) const {
  const BoxCover c = compress_cover(alpha);
  auto cube = std::make_shared<SimplicialComplex>(build_triangulated_cube(n, c.resolution(), opts.cap));
  DimOptions o = opts;
  o.cutoff.reset();
  DimResult r = dee_hat(product_cover(c, n).to_cover(cube), Restriction::whole(), L, o);
  OracleResult out;
  out.compressed_grid = c.resolution();
  out.nodes = r.stats.nodes;
  out.exact = r.exact;
  out.value = per_coordinate(r.value, n);
  out.positive = at_least(r.lower_bound, n, threshold);
  return out;
}

nlohmann::json StandardCoverCandidate::to_json() const {
  nlohmann::json tr = nlohmann::json::array();
  for (const auto& s : trace) tr.push_back({{"action", s.action}, {"index", s.index}, {"detail", s.detail}});
  nlohmann::json j{{"grid", cover.resolution()},
                   {"u_dense", u_dense},
                   {"v_dense", v_dense},
                   {"oracle", oracle.to_json()},
                   {"trace", tr},
                   {"ok", ok}};
  nlohmann::json els = nlohmann::json::array();
  for (int i = 0; i < cover.size(); ++i) els.push_back(mask_to_json(element_mask(cover, i)));
  j["elements"] = els;
  if (!failure.empty()) j["failure"] = failure;
  return j;
}

StandardCoverCandidate standardize(const BoxCover& alpha, const MdimOracle& oracle) {
  if (alpha.dim() != 1) throw UsageError("standardize works on alphabet covers");
  int M = alpha.resolution();
  std::vector<CellSet> masks;
  for (int i = 0; i < alpha.size(); ++i) masks.push_back(element_mask(alpha, i));
  StandardCoverCandidate out{alpha, false, false, {}, {}, false, {}};

  // every element keeps a private cell
  for (bool changed = true; changed && masks.size() > 1;) {
    changed = false;
    for (std::size_t i = 0; i < masks.size(); ++i) {
      CellSet others(masks[i].size(), 0);
      for (std::size_t j = 0; j < masks.size(); ++j) {
        if (j != i) others = cell_union(others, masks[j]);
      }
      if (cell_subset(masks[i], others)) {
        out.trace.push_back({"drop-redundant", static_cast<int>(i), {}});
        masks.erase(masks.begin() + static_cast<long>(i));
        changed = true;
        break;
      }
    }
  }
  if (masks.size() < 2) {
    out.failure = "cover has a single essential element";
    return out;
  }
  if (masks.size() == 2 && !is_dense(masks[0]) && !is_dense(masks[1])) {
    out.cover = cover_from_masks(M, masks);
    out.oracle = oracle.test(out.cover);
    out.ok = out.oracle.positive;
    out.trace.push_back({"already-standard", -1, out.oracle.to_json()});
    if (!out.ok) out.failure = "oracle not positive on the input cover";
    return out;
  }

  // two-element coarsenings (U_i, union of the others)
  CellSet U, V;
  bool found = false;
  for (std::size_t i = 0; i < masks.size() && !found; ++i) {
    CellSet rest(masks[i].size(), 0);
    for (std::size_t j = 0; j < masks.size(); ++j) {
      if (j != i) rest = cell_union(rest, masks[j]);
    }
    auto r = oracle.test(cover_from_masks(M, {masks[i], rest}));
    out.trace.push_back({"test-coarsening", static_cast<int>(i), r.to_json()});
    if (r.positive) {
      U = masks[i];
      V = rest;
      found = true;
    }
  }
  if (!found) {
    out.failure = "oracle inconsistency: no positive coarsening";
    out.cover = cover_from_masks(M, masks);
    return out;
  }

  // cut a closed cell lying inside `keep` out of the dense element `cut`
  auto carve = [&](CellSet& cut, const CellSet& keep, int which) {
    for (int attempt = 0; attempt < 8; ++attempt) {
      for (int k = 0; k < M; ++k) {
        if (!(keep[2 * k] && keep[2 * k + 1] && keep[2 * k + 2])) continue;
        CellSet next = cut;
        next[2 * k] = next[2 * k + 1] = next[2 * k + 2] = 0;
        if (cell_empty(next)) continue;
        cut = std::move(next);
        out.trace.push_back({"remove-closed-cell", which,
                             {{"lo", Rational(k, M).to_string()}, {"hi", Rational(k + 1, M).to_string()}}});
        return true;
      }
      auto fine = refine_cover(cover_from_masks(M, {U, V}), 2);
      M = fine.resolution();
      U = element_mask(fine, 0);
      V = element_mask(fine, 1);
      out.trace.push_back({"refine-grid", which, {{"grid", M}}});
    }
    return false;
  };
  if (is_dense(U) && !carve(U, V, 0)) {
    out.failure = "no closed cell inside the other element";
    return out;
  }
  if (is_dense(V) && !carve(V, U, 1)) {
    out.failure = "no closed cell inside the other element";
    return out;
  }
  out.cover = cover_from_masks(M, {U, V});
  out.u_dense = is_dense(U);
  out.v_dense = is_dense(V);
  out.oracle = oracle.test(out.cover);
  out.ok = !out.u_dense && !out.v_dense && out.oracle.positive;
  if (!out.oracle.positive) out.failure = "oracle inconsistency: refinement lost positivity";
  return out;
}

PairInvariants PairRegions::check() const {
  PairInvariants inv;
  for (std::size_t c = 0; c < u_comp0.size(); ++c) {
    if (u_comp0[c] && v_comp0[c]) inv.disjoint = false;
  }
  const CellSet* pu = &u_comp0;
  const CellSet* pv = &v_comp0;
  for (const auto& s : steps) {
    if (!cell_subset(s.u_comp, *pu) || !cell_subset(s.v_comp, *pv)) inv.nested = false;
    if (!cell_subset(s.u_comp, u_comp0) || !cell_subset(s.v_comp, v_comp0)) inv.inside_original = false;
    if (cell_diameter(s.u_comp) * s.n > 2 * M || cell_diameter(s.v_comp) * s.n > 2 * M) inv.diameters = false;
    if (cell_empty(s.u_comp) || cell_empty(s.v_comp)) inv.nested = false;
    for (std::size_t c = 0; c < s.u_comp.size(); ++c) {
      if (s.u_comp[c] && s.v_comp[c]) inv.disjoint = false;
    }
    pu = &s.u_comp;
    pv = &s.v_comp;
  }
  return inv;
}

nlohmann::json PairRegions::to_json() const {
  nlohmann::json st = nlohmann::json::array();
  for (const auto& s : steps) {
    nlohmann::json ut = nlohmann::json::array(), vt = nlohmann::json::array();
    for (const auto& r : s.u_trace) ut.push_back(r.to_json());
    for (const auto& r : s.v_trace) vt.push_back(r.to_json());
    st.push_back({{"n", s.n},
                  {"u_complement", mask_to_json(s.u_comp)},
                  {"v_complement", mask_to_json(s.v_comp)},
                  {"u_diameter", Rational(std::max(0, cell_diameter(s.u_comp)), M).to_string()},
                  {"v_diameter", Rational(std::max(0, cell_diameter(s.v_comp)), M).to_string()},
                  {"u_choice", s.u_choice},
                  {"v_choice", s.v_choice},
                  {"u_trace", ut},
                  {"v_trace", vt}});
  }
  const auto inv = check();
  nlohmann::json j{{"grid", M},
                   {"u_complement", mask_to_json(u_comp0)},
                   {"v_complement", mask_to_json(v_comp0)},
                   {"steps", st},
                   {"invariants",
                    {{"nested", inv.nested},
                     {"diameters", inv.diameters},
                     {"inside_original", inv.inside_original},
                     {"disjoint", inv.disjoint}}}};
  if (candidate) j["candidate"] = {Rational(candidate->first, M).to_string(), Rational(candidate->second, M).to_string()};
  if (!failure.empty()) j["failure"] = failure;
  return j;
}

PairRegions find_pair_regions(const BoxCover& alpha, int n_max, const MdimOracle& oracle) {
  if (n_max < 1) throw UsageError("n_max must be >= 1");
  if (n_max > 20) throw CapError("n_max too large for the common grid");
  PairRegions pr;
  if (!is_standard(alpha)) {
    pr.failure = "cover is not standard";
    return pr;
  }
  std::int64_t l = 1;
  for (int k = 1; k <= n_max; ++k) l = std::lcm(l, static_cast<std::int64_t>(k));
  const std::int64_t target = std::lcm(l, static_cast<std::int64_t>(alpha.resolution()));
  if (target > 100000) throw CapError("common grid exceeds 100000 cells");
  const BoxCover a = refine_cover(alpha, static_cast<int>(target / alpha.resolution()));
  const int M = a.resolution();
  pr.M = M;
  pr.u_comp0 = cell_complement(element_mask(a, 0));
  pr.v_comp0 = cell_complement(element_mask(a, 1));
  if (!oracle.test(a).positive) {
    pr.failure = "oracle not positive on the input cover";
    return pr;
  }
  CellSet cu = pr.u_comp0, cv = pr.v_comp0;

  // balls of radius M/n centred in C, greedily covering C
  auto ball_pieces = [&](const CellSet& C, int n) {
    const int r = M / n;
    std::vector<CellSet> pieces;
    int last = -1;
    for (int k = 0; k <= M; ++k) {
      if (!C[2 * k] || (last >= 0 && k <= last + r)) continue;
      last = k;
      CellSet ball = closed_ball(M, k, r);
      CellSet F(C.size(), 0);
      for (std::size_t c = 0; c < C.size(); ++c) F[c] = C[c] && ball[c];
      pieces.push_back(std::move(F));
    }
    return pieces;
  };

  for (int n = 1; n <= n_max; ++n) {
    PairStep st;
    st.n = n;
    const CellSet V = cell_complement(cv);
    auto pu = ball_pieces(cu, n);
    for (std::size_t i = 0; i < pu.size(); ++i) {
      auto r = oracle.test(cover_from_masks(M, {cell_complement(pu[i]), V}));
      st.u_trace.push_back(r);
      if (r.positive) {
        st.u_choice = static_cast<int>(i);
        break;
      }
    }
    if (st.u_choice < 0) {
      pr.failure = "oracle inconsistency at n=" + std::to_string(n) + " (U side)";
      return pr;
    }
    cu = pu[st.u_choice];
    const CellSet U = cell_complement(cu);
    auto pv = ball_pieces(cv, n);
    for (std::size_t j = 0; j < pv.size(); ++j) {
      auto r = oracle.test(cover_from_masks(M, {U, cell_complement(pv[j])}));
      st.v_trace.push_back(r);
      if (r.positive) {
        st.v_choice = static_cast<int>(j);
        break;
      }
    }
    if (st.v_choice < 0) {
      pr.failure = "oracle inconsistency at n=" + std::to_string(n) + " (V side)";
      return pr;
    }
    cv = pv[st.v_choice];
    st.u_comp = cu;
    st.v_comp = cv;
    pr.steps.push_back(std::move(st));
  }
  auto first_point = [](const CellSet& s) {
    for (int c = 0; c < static_cast<int>(s.size()); c += 2) {
      if (s[c]) return c / 2;
    }
    return -1;
  };
  pr.candidate = std::make_pair(first_point(cu), first_point(cv));
  return pr;
}

std::vector<BoxCover> sample_distinguishing_covers(int M, int x, int y, int count, Rng& rng) {
  if (x == y) throw UsageError("distinguishing covers need x != y");
  // radii need at least one step each and a gap between the balls
  int f = 1;
  while (std::abs(x - y) * f < 3) ++f;
  const int N = M * f, X = x * f, Y = y * f, d = std::abs(X - Y);
  std::vector<BoxCover> out;
  for (int i = 0; i < count; ++i) {
    const int r1 = static_cast<int>(uniform_int(rng, 1, d - 2));
    const int r2 = static_cast<int>(uniform_int(rng, 1, d - 1 - r1));
    out.push_back(cover_from_masks(N, {cell_complement(closed_ball(N, Y, r1)), cell_complement(closed_ball(N, X, r2))}));
  }
  return out;
}

bool AlphabetMap::is_surjective() const {
  return !image.empty() && *std::min_element(image.begin(), image.end()) == 0 &&
         *std::max_element(image.begin(), image.end()) == target_grid;
}

int AlphabetMap::cell_image(int code) const {
  if (code % 2 == 0) return 2 * image[code / 2];
  const int a = image[code / 2], b = image[code / 2 + 1];
  return a == b ? 2 * a : 2 * std::min(a, b) + 1;
}

BoxCover AlphabetMap::pullback(const BoxCover& alpha) const {
  if (alpha.resolution() != target_grid) throw UsageError("cover grid differs from the map's target grid");
  if (static_cast<int>(image.size()) != source_grid + 1) throw UsageError("map needs one image per grid point");
  for (std::size_t k = 0; k < image.size(); ++k) {
    if (image[k] < 0 || image[k] > target_grid) throw UsageError("map image outside the target grid");
    if (k > 0 && std::abs(image[k] - image[k - 1]) > 1) throw UsageError("map is not simplicial on the grid");
  }
  std::vector<CellSet> masks;
  for (int i = 0; i < alpha.size(); ++i) {
    const CellSet m = element_mask(alpha, i);
    CellSet p(2 * source_grid + 1, 0);
    for (int c = 0; c <= 2 * source_grid; ++c) p[c] = m[cell_image(c)];
    masks.push_back(std::move(p));
  }
  return cover_from_masks(source_grid, masks);
}

nlohmann::json TransferReport::to_json() const {
  return {{"upstairs", mdim::to_json(upstairs)},
          {"downstairs", mdim::to_json(downstairs)},
          {"inequality", inequality},
          {"pairs_tested", pairs_tested},
          {"pairs_positive", pairs_positive},
          {"ok", ok()}};
}

TransferReport verify_pair_transfer(const AlphabetMap& f, const BoxCover& alpha,
                                    const std::vector<std::pair<int, int>>& pairs, const MdimOracle& oracle,
                                    int samples, std::uint64_t seed) {
  if (!f.is_surjective()) throw UsageError("factor map must be surjective");
  TransferReport rep;
  rep.upstairs = oracle.value(f.pullback(alpha)).value;
  rep.downstairs = oracle.value(alpha).value;
  rep.inequality = rep.upstairs <= rep.downstairs;
  Rng rng(derive_seed(seed, 8));
  for (const auto& [x, y] : pairs) {
    const int fx = f.image.at(x), fy = f.image.at(y);
    if (fx == fy) continue;
    for (const auto& c : sample_distinguishing_covers(f.target_grid, fx, fy, samples, rng)) {
      ++rep.pairs_tested;
      if (oracle.test(c).positive) ++rep.pairs_positive;
    }
  }
  return rep;
}

ClosureReport pair_closure_check(int M, const std::vector<std::pair<int, int>>& candidates, const MdimOracle& oracle,
                                 int samples, std::uint64_t seed) {
  ClosureReport rep;
  if (candidates.empty() || candidates.back().first == candidates.back().second) {
    rep.skipped = true;
    return rep;
  }
  const auto [x, y] = candidates.back();
  Rng rng(derive_seed(seed, 10));
  const std::size_t tail_start = candidates.size() > 1 ? candidates.size() / 2 : 0;
  for (const auto& c : sample_distinguishing_covers(M, x, y, samples, rng)) {
    ++rep.covers;
    const int f = c.resolution() / M;
    bool tail = false;
    for (std::size_t k = tail_start; k < candidates.size() && !tail; ++k) {
      if (k + 1 == candidates.size() && candidates.size() > 1) break;
      tail = distinguishes(c, candidates[k].first * f, candidates[k].second * f);
    }
    if (tail) ++rep.distinguishing_tail;
    if (oracle.test(c).positive) ++rep.positive;
  }
  return rep;
}

}  // namespace mdim
