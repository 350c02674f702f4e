#include "mdim/sofic.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <set>
#include <sstream>

#include "mdim/constructions.hpp"
#include "mdim/errors.hpp"
#include "mdim/rng.hpp"
#include "mdim/serialize.hpp"

namespace mdim {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

int mod(std::int64_t a, int n) { return static_cast<int>(((a % n) + n) % n); }

std::vector<int> indices_of(const SoficApproximation& s, const std::vector<std::string>& F) {
  if (F.empty()) throw UsageError("F must be nonempty");
  std::vector<int> out;
  for (const auto& g : F) out.push_back(s.index_of(g));
  return out;
}

// s(gh) as a permutation; cyclic models compute it for any integer,
// loaded models only inside their product table.
std::optional<std::vector<int>> product_perm(const SoficApproximation& s, int i, int j) {
  if (s.cyclic) {
    std::vector<int> p(s.n);
    for (int v = 0; v < s.n; ++v) p[v] = mod(static_cast<std::int64_t>(v) + s.shifts[i] + s.shifts[j], s.n);
    return p;
  }
  auto it = s.product.find({i, j});
  if (it == s.product.end()) return std::nullopt;
  return s.perms[it->second];
}

}  // namespace

int SoficApproximation::index_of(const std::string& label) const {
  auto it = std::find(elements.begin(), elements.end(), label);
  if (it == elements.end()) throw UsageError("element '" + label + "' not in the model support");
  return static_cast<int>(it - elements.begin());
}

nlohmann::json SoficApproximation::to_json() const {
  nlohmann::json j{{"n", n}, {"elements", elements}, {"cyclic", cyclic}};
  if (!cyclic) j["perms"] = perms;
  return j;
}

SoficApproximation cyclic_model(int n, const std::vector<int>& elements) {
  if (n < 1) throw UsageError("model size must be >= 1");
  if (elements.empty()) throw UsageError("support must be nonempty");
  SoficApproximation s;
  s.n = n;
  s.cyclic = true;
  s.shifts = elements;
  for (int g : elements) {
    s.elements.push_back(std::to_string(g));
    std::vector<int> p(n);
    for (int v = 0; v < n; ++v) p[v] = mod(static_cast<std::int64_t>(v) + g, n);
    s.perms.push_back(std::move(p));
  }
  for (std::size_t i = 0; i < elements.size(); ++i) {
    if (elements[i] == 0) s.identity = static_cast<int>(i);
    for (std::size_t j = 0; j < elements.size(); ++j) {
      auto it = std::find(elements.begin(), elements.end(), elements[i] + elements[j]);
      if (it != elements.end()) s.product[{static_cast<int>(i), static_cast<int>(j)}] = static_cast<int>(it - elements.begin());
    }
  }
  return s;
}

SoficApproximation cyclic_approximation(int n, int k) {
  if (k < 0) throw UsageError("support radius must be >= 0");
  if (n <= 2 * k) throw UsageError("cyclic model needs n > 2k (got n=" + std::to_string(n) + ", k=" + std::to_string(k) + ")");
  std::vector<int> els;
  for (int g = -k; g <= k; ++g) els.push_back(g);
  return cyclic_model(n, els);
}

SoficApproximation parse_model(const std::string& text) {
  SoficApproximation s;
  std::istringstream in(text);
  std::string line;
  std::vector<std::tuple<std::string, std::string, std::string>> prods;
  std::optional<std::string> id_label;
  int lineno = 0;
  auto fail = [&](const std::string& what) { throw UsageError("model line " + std::to_string(lineno) + ": " + what); };
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
    line = trim(line);
    if (line.empty()) continue;
    if (line.rfind("size", 0) == 0 && line.find(':') == std::string::npos) {
      std::istringstream ls(line.substr(4));
      if (!(ls >> s.n) || s.n < 1) fail("bad size");
      continue;
    }
    if (line.rfind("identity", 0) == 0 && line.find(':') == std::string::npos) {
      id_label = trim(line.substr(8));
      continue;
    }
    if (auto eq = line.find('='); eq != std::string::npos) {
      auto star = line.find('*');
      if (star == std::string::npos || star > eq) fail("expected 'a * b = c'");
      prods.emplace_back(trim(line.substr(0, star)), trim(line.substr(star + 1, eq - star - 1)), trim(line.substr(eq + 1)));
      continue;
    }
    auto colon = line.find(':');
    if (colon == std::string::npos) fail("unrecognized line");
    if (s.n < 1) fail("size must come before permutations");
    const std::string label = trim(line.substr(0, colon));
    if (label.empty()) fail("empty label");
    if (std::find(s.elements.begin(), s.elements.end(), label) != s.elements.end()) fail("duplicate label " + label);
    std::istringstream ls(line.substr(colon + 1));
    std::vector<int> p;
    int x;
    while (ls >> x) p.push_back(x);
    if (!ls.eof()) fail("non-integer image");
    if (static_cast<int>(p.size()) != s.n) fail("permutation length differs from size");
    std::vector<char> seen(s.n, 0);
    for (int y : p) {
      if (y < 0 || y >= s.n || seen[y]) fail("not a permutation of [n]");
      seen[y] = 1;
    }
    s.elements.push_back(label);
    s.perms.push_back(std::move(p));
  }
  if (s.n < 1) throw UsageError("model has no size line");
  if (s.elements.empty()) throw UsageError("model has no permutations");
  if (id_label) {
    s.identity = s.index_of(*id_label);
    for (int v = 0; v < s.n; ++v) {
      if (s.perms[*s.identity][v] != v) throw UsageError("identity element is not the identity permutation");
    }
  }
  for (const auto& [a, b, c] : prods) s.product[{s.index_of(a), s.index_of(b)}] = s.index_of(c);
  return s;
}

SoficApproximation load_model(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw UsageError("cannot read model file " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_model(ss.str());
}

std::vector<PairQuality> approximation_quality(const SoficApproximation& s, const std::vector<std::string>& F) {
  const auto idx = indices_of(s, F);
  std::vector<PairQuality> out;
  for (int i : idx) {
    for (int j : idx) {
      PairQuality q;
      q.g = s.elements[i];
      q.h = s.elements[j];
      const auto gh = product_perm(s, i, j);
      int mult = 0, fr = 0;
      for (int v = 0; v < s.n; ++v) {
        if (gh && (*gh)[v] == s.perms[i][s.perms[j][v]]) ++mult;
        if (s.perms[i][v] != s.perms[j][v]) ++fr;
      }
      if (gh) q.multiplicative = Rational(mult, s.n);
      // distinct group elements; for Z compare the integers, labels otherwise
      const bool distinct = s.cyclic ? s.shifts[i] != s.shifts[j] : i != j;
      if (distinct) q.free = Rational(fr, s.n);
      out.push_back(std::move(q));
    }
  }
  return out;
}

nlohmann::json quality_to_json(const std::vector<PairQuality>& q) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& p : q) {
    nlohmann::json e{{"g", p.g}, {"h", p.h}};
    if (p.multiplicative) e["multiplicative"] = p.multiplicative->to_string();
    if (p.free) e["free"] = p.free->to_string();
    arr.push_back(std::move(e));
  }
  return arr;
}

double Defect::value() const { return std::sqrt(squared.to_double()); }

Defect microstate_defect(const Microstate& phi, int g_index, const SoficApproximation& s,
                         const TruncatedMetric& metric) {
  if (phi.size() != s.n) throw UsageError("microstate size differs from the model size");
  const auto& perm = s.perms.at(g_index);
  const int g = s.cyclic ? s.shifts[g_index] : 0;
  Rational sum(0);
  for (int v = 0; v < s.n; ++v) {
    const TruncatedPoint& x = phi.points[perm[v]];
    const TruncatedPoint& y = phi.points[v];
    if (!s.cyclic) {
      for (const auto* p : {&x, &y}) {
        if (std::any_of(p->coords.begin(), p->coords.end(), [&](const Rational& c) { return c != p->coords.front(); })) {
          throw UnsupportedError("loaded models act trivially; microstate points must be constant");
        }
      }
    }
    if (metric.R + std::abs(g) > y.radius || metric.R > x.radius) {
      throw UsageError("truncation radius too small for the shift by " + std::to_string(g));
    }
    Rational d(0);
    for (int h = -metric.R; h <= metric.R; ++h) {
      d = mdim::max(d, Rational(1, std::int64_t{1} << std::abs(h)) * (x.at(h) - y.at(h + g)).abs());
    }
    sum += d * d;
  }
  return Defect{sum / Rational(s.n)};
}

bool in_map(const Microstate& phi, const std::vector<int>& F_indices, const SoficApproximation& s,
            const TruncatedMetric& metric, const Rational& delta, bool strict) {
  const Rational d2 = delta * delta;
  if (delta < Rational(0)) return false;
  for (int g : F_indices) {
    const Rational q = microstate_defect(phi, g, s, metric).squared;
    if (strict ? !(q < d2) : (q > d2)) return false;
  }
  return true;
}

Microstate periodic_microstate(const std::vector<Rational>& z, int radius) {
  const int n = static_cast<int>(z.size());
  Microstate phi;
  for (int v = 0; v < n; ++v) {
    TruncatedPoint p{radius, {}};
    for (int g = -radius; g <= radius; ++g) p.coords.push_back(z[mod(static_cast<std::int64_t>(v) + g, n)]);
    phi.points.push_back(std::move(p));
  }
  return phi;
}

Microstate constant_microstate(const std::vector<Rational>& x, int radius) {
  Microstate phi;
  for (const auto& c : x) phi.points.push_back(TruncatedPoint{radius, std::vector<Rational>(2 * radius + 1, c)});
  return phi;
}

std::vector<std::vector<int>> tube_points(const SoficApproximation& s, int m, const EstimatorParams& p) {
  const auto F = indices_of(s, p.F);
  const int n = s.n;
  double total = std::pow(m + 1.0, n);
  if (total > 5e6) throw CapError("tube enumeration exceeds 5e6 grid points");
  // defect^2 = S_g / (n m^2) with S_g the sum of squared grid differences
  const Rational bound = p.delta * p.delta * Rational(n) * Rational(m) * Rational(m);
  std::vector<std::vector<int>> out;
  if (p.delta < Rational(0)) return out;
  std::vector<int> x(n, 0);
  while (true) {
    bool ok = true;
    for (int g : F) {
      std::int64_t S = 0;
      for (int v = 0; v < n; ++v) {
        const std::int64_t d = x[s.perms[g][v]] - x[v];
        S += d * d;
      }
      const Rational q(S);
      if (p.strict ? !(q < bound) : (q > bound)) {
        ok = false;
        break;
      }
    }
    if (ok) out.push_back(x);
    int i = n - 1;
    while (i >= 0 && x[i] == m) x[i--] = 0;
    if (i < 0) break;
    ++x[i];
  }
  return out;
}

MicrostateRealization realize_microstates(const SubshiftDescriptor& X, const SoficApproximation& s, int m,
                                          const EstimatorParams& p) {
  if (p.delta < Rational(0)) throw UsageError("delta must be >= 0");
  indices_of(s, p.F);
  MicrostateRealization r;
  const int n = s.n;
  if (std::holds_alternative<TrivialAction>(X.variant())) {
    auto pts = tube_points(s, m, p);
    r.method = "tube";
    r.exact = true;
    r.points = pts.size();
    if (pts.empty()) {
      r.method = "empty";
      return r;
    }
    r.complex = std::make_shared<SimplicialComplex>(kuhn_spanned(n, m, pts, p.opts.cap));
    return r;
  }
  if (!s.cyclic) throw UnsupportedError("shift actions need a cyclic model of Z");
  // periodic orbits have defect 0: present unless the strict inequality is 0 < 0
  if (p.strict && p.delta == Rational(0)) {
    r.method = "empty";
    r.exact = true;
    return r;
  }
  if (std::holds_alternative<FullShift>(X.variant())) {
    r.complex = std::make_shared<SimplicialComplex>(build_triangulated_cube(n, m, p.opts.cap));
    r.method = "periodic-family";
    r.exact = true;
  } else {
    r.complex = std::make_shared<SimplicialComplex>(kuhn_box_union(n, m, window_boxes(X, n, m, false), p.opts.cap));
    r.method = "periodic-blocks";
    r.lower_bound = true;
  }
  r.points = static_cast<std::size_t>(r.complex->num_vertices());
  return r;
}

nlohmann::json SoficEstimate::to_json() const {
  nlohmann::json j{{"model", model}, {"n", n},         {"value", mdim::to_json(value)},
                   {"exact", exact}, {"lower_bound", lower_bound}, {"method", method}};
  if (result) j["result"] = dim_result_to_json(*result, false);
  return j;
}

std::vector<SoficEstimate> sofic_mdim_estimate(const SubshiftDescriptor& X, const BoxCover& alpha,
                                               const EstimatorParams& p,
                                               const std::vector<SoficApproximation>& models) {
  if (alpha.dim() != 1) throw UsageError("sofic estimator needs a cover of the alphabet [0,1]");
  std::vector<SoficEstimate> out;
  for (std::size_t i = 0; i < models.size(); ++i) {
    const auto& s = models[i];
    SoficEstimate e;
    e.model = static_cast<int>(i);
    e.n = s.n;
    auto r = realize_microstates(X, s, alpha.resolution(), p);
    e.method = r.method;
    e.exact = r.exact;
    e.lower_bound = r.lower_bound;
    if (!r.complex) {
      e.value = ExtRational::neg_inf();
    } else {
      Cover c = product_cover(alpha, s.n).to_cover(r.complex);
      e.result = dee_hat(c, Restriction::whole(), p.L, p.opts);
      e.exact = e.exact && e.result->exact;
      e.value = ExtRational::ratio(e.result->value, s.n);
    }
    out.push_back(std::move(e));
  }
  return out;
}

double EntropyEstimate::value() const {
  if (!count) return -std::numeric_limits<double>::infinity();
  return std::log(static_cast<double>(*count)) / n;
}

nlohmann::json EntropyEstimate::to_json() const {
  nlohmann::json j{{"model", model}, {"n", n}, {"lower_bound", lower_bound}};
  if (count) {
    j["count"] = *count;
    j["value"] = value();
  } else {
    j["count"] = nullptr;
    j["value"] = "-inf";
  }
  return j;
}

std::int64_t min_subcover(const Cover& c, const Restriction& Y) {
  const auto items = Y.admitted(c.complex());
  if (items.empty()) return 0;
  const std::size_t words = (items.size() + 63) / 64;
  using Bits = std::vector<std::uint64_t>;
  std::vector<Bits> sets;
  for (const auto& e : c.elements()) {
    Bits b(words, 0);
    bool any = false;
    for (std::size_t k = 0; k < items.size(); ++k) {
      if (e.contains(items[k])) {
        b[k / 64] |= std::uint64_t{1} << (k % 64);
        any = true;
      }
    }
    if (any) sets.push_back(std::move(b));
  }
  auto subset = [&](const Bits& a, const Bits& b) {
    for (std::size_t w = 0; w < words; ++w) {
      if (a[w] & ~b[w]) return false;
    }
    return true;
  };
  // drop dominated sets
  std::sort(sets.begin(), sets.end());
  sets.erase(std::unique(sets.begin(), sets.end()), sets.end());
  std::vector<Bits> kept;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < sets.size() && !dominated; ++j) dominated = j != i && subset(sets[i], sets[j]);
    if (!dominated) kept.push_back(sets[i]);
  }
  sets = std::move(kept);
  auto popcount = [&](const Bits& b, const Bits& covered) {
    int k = 0;
    for (std::size_t w = 0; w < words; ++w) k += std::popcount(b[w] & ~covered[w]);
    return k;
  };
  // greedy bound
  std::int64_t best = 0;
  {
    Bits cov(words, 0);
    std::size_t left = items.size();
    while (left > 0) {
      int bi = -1, bk = 0;
      for (std::size_t i = 0; i < sets.size(); ++i) {
        int k = popcount(sets[i], cov);
        if (k > bk) bk = k, bi = static_cast<int>(i);
      }
      if (bi < 0) throw std::logic_error("cover elements do not cover the restriction");
      for (std::size_t w = 0; w < words; ++w) cov[w] |= sets[bi][w];
      left -= bk;
      ++best;
    }
  }
  Bits cov(words, 0);
  std::function<void(std::int64_t, std::size_t)> dfs = [&](std::int64_t used, std::size_t left) {
    if (left == 0) {
      best = std::min(best, used);
      return;
    }
    int maxk = 0;
    for (const auto& b : sets) maxk = std::max(maxk, popcount(b, cov));
    if (used + static_cast<std::int64_t>((left + maxk - 1) / maxk) >= best) return;
    // branch on the uncovered item with the fewest covering sets
    std::size_t item = 0;
    int fewest = INT32_MAX;
    for (std::size_t k = 0; k < items.size(); ++k) {
      if (cov[k / 64] >> (k % 64) & 1) continue;
      int cnt = 0;
      for (const auto& b : sets) cnt += (b[k / 64] >> (k % 64)) & 1;
      if (cnt < fewest) fewest = cnt, item = k;
    }
    for (const auto& b : sets) {
      if (!((b[item / 64] >> (item % 64)) & 1)) continue;
      Bits saved = cov;
      const int k = popcount(b, cov);
      for (std::size_t w = 0; w < words; ++w) cov[w] |= b[w];
      dfs(used + 1, left - k);
      cov = std::move(saved);
    }
  };
  dfs(0, items.size());
  return best;
}

std::vector<EntropyEstimate> sofic_entropy_estimate(const SubshiftDescriptor& X, const BoxCover& alpha,
                                                    const EstimatorParams& p,
                                                    const std::vector<SoficApproximation>& models) {
  if (alpha.dim() != 1) throw UsageError("sofic estimator needs a cover of the alphabet [0,1]");
  std::vector<EntropyEstimate> out;
  for (std::size_t i = 0; i < models.size(); ++i) {
    const auto& s = models[i];
    EntropyEstimate e;
    e.model = static_cast<int>(i);
    e.n = s.n;
    auto r = realize_microstates(X, s, alpha.resolution(), p);
    e.lower_bound = r.lower_bound;
    if (r.complex) e.count = min_subcover(product_cover(alpha, s.n).to_cover(r.complex), Restriction::whole());
    out.push_back(e);
  }
  return out;
}

nlohmann::json SemicontReport::to_json() const {
  nlohmann::json tr = nlohmann::json::array();
  for (const auto& t : trials) {
    nlohmann::json b = nlohmann::json::array();
    for (const auto& x : t.B) b.push_back(x.to_string());
    tr.push_back({{"B", b}, {"distance", t.distance.to_string()}, {"ord", mdim::to_json(t.ord)}, {"drop", t.drop}});
  }
  return {{"base_ord", mdim::to_json(base_ord)},
          {"rho", rho.to_string()},
          {"fine_grid", fine_grid},
          {"trials", tr},
          {"violations", violations}};
}

SemicontReport semicontinuity_probe(const CompactSet& B, const Cover& beta, const EstimatorParams& p, int trials,
                                    std::uint64_t seed) {
  const SimplicialComplex& cube = beta.complex();
  if (!cube.grid()) throw UsageError("beta must live on a Kuhn cube");
  const int m = *cube.grid();
  const int n = cube.ambient_dim();
  if (!is_on_grid(B, m)) throw UsageError("B must be a finite set on the grid of beta's complex");
  const bool empty_map = p.strict && p.delta <= Rational(0);

  auto window_ord = [&](const CompactSet& S, int M, const SimplicialComplex* fine) -> ExtInt {
    if (empty_map) return ExtInt::neg_inf();
    if (!fine) {
      WindowProjection w = window_projection(psi(S), n, m);
      return ord(beta, window_restriction_in(cube, w));
    }
    (void)M;
    int best = 0;
    for (int f : fine->facets()) {
      auto c = cube.carrier(fine->barycenter(f));
      if (!c) throw std::logic_error("fine simplex outside the coarse cube");
      best = std::max(best, beta.multiplicity(*c));
    }
    return best == 0 ? ExtInt::neg_inf() : ExtInt(best - 1);
  };

  SemicontReport rep;
  rep.base_ord = window_ord(B, m, nullptr);
  // realizing simplex with the fewest vertices
  std::size_t k1 = static_cast<std::size_t>(n) + 1;
  if (!empty_map) {
    WindowProjection w = window_projection(psi(B), n, m);
    Restriction Y = window_restriction_in(cube, w);
    for (int id : Y.admitted(cube)) {
      if (ExtInt(beta.multiplicity(id) - 1) == rep.base_ord) k1 = std::min(k1, cube.simplex(id).size());
    }
  }
  // barycentric coordinates are 2m-Lipschitz in the sup norm and windows move by
  // at most 3 d_H(B, B'); weights are at least 2^{-c}
  int c = 0;
  for (int i = 0; i < n; ++i) c = std::max(c, std::abs(i - n / 2));
  rep.rho = Rational(1, std::int64_t{1} << c) / Rational(6 * m * static_cast<std::int64_t>(k1));
  int q = 1;
  while (!(rep.rho * Rational(m * q) > Rational(1))) ++q;
  const int M = m * q;
  rep.fine_grid = M;
  const int smax = static_cast<int>((rep.rho * Rational(M)).ceil() - 1);

  std::vector<int> base;
  for (int k : snap_to_grid(B, m)) base.push_back(k * q);
  std::vector<Rational> bvals;
  for (int k : base) bvals.emplace_back(k, M);
  Rng rng(derive_seed(seed, 9));
  for (int t = 0; t < trials; ++t) {
    std::set<int> pts;
    if (t == 0) {
      pts.insert(base.begin(), base.end());
    } else {
      for (int k : base) {
        pts.insert(std::clamp(k + static_cast<int>(uniform_int(rng, -smax, smax)), 0, M));
        if (uniform_int(rng, 0, 2) == 0) pts.insert(std::clamp(k + static_cast<int>(uniform_int(rng, -smax, smax)), 0, M));
      }
    }
    SemicontTrial tr;
    for (int k : pts) tr.B.emplace_back(k, M);
    tr.distance = hausdorff_distance(bvals, tr.B).value;
    if (empty_map) {
      tr.ord = ExtInt::neg_inf();
    } else {
      auto fine = kuhn_box_union(n, M, window_boxes(psi(CompactSet::finite(tr.B)), n, M, true), p.opts.cap);
      tr.ord = window_ord(CompactSet::finite(tr.B), M, &fine);
    }
    tr.drop = tr.ord < rep.base_ord;
    if (tr.drop) ++rep.violations;
    rep.trials.push_back(std::move(tr));
  }
  return rep;
}

}  // namespace mdim
