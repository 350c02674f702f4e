#include "mdim/dim_optimizer.hpp"

#include <algorithm>
#include <climits>
#include <set>
#include <tuple>

#include "mdim/errors.hpp"

namespace mdim {

// --- level preparation ------------------------------------------------------

LevelData prepare_level(const Cover& alpha, const Restriction& Y, int L, std::size_t cap) {
  if (L < 0) throw UsageError("level must be >= 0");
  LevelData d;
  d.complex = alpha.complex_ptr();
  for (const auto& e : alpha.elements()) d.elements.push_back(e.set());
  d.restriction = Y;
  if (Y.is_empty()) return d;

  const SimplicialComplex& K = *d.complex;
  if (Y.kind() != Restriction::Kind::Whole) {
    if (Y.payload().universe() != static_cast<std::size_t>(K.num_simplices())) {
      throw UsageError("restriction and cover live on different complexes");
    }
    SimplexSet closure =
        Y.kind() == Restriction::Kind::Closed ? Y.payload() : downward_closure(K, Y.payload());
    if (closure.size() < static_cast<std::size_t>(K.num_simplices())) {
      std::vector<int> verts = vertices_of(K, closure);
      std::vector<int> vmap(K.num_vertices(), -1);
      std::vector<Point> pts;
      for (std::size_t i = 0; i < verts.size(); ++i) {
        vmap[verts[i]] = static_cast<int>(i);
        pts.push_back(K.point(verts[i]));
      }
      std::vector<Simplex> simps;
      for (int id : closure.ids()) {
        Simplex s;
        for (int v : K.simplex(id)) s.push_back(vmap[v]);
        simps.push_back(std::move(s));
      }
      auto Kc = std::make_shared<SimplicialComplex>(K.ambient_dim(), std::move(pts), simps, cap, true);
      if (K.grid()) Kc->set_grid(*K.grid());
      std::vector<int> idmap(K.num_simplices(), -1);
      for (std::size_t j = 0; j < closure.ids().size(); ++j) idmap[closure.ids()[j]] = Kc->id_of(simps[j]);
      auto remap = [&](const SimplexSet& s) {
        std::vector<int> ids;
        for (int id : s.ids()) {
          if (idmap[id] >= 0) ids.push_back(idmap[id]);
        }
        return SimplexSet(Kc->num_simplices(), std::move(ids));
      };
      for (auto& e : d.elements) e = remap(e);
      SimplexSet payload = remap(Y.payload());
      d.restriction = Y.kind() == Restriction::Kind::Closed ? Restriction::closed(*Kc, payload)
                                                             : Restriction::open(*Kc, payload);
      d.complex = std::move(Kc);
    }
  }

  for (int level = 0; level < L; ++level) {
    std::vector<SimplexSet> sets = d.elements;
    const bool has_payload = d.restriction.kind() != Restriction::Kind::Whole;
    if (has_payload) sets.push_back(d.restriction.payload());
    Subdivision sd = barycentric_subdivide(*d.complex, sets, cap);
    if (has_payload) {
      d.restriction = push_restriction(*sd.complex, d.restriction, sd.pushed.back());
      sd.pushed.pop_back();
    }
    d.elements = std::move(sd.pushed);
    d.complex = std::move(sd.complex);
  }
  return d;
}

LabelProblem build_label_problem(const LevelData& level, int num_labels) {
  const SimplicialComplex& K = *level.complex;
  LabelProblem p;
  p.num_labels = num_labels;
  std::vector<int> admitted = level.restriction.admitted(K);
  std::vector<int> local(K.num_vertices(), -1);
  for (int id : admitted) {
    auto [b, e] = K.coboundary(id);
    bool maximal = true;
    for (auto it = b; it != e && maximal; ++it) maximal = !level.restriction.admits(*it);
    if (!maximal) continue;
    std::vector<int> c;
    for (int v : K.simplex(id)) {
      if (local[v] < 0) {
        local[v] = static_cast<int>(p.vertex.size());
        p.vertex.push_back(v);
      }
      c.push_back(local[v]);
    }
    p.constraints.push_back(std::move(c));
  }
  p.domain.resize(p.vertex.size());
  for (std::size_t i = 0; i < p.vertex.size(); ++i) {
    int vs = K.vertex_simplex(p.vertex[i]);
    for (int l = 0; l < num_labels; ++l) {
      if (level.elements[l].contains(vs)) p.domain[i].push_back(l);
    }
    if (p.domain[i].empty()) {
      throw UsageError("vertex " + std::to_string(p.vertex[i]) + " lies in no cover element; try a larger level");
    }
  }
  return p;
}

std::int64_t labeling_cost(const LabelProblem& p, const std::vector<int>& labels) {
  std::int64_t best = 0;
  for (const auto& c : p.constraints) {
    std::vector<int> ls;
    for (int v : c) ls.push_back(labels[v]);
    std::sort(ls.begin(), ls.end());
    best = std::max<std::int64_t>(best, std::unique(ls.begin(), ls.end()) - ls.begin());
  }
  return best - 1;
}

// --- search -----------------------------------------------------------------

namespace {

class Solver {
 public:
  enum class Outcome { Found, Infeasible, Limit };

  Solver(const LabelProblem& p, std::uint64_t node_limit) : p_(p), node_limit_(node_limit) {
    nv_ = static_cast<int>(p.domain.size());
    nc_ = static_cast<int>(p.constraints.size());
    cons_of_.assign(nv_, {});
    off_.assign(nc_ + 1, 0);
    for (int c = 0; c < nc_; ++c) {
      off_[c + 1] = off_[c] + static_cast<int>(p.constraints[c].size());
      for (int v : p.constraints[c]) cons_of_[v].push_back(c);
    }
    doff_.assign(nv_ + 1, 0);
    for (int v = 0; v < nv_; ++v) doff_[v + 1] = doff_[v] + static_cast<int>(p.domain[v].size());
    build_order();
  }

  int lower_bound() const {
    for (const auto& c : p_.constraints) {
      std::vector<int> common = p_.domain[c[0]];
      for (int v : c) {
        std::vector<int> next;
        std::set_intersection(common.begin(), common.end(), p_.domain[v].begin(), p_.domain[v].end(),
                              std::back_inserter(next));
        common = std::move(next);
      }
      if (common.empty()) return 2;
    }
    return 1;
  }

  std::vector<int> greedy() {
    reset(INT_MAX);
    int cur = 0;
    for (int u : order_) {
      int best_l = -1;
      std::tuple<int, int> best_key{INT_MAX, INT_MAX};
      for (int l : p_.domain[u]) {
        int mx = cur, fresh = 0;
        for (int c : cons_of_[u]) {
          int add = has(c, l) ? 0 : 1;
          fresh += add;
          mx = std::max(mx, distinct_[c] + add);
        }
        std::tuple<int, int> key{mx, fresh};
        if (key < best_key) {
          best_key = key;
          best_l = l;
        }
      }
      assign(u, best_l);
      cur = std::get<0>(best_key);
    }
    return label_;
  }

  /// Single-vertex relabeling on (max distinct, #constraints at max).
  std::vector<int> improve(std::vector<int> labels, std::uint64_t budget) {
    reset(INT_MAX);
    for (int u = 0; u < nv_; ++u) assign(u, labels[u]);
    hist_.assign(64, 0);
    for (int c = 0; c < nc_; ++c) bump(distinct_[c], 1);
    std::uint64_t moves = 0;
    bool improved = true;
    while (improved && moves < budget) {
      improved = false;
      for (int u : order_) {
        if (moves >= budget) break;
        const int cur = label_[u];
        auto base = objective();
        for (int l : p_.domain[u]) {
          if (l == cur) continue;
          ++moves;
          relabel(u, l);
          if (objective() < base) {
            improved = true;
            break;
          }
          relabel(u, cur);
        }
      }
    }
    return label_;
  }

  /// Is there a labeling with at most A distinct labels on every constraint?
  Outcome decide(int A, std::vector<int>& out) {
    reset(A);
    return dfs(out);
  }

  std::uint64_t nodes() const { return nodes_; }

 private:
  void build_order() {
    std::vector<std::vector<int>> adj(nv_);
    for (const auto& c : p_.constraints) {
      for (int a : c) {
        for (int b : c) {
          if (a != b) adj[a].push_back(b);
        }
      }
    }
    for (auto& a : adj) {
      std::sort(a.begin(), a.end());
      a.erase(std::unique(a.begin(), a.end()), a.end());
    }
    // maximum cardinality search, ties by degree then index
    std::vector<int> weight(nv_, 0);
    std::vector<char> done(nv_, 0);
    std::set<std::tuple<int, int, int>> q;
    for (int v = 0; v < nv_; ++v) q.emplace(0, -static_cast<int>(adj[v].size()), v);
    rank_.assign(nv_, 0);
    while (!q.empty()) {
      auto [w, nd, v] = *q.begin();
      q.erase(q.begin());
      done[v] = 1;
      rank_[v] = static_cast<int>(order_.size());
      order_.push_back(v);
      for (int x : adj[v]) {
        if (done[x]) continue;
        q.erase({-weight[x], -static_cast<int>(adj[x].size()), x});
        ++weight[x];
        q.emplace(-weight[x], -static_cast<int>(adj[x].size()), x);
      }
      (void)w;
      (void)nd;
    }
  }

  void reset(int A) {
    A_ = A;
    label_.assign(nv_, -1);
    distinct_.assign(nc_, 0);
    lab_.assign(off_[nc_], -1);
    ct_.assign(off_[nc_], 0);
    blk_.assign(doff_[nv_], 0);
    allowed_.assign(nv_, 0);
    for (int v = 0; v < nv_; ++v) allowed_[v] = static_cast<int>(p_.domain[v].size());
    dead_ = 0;
  }

  bool has(int c, int l) const {
    for (int j = off_[c]; j < off_[c] + distinct_[c]; ++j) {
      if (lab_[j] == l) return true;
    }
    return false;
  }

  int count(int c, int l) const {
    for (int j = off_[c]; j < off_[c] + distinct_[c]; ++j) {
      if (lab_[j] == l) return ct_[j];
    }
    return 0;
  }

  // returns true if l was new in c
  bool add(int c, int l) {
    for (int j = off_[c]; j < off_[c] + distinct_[c]; ++j) {
      if (lab_[j] == l) {
        ++ct_[j];
        return false;
      }
    }
    int j = off_[c] + distinct_[c]++;
    lab_[j] = l;
    ct_[j] = 1;
    return true;
  }

  void remove(int c, int l) {
    const int last = off_[c] + distinct_[c] - 1;
    for (int j = off_[c]; j <= last; ++j) {
      if (lab_[j] != l) continue;
      if (--ct_[j] == 0) {
        lab_[j] = lab_[last];
        ct_[j] = ct_[last];
        --distinct_[c];
      }
      return;
    }
  }

  void saturate(int c, int delta) {
    for (int u : p_.constraints[c]) {
      for (int k = 0; k < static_cast<int>(p_.domain[u].size()); ++k) {
        if (has(c, p_.domain[u][k])) continue;
        int& b = blk_[doff_[u] + k];
        if (delta > 0) {
          if (b++ == 0 && --allowed_[u] == 0 && label_[u] < 0) ++dead_;
        } else {
          if (--b == 0 && allowed_[u]++ == 0 && label_[u] < 0) --dead_;
        }
      }
    }
  }

  void assign(int u, int l) {
    label_[u] = l;
    for (int c : cons_of_[u]) {
      if (add(c, l) && distinct_[c] == A_) saturate(c, +1);
    }
  }

  void unassign(int u) {
    const int l = label_[u];
    for (auto it = cons_of_[u].rbegin(); it != cons_of_[u].rend(); ++it) {
      const int c = *it;
      if (distinct_[c] == A_ && count(c, l) == 1) saturate(c, -1);
      remove(c, l);
    }
    label_[u] = -1;
  }

  void bump(int d, int delta) {
    if (d >= static_cast<int>(hist_.size())) hist_.resize(d + 1, 0);
    hist_[d] += delta;
  }

  void relabel(int u, int l) {
    for (int c : cons_of_[u]) bump(distinct_[c], -1);
    const int old = label_[u];
    for (int c : cons_of_[u]) remove(c, old);
    label_[u] = l;
    for (int c : cons_of_[u]) add(c, l);
    for (int c : cons_of_[u]) bump(distinct_[c], 1);
  }

  std::pair<int, int> objective() const {
    for (int d = static_cast<int>(hist_.size()) - 1; d >= 0; --d) {
      if (hist_[d] > 0) return {d, hist_[d]};
    }
    return {0, 0};
  }

  Outcome dfs(std::vector<int>& out) {
    ++nodes_;
    if (node_limit_ != 0 && nodes_ > node_limit_) return Outcome::Limit;
    int u = -1;
    for (int v : order_) {
      if (label_[v] >= 0) continue;
      if (u < 0 || allowed_[v] < allowed_[u]) {
        u = v;
        if (allowed_[v] <= 1) break;
      }
    }
    if (u < 0) {
      out = label_;
      return Outcome::Found;
    }
    for (int k = 0; k < static_cast<int>(p_.domain[u].size()); ++k) {
      if (blk_[doff_[u] + k] != 0) continue;
      assign(u, p_.domain[u][k]);
      if (dead_ == 0) {
        Outcome r = dfs(out);
        if (r != Outcome::Infeasible) {
          unassign(u);
          return r;
        }
      }
      unassign(u);
    }
    return Outcome::Infeasible;
  }

  const LabelProblem& p_;
  std::uint64_t node_limit_;
  std::uint64_t nodes_ = 0;
  int nv_ = 0, nc_ = 0, A_ = 0, dead_ = 0;
  std::vector<std::vector<int>> cons_of_;
  std::vector<int> off_, doff_, order_, rank_;
  std::vector<int> label_, distinct_, lab_, ct_, blk_, allowed_;
  std::vector<int> hist_;
};

std::int64_t max_distinct(const LabelProblem& p, const std::vector<int>& labels) {
  return labeling_cost(p, labels) + 1;
}

std::vector<int> full_witness(const LevelData& level, const LabelProblem& p, const std::vector<int>& local_labels) {
  const SimplicialComplex& K = *level.complex;
  std::vector<int> w(K.num_vertices(), -1);
  for (std::size_t i = 0; i < p.vertex.size(); ++i) w[p.vertex[i]] = local_labels[i];
  for (int v = 0; v < K.num_vertices(); ++v) {
    if (w[v] >= 0) continue;
    for (std::size_t l = 0; l < level.elements.size(); ++l) {
      if (level.elements[l].contains(K.vertex_simplex(v))) {
        w[v] = static_cast<int>(l);
        break;
      }
    }
  }
  return w;
}

// Lebesgue covering bound: on the whole Kuhn cube [0,1]^d, if no element
// meets two opposite faces then every refining open cover has order >= d.
std::optional<int> lebesgue_bound(const Cover& alpha, const Restriction& Y) {
  const SimplicialComplex& K = alpha.complex();
  if (Y.kind() != Restriction::Kind::Whole || !K.grid()) return std::nullopt;
  const int d = K.ambient_dim(), m = *K.grid();
  if (K.top_dim() != d) return std::nullopt;
  std::int64_t verts = 1, facets = 1;
  for (int i = 1; i <= d; ++i) {
    verts *= m + 1;
    facets *= static_cast<std::int64_t>(i) * m;
  }
  if (K.num_vertices() != verts || static_cast<std::int64_t>(K.facets().size()) != facets) return std::nullopt;
  for (const auto& e : alpha.elements()) {
    for (int j = 0; j < d; ++j) {
      bool lo = false, hi = false;
      for (int id : e.ids()) {
        bool all0 = true, all1 = true;
        for (int v : K.simplex(id)) {
          all0 = all0 && K.point(v)[j] == Rational(0);
          all1 = all1 && K.point(v)[j] == Rational(1);
        }
        lo = lo || all0;
        hi = hi || all1;
      }
      if (lo && hi) return std::nullopt;
    }
  }
  return d;
}

}  // namespace

DimResult dee_hat(const Cover& alpha, const Restriction& Y, int L, const DimOptions& opts) {
  DimResult r;
  r.level = L;
  if (Y.is_empty() || Y.admitted(alpha.complex()).empty()) {
    r.level_complex = alpha.complex_ptr();
    for (const auto& e : alpha.elements()) r.level_elements.push_back(e.set());
    r.diagnostic = "empty restriction";
    return r;
  }
  LevelData level = prepare_level(alpha, Y, L, opts.cap);
  LabelProblem p = build_label_problem(level, alpha.size());
  r.level_complex = level.complex;
  r.level_elements = level.elements;
  r.level_restriction = level.restriction;

  Solver s(p, opts.node_limit);
  const int lb = s.lower_bound();  // in distinct-label units
  std::vector<int> best = s.greedy();
  int best_max = static_cast<int>(max_distinct(p, best));
  int proven = lb;
  if (auto leb = opts.lebesgue ? lebesgue_bound(alpha, Y) : std::nullopt; leb && *leb + 1 > proven) {
    proven = *leb + 1;
    r.diagnostic = "lebesgue bound " + std::to_string(*leb);
  }

  if (opts.mode == SearchMode::Heuristic) {
    std::uint64_t budget = opts.heuristic_budget ? opts.heuristic_budget : 10ULL * p.vertex.size();
    best = s.improve(best, budget);
    best_max = static_cast<int>(max_distinct(p, best));
  } else if (opts.cutoff && best_max - 1 > *opts.cutoff) {
    const int target = static_cast<int>(std::max<std::int64_t>(*opts.cutoff, -1)) + 1;
    std::vector<int> sol;
    ++r.stats.decisions;
    switch (target >= proven ? s.decide(target, sol) : Solver::Outcome::Infeasible) {
      case Solver::Outcome::Found:
        best = sol;
        best_max = static_cast<int>(max_distinct(p, best));
        break;
      case Solver::Outcome::Infeasible:
        proven = std::max(proven, target + 1);
        break;
      case Solver::Outcome::Limit:
        r.diagnostic = "node limit reached";
        break;
    }
  } else if (!opts.cutoff) {
    while (best_max > proven) {
      std::vector<int> sol;
      ++r.stats.decisions;
      auto outcome = s.decide(best_max - 1, sol);
      if (outcome == Solver::Outcome::Found) {
        best = sol;
        best_max = static_cast<int>(max_distinct(p, best));
      } else if (outcome == Solver::Outcome::Infeasible) {
        proven = best_max;
      } else {
        r.diagnostic = "node limit reached";
        break;
      }
    }
  }
  r.stats.nodes = s.nodes();
  r.value = ExtInt(best_max - 1);
  r.lower_bound = ExtInt(std::min(proven, best_max) - 1);
  r.exact = r.value == r.lower_bound;
  r.witness = full_witness(level, p, best);
  return r;
}

std::vector<DimResult> dee_hat_best(const Cover& alpha, const Restriction& Y, int L_max, const DimOptions& opts) {
  if (L_max < 0) throw UsageError("L_max must be >= 0");
  std::vector<DimResult> out;
  for (int L = 0; L <= L_max; ++L) out.push_back(dee_hat(alpha, Y, L, opts));
  return out;
}

Cover induced_cover(const ComplexPtr& K, const std::vector<int>& labels, int num_labels) {
  std::vector<std::vector<int>> members(num_labels);
  for (int id = 0; id < K->num_simplices(); ++id) {
    std::vector<int> ls;
    for (int v : K->simplex(id)) ls.push_back(labels[v]);
    std::sort(ls.begin(), ls.end());
    ls.erase(std::unique(ls.begin(), ls.end()), ls.end());
    for (int l : ls) members[l].push_back(id);
  }
  std::vector<OpenSimplexSet> elems;
  for (auto& m : members) elems.emplace_back(*K, SimplexSet(K->num_simplices(), std::move(m)));
  return Cover(K, std::move(elems), true);
}

ExtInt witness_order(const DimResult& r, int num_labels) {
  if (!r.witness) return ExtInt::neg_inf();
  return ord(induced_cover(r.level_complex, *r.witness, num_labels), r.level_restriction);
}

bool witness_admissible(const DimResult& r) {
  if (!r.witness) return true;
  const auto& K = *r.level_complex;
  for (int v = 0; v < K.num_vertices(); ++v) {
    int l = (*r.witness)[v];
    if (l < 0 || l >= static_cast<int>(r.level_elements.size())) return false;
    if (!r.level_elements[l].contains(K.vertex_simplex(v))) return false;
  }
  return true;
}

// --- inequality suite -------------------------------------------------------

bool InequalityReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const InequalityCheck& c) { return c.pass; });
}

namespace {

InequalityCheck leq(const std::string& name, const ExtInt& a, const ExtInt& b) {
  InequalityCheck c;
  c.name = name;
  c.lhs = a.to_string();
  c.rhs = b.to_string();
  c.pass = a <= b;
  return c;
}

ExtInt plus(const ExtInt& a, const ExtInt& b) {
  if (a.is_neg_inf() || b.is_neg_inf()) return ExtInt::neg_inf();
  return ExtInt(a.value() + b.value());
}

}  // namespace

InequalityReport verify_inequalities(const Cover& alpha, const Cover& beta, int L, const InequalityExtras& extras,
                                     const DimOptions& opts) {
  if (!(alpha.complex() == beta.complex())) throw UsageError("covers live on different complexes");
  InequalityReport rep;
  const Restriction Y = Restriction::whole();
  DimOptions exact = opts;
  exact.mode = SearchMode::Exact;
  exact.cutoff.reset();

  const ExtInt da = dee_hat(alpha, Y, L, exact).value;
  const ExtInt db = dee_hat(beta, Y, L, exact).value;
  rep.checks.push_back(leq("dhat_le_ord(alpha)", da, ord(alpha, Y)));
  rep.checks.push_back(leq("dhat_le_ord(beta)", db, ord(beta, Y)));

  const Cover ab = join(alpha, beta);
  const ExtInt dab = dee_hat(ab, Y, L, exact).value;
  auto mono = leq("refinement_monotonicity(join,alpha)", da, dab);
  mono.detail = refines(ab, alpha) ? "join refines alpha" : "join does not refine alpha";
  mono.pass = mono.pass && refines(ab, alpha);
  rep.checks.push_back(mono);
  auto mono_b = leq("refinement_monotonicity(join,beta)", db, dab);
  mono_b.pass = mono_b.pass && refines(ab, beta);
  rep.checks.push_back(mono_b);
  if (refines(beta, alpha)) rep.checks.push_back(leq("refinement_monotonicity(beta,alpha)", da, db));
  if (refines(alpha, beta)) rep.checks.push_back(leq("refinement_monotonicity(alpha,beta)", db, da));

  const ExtInt dab1 = dee_hat(ab, Y, L + 1, exact).value;
  rep.checks.push_back(leq("shifted_subadditivity", dab1, plus(da, db)));

  if (extras.product_factor) {
    const BoxCover& a = *extras.product_factor;
    if (a.dim() != 1) throw UsageError("product bound is checked for interval covers");
    const int M = extras.product_grid ? extras.product_grid : a.resolution();
    const int n = extras.product_n;
    auto line = std::make_shared<SimplicialComplex>(build_triangulated_cube(1, M, exact.cap));
    auto cube = std::make_shared<SimplicialComplex>(build_triangulated_cube(n, M, exact.cap));
    const ExtInt d1 = dee_hat(a.to_cover(line), Y, 0, exact).value;
    const ExtInt dn = dee_hat(product_cover(a, n).to_cover(cube), Y, 0, exact).value;
    auto c = leq("product_bound(n=" + std::to_string(n) + ")", dn,
                 d1.is_neg_inf() ? d1 : ExtInt(static_cast<std::int64_t>(n) * d1.value()));
    rep.checks.push_back(c);
  }

  if (extras.map && extras.target_cover) {
    const SimplicialMap& f = *extras.map;
    if (!f.is_surjective()) throw UsageError("pullback bound needs a surjective map");
    const ExtInt dg = dee_hat(*extras.target_cover, Y, L, exact).value;
    const ExtInt dpull = dee_hat(f.pullback(*extras.target_cover), Y, L, exact).value;
    rep.checks.push_back(leq("pullback_bound", dpull, dg));
  }
  return rep;
}

}  // namespace mdim
