#include "mdim/complex.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <unordered_set>

#include "mdim/errors.hpp"

namespace mdim {

namespace {

bool canonical_less(const Simplex& a, const Simplex& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

std::size_t factorial(int k) {
  std::size_t f = 1;
  for (int i = 2; i <= k; ++i) f *= static_cast<std::size_t>(i);
  return f;
}

// Solves p = sum lambda_i v_i, sum lambda_i = 1 for an affinely independent
// vertex list; nullopt when p is not in the affine hull.
std::optional<std::vector<Rational>> barycentric(const std::vector<const Point*>& verts, const Point& p) {
  const int k = static_cast<int>(verts.size());
  const int rows = static_cast<int>(p.size()) + 1;
  std::vector<std::vector<Rational>> a(rows, std::vector<Rational>(k + 1));
  for (int j = 0; j < k; ++j) {
    for (int r = 0; r + 1 < rows; ++r) a[r][j] = (*verts[j])[r];
    a[rows - 1][j] = Rational(1);
  }
  for (int r = 0; r + 1 < rows; ++r) a[r][k] = p[r];
  a[rows - 1][k] = Rational(1);

  int row = 0;
  std::vector<int> pivot_col;
  for (int c = 0; c < k && row < rows; ++c) {
    int piv = -1;
    for (int r = row; r < rows; ++r) {
      if (a[r][c] != Rational(0)) {
        piv = r;
        break;
      }
    }
    if (piv < 0) continue;
    std::swap(a[piv], a[row]);
    Rational inv = Rational(1) / a[row][c];
    for (int j = c; j <= k; ++j) a[row][j] *= inv;
    for (int r = 0; r < rows; ++r) {
      if (r == row || a[r][c] == Rational(0)) continue;
      Rational f = a[r][c];
      for (int j = c; j <= k; ++j) a[r][j] -= f * a[row][j];
    }
    pivot_col.push_back(c);
    ++row;
  }
  for (int r = row; r < rows; ++r) {
    if (a[r][k] != Rational(0)) return std::nullopt;
  }
  if (static_cast<int>(pivot_col.size()) != k) return std::nullopt;  // degenerate simplex
  std::vector<Rational> lambda(k);
  for (int r = 0; r < k; ++r) lambda[pivot_col[r]] = a[r][k];
  return lambda;
}

}  // namespace

SimplicialComplex::SimplicialComplex(int ambient_dim, std::vector<Point> vertices,
                                     const std::vector<Simplex>& generators, std::size_t cap, bool already_closed)
    : ambient_dim_(ambient_dim), points_(std::move(vertices)) {
  const int nv = static_cast<int>(points_.size());
  for (const auto& p : points_) {
    if (static_cast<int>(p.size()) != ambient_dim_) throw UsageError("vertex coordinate dimension mismatch");
  }
  auto check = [&](const Simplex& s) {
    if (s.empty()) throw UsageError("empty simplex");
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] < 0 || s[i] >= nv) throw UsageError("simplex vertex out of range");
      if (i > 0 && s[i] <= s[i - 1]) throw UsageError("simplex vertices must be sorted and distinct");
    }
  };

  if (already_closed) {
    simplices_ = generators;
    for (const auto& s : simplices_) check(s);
    if (simplices_.size() > cap) throw CapError("simplex cap exceeded: " + std::to_string(simplices_.size()));
  } else {
    std::unordered_set<Simplex, SimplexHash> all;
    for (Simplex g : generators) {
      std::sort(g.begin(), g.end());
      check(g);
      if (g.size() > 20) throw CapError("simplex dimension too large");
      const std::uint32_t full = (1u << g.size()) - 1;
      for (std::uint32_t mask = 1; mask <= full; ++mask) {
        Simplex f;
        for (std::size_t i = 0; i < g.size(); ++i) {
          if (mask & (1u << i)) f.push_back(g[i]);
        }
        all.insert(std::move(f));
        if (all.size() > cap) throw CapError("simplex cap exceeded: more than " + std::to_string(cap));
      }
    }
    simplices_.assign(all.begin(), all.end());
  }
  std::sort(simplices_.begin(), simplices_.end(), canonical_less);

  index_.reserve(simplices_.size() * 2);
  vertex_simplex_.assign(nv, -1);
  star_.assign(nv, {});
  for (int id = 0; id < num_simplices(); ++id) {
    const Simplex& s = simplices_[id];
    if (!index_.emplace(s, id).second) throw UsageError("duplicate simplex");
    if (s.size() == 1) vertex_simplex_[s[0]] = id;
    for (int v : s) star_[v].push_back(id);
    top_dim_ = std::max(top_dim_, static_cast<int>(s.size()) - 1);
  }
  for (int v = 0; v < nv; ++v) {
    if (vertex_simplex_[v] < 0) throw UsageError("vertex " + std::to_string(v) + " lies in no simplex");
  }

  const int n = num_simplices();
  bnd_off_.assign(n + 1, 0);
  for (int id = 0; id < n; ++id) {
    const Simplex& s = simplices_[id];
    bnd_off_[id + 1] = bnd_off_[id] + (s.size() > 1 ? static_cast<int>(s.size()) : 0);
  }
  bnd_.resize(bnd_off_[n]);
  std::vector<int> cob_count(n, 0);
  for (int id = 0; id < n; ++id) {
    const Simplex& s = simplices_[id];
    if (s.size() < 2) continue;
    int w = bnd_off_[id];
    Simplex f(s.size() - 1);
    for (std::size_t skip = 0; skip < s.size(); ++skip) {
      for (std::size_t i = 0, j = 0; i < s.size(); ++i) {
        if (i != skip) f[j++] = s[i];
      }
      auto it = index_.find(f);
      if (it == index_.end()) throw UsageError("simplex family is not closed under faces");
      bnd_[w++] = it->second;
      ++cob_count[it->second];
    }
    std::sort(bnd_.begin() + bnd_off_[id], bnd_.begin() + bnd_off_[id + 1]);
  }
  cobnd_off_.assign(n + 1, 0);
  for (int id = 0; id < n; ++id) cobnd_off_[id + 1] = cobnd_off_[id] + cob_count[id];
  cobnd_.resize(cobnd_off_[n]);
  std::vector<int> fill(cobnd_off_.begin(), cobnd_off_.end() - 1);
  for (int id = 0; id < n; ++id) {
    for (int k = bnd_off_[id]; k < bnd_off_[id + 1]; ++k) cobnd_[fill[bnd_[k]]++] = id;
  }
  for (int id = 0; id < n; ++id) {
    if (cob_count[id] == 0) facets_.push_back(id);
  }
}

std::optional<int> SimplicialComplex::find(const Simplex& s) const {
  auto it = index_.find(s);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

int SimplicialComplex::id_of(const Simplex& s) const {
  auto r = find(s);
  if (!r) throw UsageError("simplex not in complex");
  return *r;
}

std::vector<int> SimplicialComplex::cofaces(int id) const {
  const Simplex& s = simplices_[id];
  int best = s[0];
  for (int v : s) {
    if (star_[v].size() < star_[best].size()) best = v;
  }
  std::vector<int> out;
  for (int t : star_[best]) {
    const Simplex& ts = simplices_[t];
    if (std::includes(ts.begin(), ts.end(), s.begin(), s.end())) out.push_back(t);
  }
  return out;
}

std::vector<int> SimplicialComplex::faces(int id) const {
  const Simplex& s = simplices_[id];
  std::vector<int> out;
  const std::uint32_t full = (1u << s.size()) - 1;
  for (std::uint32_t mask = 1; mask <= full; ++mask) {
    Simplex f;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (mask & (1u << i)) f.push_back(s[i]);
    }
    out.push_back(index_.at(f));
  }
  std::sort(out.begin(), out.end());
  return out;
}

Point SimplicialComplex::barycenter(int id) const {
  const Simplex& s = simplices_[id];
  Point c(ambient_dim_, Rational(0));
  for (int v : s) {
    for (int i = 0; i < ambient_dim_; ++i) c[i] += points_[v][i];
  }
  for (auto& x : c) x /= Rational(static_cast<std::int64_t>(s.size()));
  return c;
}

std::optional<int> SimplicialComplex::carrier(const Point& p) const {
  if (static_cast<int>(p.size()) != ambient_dim_) throw UsageError("point dimension mismatch");
  for (int f : facets_) {
    const Simplex& s = simplices_[f];
    std::vector<const Point*> verts;
    for (int v : s) verts.push_back(&points_[v]);
    auto lambda = barycentric(verts, p);
    if (!lambda) continue;
    bool inside = std::all_of(lambda->begin(), lambda->end(), [](const Rational& l) { return l >= Rational(0); });
    if (!inside) continue;
    Simplex c;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if ((*lambda)[i] > Rational(0)) c.push_back(s[i]);
    }
    return id_of(c);
  }
  return std::nullopt;
}

// --- SimplexSet ------------------------------------------------------------

SimplexSet::SimplexSet(std::size_t universe, std::vector<int> ids) : ids_(std::move(ids)), mask_(universe, 0) {
  std::sort(ids_.begin(), ids_.end());
  ids_.erase(std::unique(ids_.begin(), ids_.end()), ids_.end());
  for (int id : ids_) {
    if (id < 0 || static_cast<std::size_t>(id) >= universe) throw UsageError("simplex id out of range");
    mask_[id] = 1;
  }
}

SimplexSet SimplexSet::all(std::size_t universe) {
  std::vector<int> ids(universe);
  std::iota(ids.begin(), ids.end(), 0);
  return SimplexSet(universe, std::move(ids));
}

bool SimplexSet::subset_of(const SimplexSet& o) const {
  for (int id : ids_) {
    if (!o.contains(id)) return false;
  }
  return true;
}

SimplexSet SimplexSet::intersect(const SimplexSet& o) const {
  std::vector<int> out;
  for (int id : ids_) {
    if (o.contains(id)) out.push_back(id);
  }
  return SimplexSet(universe(), std::move(out));
}

SimplexSet SimplexSet::unite(const SimplexSet& o) const {
  std::vector<int> out;
  std::set_union(ids_.begin(), ids_.end(), o.ids_.begin(), o.ids_.end(), std::back_inserter(out));
  return SimplexSet(std::max(universe(), o.universe()), std::move(out));
}

SimplexSet SimplexSet::minus(const SimplexSet& o) const {
  std::vector<int> out;
  for (int id : ids_) {
    if (!o.contains(id)) out.push_back(id);
  }
  return SimplexSet(universe(), std::move(out));
}

bool is_upward_closed(const SimplicialComplex& K, const SimplexSet& s) {
  for (int id : s.ids()) {
    auto [b, e] = K.coboundary(id);
    for (auto it = b; it != e; ++it) {
      if (!s.contains(*it)) return false;
    }
  }
  return true;
}

bool is_downward_closed(const SimplicialComplex& K, const SimplexSet& s) {
  for (int id : s.ids()) {
    auto [b, e] = K.boundary(id);
    for (auto it = b; it != e; ++it) {
      if (!s.contains(*it)) return false;
    }
  }
  return true;
}

SimplexSet upward_closure(const SimplicialComplex& K, const SimplexSet& s) {
  const int n = K.num_simplices();
  std::vector<char> in(n, 0);
  for (int id : s.ids()) in[id] = 1;
  for (int id = 0; id < n; ++id) {
    if (in[id]) continue;
    auto [b, e] = K.boundary(id);
    for (auto it = b; it != e; ++it) {
      if (in[*it]) {
        in[id] = 1;
        break;
      }
    }
  }
  std::vector<int> ids;
  for (int id = 0; id < n; ++id) {
    if (in[id]) ids.push_back(id);
  }
  return SimplexSet(n, std::move(ids));
}

SimplexSet downward_closure(const SimplicialComplex& K, const SimplexSet& s) {
  const int n = K.num_simplices();
  std::vector<char> in(n, 0);
  for (int id : s.ids()) in[id] = 1;
  for (int id = n - 1; id >= 0; --id) {
    if (!in[id]) continue;
    auto [b, e] = K.boundary(id);
    for (auto it = b; it != e; ++it) in[*it] = 1;
  }
  std::vector<int> ids;
  for (int id = 0; id < n; ++id) {
    if (in[id]) ids.push_back(id);
  }
  return SimplexSet(n, std::move(ids));
}

SimplexSet closure_of(const SimplicialComplex& K, const SimplexSet& open) { return downward_closure(K, open); }

std::vector<int> vertices_of(const SimplicialComplex& K, const SimplexSet& s) {
  std::vector<char> seen(K.num_vertices(), 0);
  for (int id : s.ids()) {
    for (int v : K.simplex(id)) seen[v] = 1;
  }
  std::vector<int> out;
  for (int v = 0; v < K.num_vertices(); ++v) {
    if (seen[v]) out.push_back(v);
  }
  return out;
}

// --- OpenSimplexSet / Restriction ------------------------------------------

OpenSimplexSet::OpenSimplexSet(const SimplicialComplex& K, SimplexSet s) : set_(std::move(s)) {
  if (set_.universe() != static_cast<std::size_t>(K.num_simplices())) throw UsageError("open set over another complex");
  if (!is_upward_closed(K, set_)) throw UsageError("simplex set is not upward closed");
}

OpenSimplexSet OpenSimplexSet::whole(const SimplicialComplex& K) {
  return OpenSimplexSet(SimplexSet::all(K.num_simplices()));
}

OpenSimplexSet OpenSimplexSet::star(const SimplicialComplex& K, const std::vector<int>& vertices) {
  std::vector<int> ids;
  for (int v : vertices) {
    if (v < 0 || v >= K.num_vertices()) throw UsageError("star vertex out of range");
    ids.insert(ids.end(), K.star(v).begin(), K.star(v).end());
  }
  return OpenSimplexSet(SimplexSet(K.num_simplices(), std::move(ids)));
}

OpenSimplexSet OpenSimplexSet::generated(const SimplicialComplex& K, const SimplexSet& s) {
  return OpenSimplexSet(upward_closure(K, s));
}

Restriction Restriction::closed(const SimplicialComplex& K, SimplexSet s) {
  if (s.universe() != static_cast<std::size_t>(K.num_simplices())) throw UsageError("restriction over another complex");
  if (!is_downward_closed(K, s)) throw UsageError("closed restriction payload is not downward closed");
  if (s.empty()) return empty();
  return Restriction(Kind::Closed, std::move(s));
}

Restriction Restriction::open(const SimplicialComplex& K, SimplexSet s) {
  if (s.universe() != static_cast<std::size_t>(K.num_simplices())) throw UsageError("restriction over another complex");
  if (!is_upward_closed(K, s)) throw UsageError("open restriction payload is not upward closed");
  if (s.empty()) return empty();
  return Restriction(Kind::Open, std::move(s));
}

bool Restriction::admits(int id) const {
  switch (kind_) {
    case Kind::Whole:
      return true;
    case Kind::Empty:
      return false;
    default:
      return payload_.contains(id);
  }
}

std::vector<int> Restriction::admitted(const SimplicialComplex& K) const {
  switch (kind_) {
    case Kind::Whole: {
      std::vector<int> ids(K.num_simplices());
      std::iota(ids.begin(), ids.end(), 0);
      return ids;
    }
    case Kind::Empty:
      return {};
    default:
      if (payload_.universe() != static_cast<std::size_t>(K.num_simplices())) {
        throw UsageError("restriction does not match complex");
      }
      return payload_.ids();
  }
}

const char* to_string(Restriction::Kind k) {
  switch (k) {
    case Restriction::Kind::Whole:
      return "whole";
    case Restriction::Kind::Closed:
      return "closed";
    case Restriction::Kind::Open:
      return "open";
    case Restriction::Kind::Empty:
      return "empty";
  }
  return "?";
}

// --- Cover -----------------------------------------------------------------

Cover::Cover(ComplexPtr K, std::vector<OpenSimplexSet> elements, bool drop_empty) : complex_(std::move(K)) {
  if (!complex_) throw UsageError("cover without complex");
  const std::size_t n = complex_->num_simplices();
  if (elements.empty()) throw UsageError("cover has no elements");
  for (std::size_t i = 0; i < elements.size(); ++i) {
    const auto& e = elements[i];
    if (e.set().universe() != n) throw UsageError("cover element over another complex");
    if (e.empty()) {
      if (drop_empty) continue;
      throw UsageError("cover element " + std::to_string(i) + " is empty");
    }
    bool dup = false;
    for (const auto& kept : elements_) {
      if (kept == e) {
        dup = true;
        break;
      }
    }
    if (dup) continue;
    elements_.push_back(e);
    origin_.push_back(static_cast<int>(i));
  }
  if (elements_.empty()) throw UsageError("cover has no nonempty elements");
  std::vector<char> covered(n, 0);
  for (const auto& e : elements_) {
    for (int id : e.ids()) covered[id] = 1;
  }
  for (std::size_t id = 0; id < n; ++id) {
    if (!covered[id]) throw UsageError("elements do not cover simplex " + std::to_string(id));
  }
}

int Cover::multiplicity(int id) const {
  int c = 0;
  for (const auto& e : elements_) c += e.contains(id) ? 1 : 0;
  return c;
}

ExtInt ord(const Cover& alpha, const Restriction& Y) {
  if (Y.is_empty()) return ExtInt::neg_inf();
  const auto ids = Y.admitted(alpha.complex());
  if (ids.empty()) return ExtInt::neg_inf();
  int best = 0;
  for (int id : ids) best = std::max(best, alpha.multiplicity(id));
  return ExtInt(best - 1);
}

Cover join(const Cover& alpha, const Cover& beta) {
  if (alpha.complex_ptr() != beta.complex_ptr() && !(alpha.complex() == beta.complex())) {
    throw UsageError("join of covers over different complexes");
  }
  std::vector<OpenSimplexSet> out;
  for (const auto& a : alpha.elements()) {
    for (const auto& b : beta.elements()) {
      SimplexSet s = a.set().intersect(b.set());
      if (!s.empty()) out.emplace_back(alpha.complex(), std::move(s));
    }
  }
  return Cover(alpha.complex_ptr(), std::move(out));
}

bool refines(const Cover& beta, const Cover& alpha) {
  for (const auto& b : beta.elements()) {
    bool inside = false;
    for (const auto& a : alpha.elements()) {
      if (b.set().subset_of(a.set())) {
        inside = true;
        break;
      }
    }
    if (!inside) return false;
  }
  return true;
}

// --- subdivision -----------------------------------------------------------

Subdivision barycentric_subdivide(const SimplicialComplex& K, const std::vector<SimplexSet>& sets, std::size_t cap) {
  const int n = K.num_simplices();
  for (const auto& s : sets) {
    if (s.universe() != static_cast<std::size_t>(n)) throw UsageError("pushed set over another complex");
  }
  // number of chains with a given top
  std::vector<std::size_t> count(n, 1);
  std::size_t total = 0;
  for (int id = 0; id < n; ++id) {
    for (int f : K.faces(id)) {
      if (f != id) count[id] += count[f];
    }
    total += count[id];
    if (total > cap) throw CapError("subdivision exceeds simplex cap " + std::to_string(cap));
  }
  std::vector<std::vector<Simplex>> ending(n);
  for (int id = 0; id < n; ++id) {
    ending[id].push_back({id});
    for (int f : K.faces(id)) {
      if (f == id) continue;
      for (const auto& c : ending[f]) {
        Simplex ext = c;
        ext.push_back(id);
        ending[id].push_back(std::move(ext));
      }
    }
  }
  std::vector<Simplex> chains;
  chains.reserve(total);
  for (auto& e : ending) {
    for (auto& c : e) chains.push_back(std::move(c));
    e.clear();
    e.shrink_to_fit();
  }
  std::vector<Point> pts;
  pts.reserve(n);
  for (int id = 0; id < n; ++id) pts.push_back(K.barycenter(id));
  auto sd = std::make_shared<SimplicialComplex>(K.ambient_dim(), std::move(pts), chains, cap, true);

  Subdivision out;
  for (const auto& s : sets) {
    std::vector<int> ids;
    for (int c = 0; c < sd->num_simplices(); ++c) {
      if (s.contains(sd->simplex(c).back())) ids.push_back(c);
    }
    out.pushed.emplace_back(sd->num_simplices(), std::move(ids));
  }
  out.complex = std::move(sd);
  return out;
}

Restriction push_restriction(const SimplicialComplex& Sd, const Restriction& Y, const SimplexSet& pushed_payload) {
  switch (Y.kind()) {
    case Restriction::Kind::Whole:
      return Restriction::whole();
    case Restriction::Kind::Empty:
      return Restriction::empty();
    case Restriction::Kind::Closed:
      return Restriction::closed(Sd, pushed_payload);
    case Restriction::Kind::Open:
      return Restriction::open(Sd, pushed_payload);
  }
  return Restriction::empty();
}

// --- Kuhn builders -----------------------------------------------------------

namespace {

SimplicialComplex from_grid_simplices(int d, int m, const std::vector<std::vector<std::vector<int>>>& gsimplices,
                                      std::size_t cap, bool closed) {
  std::map<std::vector<int>, int> ids;
  for (const auto& s : gsimplices) {
    for (const auto& p : s) ids.emplace(p, 0);
  }
  std::vector<Point> pts;
  pts.reserve(ids.size());
  int next = 0;
  for (auto& [p, id] : ids) {
    id = next++;
    Point q;
    for (int c : p) q.emplace_back(c, m);
    pts.push_back(std::move(q));
  }
  std::vector<Simplex> simplices;
  simplices.reserve(gsimplices.size());
  for (const auto& s : gsimplices) {
    Simplex t;
    for (const auto& p : s) t.push_back(ids.at(p));
    std::sort(t.begin(), t.end());
    simplices.push_back(std::move(t));
  }
  SimplicialComplex K(d, std::move(pts), simplices, cap, closed);
  K.set_grid(m);
  return K;
}

}  // namespace

SimplicialComplex build_triangulated_cube(int d, int m, std::size_t cap) {
  if (d < 1 || m < 1) throw UsageError("cube needs d >= 1 and m >= 1");
  double tops = static_cast<double>(factorial(std::min(d, 20)));
  for (int i = 0; i < d; ++i) tops *= m;
  if (tops > static_cast<double>(cap)) {
    throw CapError("d!*m^d = " + std::to_string(static_cast<long double>(tops)) + " exceeds cap");
  }
  GridBox box(d, {0, m});
  return kuhn_box_union(d, m, {box}, cap);
}

SimplicialComplex kuhn_box_union(int d, int m, const std::vector<GridBox>& boxes, std::size_t cap) {
  if (d < 1 || m < 1) throw UsageError("grid needs d >= 1 and m >= 1");
  if (boxes.empty()) throw UsageError("box union needs at least one box");
  double estimate = 0;
  for (const auto& b : boxes) {
    if (static_cast<int>(b.size()) != d) throw UsageError("box dimension mismatch");
    double cells = 1;
    int free = 0;
    for (auto [lo, hi] : b) {
      if (lo < 0 || hi > m || lo > hi) throw UsageError("box outside the grid");
      if (hi > lo) {
        cells *= hi - lo;
        ++free;
      }
    }
    estimate += cells * static_cast<double>(factorial(free));
  }
  if (estimate > static_cast<double>(cap)) throw CapError("box union exceeds simplex cap");

  std::vector<std::vector<std::vector<int>>> tops;
  for (const auto& b : boxes) {
    std::vector<int> free_dims;
    for (int i = 0; i < d; ++i) {
      if (b[i].second > b[i].first) free_dims.push_back(i);
    }
    std::vector<int> cell(d);
    for (int i = 0; i < d; ++i) cell[i] = b[i].first;
    while (true) {
      std::vector<int> perm = free_dims;
      do {
        std::vector<std::vector<int>> s;
        std::vector<int> p = cell;
        s.push_back(p);
        for (int k : perm) {
          ++p[k];
          s.push_back(p);
        }
        tops.push_back(std::move(s));
      } while (std::next_permutation(perm.begin(), perm.end()));
      // odometer over the free dimensions
      std::size_t k = 0;
      for (; k < free_dims.size(); ++k) {
        int dim = free_dims[k];
        if (++cell[dim] < b[dim].second) break;
        cell[dim] = b[dim].first;
      }
      if (k == free_dims.size()) break;
    }
  }
  return from_grid_simplices(d, m, tops, cap, false);
}

SimplicialComplex kuhn_spanned(int d, int m, const std::vector<std::vector<int>>& grid_points, std::size_t cap) {
  if (d < 1 || m < 1) throw UsageError("grid needs d >= 1 and m >= 1");
  if (d > 24) throw CapError("dimension too large for spanned builder");
  std::set<std::vector<int>> P;
  for (const auto& p : grid_points) {
    if (static_cast<int>(p.size()) != d) throw UsageError("grid point dimension mismatch");
    for (int c : p) {
      if (c < 0 || c > m) throw UsageError("grid point outside the grid");
    }
    P.insert(p);
  }
  if (P.empty()) throw UsageError("spanned complex needs at least one point");

  std::vector<std::vector<std::vector<int>>> chains;
  const std::uint32_t all = (1u << d) - 1;
  std::vector<std::vector<int>> chain;
  std::function<void(std::uint32_t)> extend = [&](std::uint32_t used) {
    chains.push_back(chain);
    if (chains.size() > cap) throw CapError("spanned complex exceeds simplex cap");
    const std::uint32_t rest = all & ~used;
    for (std::uint32_t sub = rest; sub != 0; sub = (sub - 1) & rest) {
      std::vector<int> next = chain.back();
      bool ok = true;
      for (int i = 0; i < d && ok; ++i) {
        if (sub & (1u << i)) ok = ++next[i] <= m;
      }
      if (!ok || !P.count(next)) continue;
      chain.push_back(std::move(next));
      extend(used | sub);
      chain.pop_back();
    }
  };
  for (const auto& p : P) {
    chain = {p};
    extend(0);
  }
  return from_grid_simplices(d, m, chains, cap, true);
}

std::vector<int> grid_coords(const SimplicialComplex& K, int v) {
  if (!K.grid()) throw UsageError("complex has no grid");
  const int m = *K.grid();
  std::vector<int> out;
  for (const auto& x : K.point(v)) {
    Rational g = x * Rational(m);
    if (!g.is_integer()) throw UsageError("vertex not on the grid");
    out.push_back(static_cast<int>(g.num()));
  }
  return out;
}

// --- SimplicialMap ---------------------------------------------------------

SimplicialMap::SimplicialMap(ComplexPtr source, ComplexPtr target, std::vector<int> vertex_map)
    : source_(std::move(source)), target_(std::move(target)), vmap_(std::move(vertex_map)) {
  if (!source_ || !target_) throw UsageError("simplicial map needs both complexes");
  if (static_cast<int>(vmap_.size()) != source_->num_vertices()) throw UsageError("vertex map size mismatch");
  for (int v : vmap_) {
    if (v < 0 || v >= target_->num_vertices()) throw UsageError("vertex image out of range");
  }
  image_.resize(source_->num_simplices());
  for (int id = 0; id < source_->num_simplices(); ++id) {
    Simplex img;
    for (int v : source_->simplex(id)) img.push_back(vmap_[v]);
    std::sort(img.begin(), img.end());
    img.erase(std::unique(img.begin(), img.end()), img.end());
    auto t = target_->find(img);
    if (!t) throw UsageError("vertex map does not send simplex " + std::to_string(id) + " to a simplex");
    image_[id] = *t;
  }
}

bool SimplicialMap::is_surjective() const {
  std::vector<char> hit(target_->num_simplices(), 0);
  for (int t : image_) hit[t] = 1;
  return std::all_of(hit.begin(), hit.end(), [](char c) { return c != 0; });
}

SimplexSet SimplicialMap::pullback(const SimplexSet& s) const {
  if (s.universe() != static_cast<std::size_t>(target_->num_simplices())) throw UsageError("set over another complex");
  std::vector<int> ids;
  for (int id = 0; id < source_->num_simplices(); ++id) {
    if (s.contains(image_[id])) ids.push_back(id);
  }
  return SimplexSet(source_->num_simplices(), std::move(ids));
}

Cover SimplicialMap::pullback(const Cover& c) const {
  std::vector<OpenSimplexSet> out;
  for (const auto& e : c.elements()) {
    SimplexSet p = pullback(e.set());
    if (!p.empty()) out.emplace_back(*source_, std::move(p));
  }
  return Cover(source_, std::move(out));
}

}  // namespace mdim
