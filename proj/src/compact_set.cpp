#include "mdim/compact_set.hpp"

#include <algorithm>
#include <map>
#include <tuple>

#include "mdim/errors.hpp"

namespace mdim {

struct CompactSet::Node {
  Kind kind = Kind::Finite;
  std::vector<Rational> points;
  Rational limit, ratio, offset;
  Rational a, b;
  std::vector<CompactSet> children;
};

namespace {

bool in_unit(const Rational& t) { return Rational(0) <= t && t <= Rational(1); }

Interval affine_image(const Interval& iv, const Rational& a, const Rational& b) {
  Interval out{a * iv.lo + b, a * iv.hi + b, iv.lo_closed, iv.hi_closed};
  if (a < Rational(0)) {
    std::swap(out.lo, out.hi);
    std::swap(out.lo_closed, out.hi_closed);
  }
  return out;
}

bool interval_empty(const Interval& iv) {
  return iv.hi < iv.lo || (iv.hi == iv.lo && !(iv.lo_closed && iv.hi_closed));
}

void sort_gaps(std::vector<Interval>& g) {
  std::sort(g.begin(), g.end(), [](const Interval& x, const Interval& y) {
    if (x.length() != y.length()) return x.length() > y.length();
    return x.lo < y.lo;
  });
}

// Does the middle-thirds set inside [u,v] (u,v in it, length v-u) meet iv?
bool cantor_meets(const Rational& u, const Rational& v, const Interval& iv, int depth) {
  if (iv.hi < u || v < iv.lo) return false;
  if (iv.contains(u) || iv.contains(v)) return true;
  // neither endpoint inside but overlapping: iv sits strictly inside (u,v)
  if (depth > 36) throw std::overflow_error("interval too short for Cantor membership test");
  const Rational third = (v - u) / Rational(3);
  return cantor_meets(u, u + third, iv, depth + 1) || cantor_meets(v - third, v, iv, depth + 1);
}

}  // namespace

std::string to_string(const Interval& iv) {
  return std::string(iv.lo_closed ? "[" : "(") + iv.lo.to_string() + "," + iv.hi.to_string() +
         (iv.hi_closed ? "]" : ")");
}

CompactSet CompactSet::finite(std::vector<Rational> points) {
  if (points.empty()) throw UsageError("finite set needs at least one point");
  for (const auto& p : points) {
    if (!in_unit(p)) throw UsageError("point " + p.to_string() + " outside [0,1]");
  }
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  auto n = std::make_shared<Node>();
  n->kind = Kind::Finite;
  n->points = std::move(points);
  return CompactSet(n);
}

CompactSet CompactSet::geometric(Rational limit, Rational ratio, Rational offset) {
  if (!(Rational(0) < ratio && ratio < Rational(1))) throw UsageError("ratio must lie in (0,1)");
  if (offset == Rational(0)) throw UsageError("offset must be nonzero");
  if (!in_unit(limit) || !in_unit(limit + offset)) throw UsageError("sequence leaves [0,1]");
  auto n = std::make_shared<Node>();
  n->kind = Kind::Geometric;
  n->limit = limit;
  n->ratio = ratio;
  n->offset = offset;
  return CompactSet(n);
}

CompactSet CompactSet::cantor() {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Cantor;
  return CompactSet(n);
}

CompactSet CompactSet::unite(std::vector<CompactSet> members) {
  if (members.empty()) throw UsageError("union needs at least one member");
  auto n = std::make_shared<Node>();
  n->kind = Kind::Union;
  n->children = std::move(members);
  return CompactSet(n);
}

CompactSet CompactSet::affine(Rational a, Rational b, CompactSet inner) {
  if (a == Rational(0)) throw UsageError("affine map needs a != 0");
  Rational x = a * inner.min() + b, y = a * inner.max() + b;
  if (!in_unit(x) || !in_unit(y)) throw UsageError("affine image leaves [0,1]");
  auto n = std::make_shared<Node>();
  n->kind = Kind::Affine;
  n->a = a;
  n->b = b;
  n->children = {std::move(inner)};
  return CompactSet(n);
}

CompactSet::Kind CompactSet::kind() const { return node_->kind; }
const std::vector<Rational>& CompactSet::points() const { return node_->points; }
const Rational& CompactSet::limit() const { return node_->limit; }
const Rational& CompactSet::ratio() const { return node_->ratio; }
const Rational& CompactSet::offset() const { return node_->offset; }
const std::vector<CompactSet>& CompactSet::members() const { return node_->children; }
const Rational& CompactSet::a() const { return node_->a; }
const Rational& CompactSet::b() const { return node_->b; }
const CompactSet& CompactSet::inner() const { return node_->children.front(); }

Rational CompactSet::min() const {
  switch (kind()) {
    case Kind::Finite:
      return points().front();
    case Kind::Geometric:
      return offset() > Rational(0) ? limit() : limit() + offset();
    case Kind::Cantor:
      return Rational(0);
    case Kind::Union: {
      Rational m = members().front().min();
      for (const auto& x : members()) m = mdim::min(m, x.min());
      return m;
    }
    case Kind::Affine:
      return a() > Rational(0) ? a() * inner().min() + b() : a() * inner().max() + b();
  }
  return Rational(0);
}

Rational CompactSet::max() const {
  switch (kind()) {
    case Kind::Finite:
      return points().back();
    case Kind::Geometric:
      return offset() > Rational(0) ? limit() + offset() : limit();
    case Kind::Cantor:
      return Rational(1);
    case Kind::Union: {
      Rational m = members().front().max();
      for (const auto& x : members()) m = mdim::max(m, x.max());
      return m;
    }
    case Kind::Affine:
      return a() > Rational(0) ? a() * inner().max() + b() : a() * inner().min() + b();
  }
  return Rational(1);
}

bool CompactSet::contains(const Rational& t) const {
  switch (kind()) {
    case Kind::Finite:
      return std::binary_search(points().begin(), points().end(), t);
    case Kind::Geometric: {
      if (t == limit()) return true;
      const Rational q = (t - limit()) / offset();
      if (!(Rational(0) < q && q <= Rational(1))) return false;
      Rational x(1);
      while (x > q) {
        if (x.den() > q.den()) return false;
        try {
          x *= ratio();
        } catch (const std::overflow_error&) {
          return false;
        }
      }
      return x == q;
    }
    case Kind::Cantor: {
      if (!in_unit(t)) return false;
      std::map<std::pair<std::int64_t, std::int64_t>, bool> seen;
      Rational x = t;
      while (true) {
        if (x == Rational(0) || x == Rational(1)) return true;
        if (!seen.emplace(std::make_pair(x.num(), x.den()), true).second) return true;
        const Rational y = x * Rational(3);
        if (y < Rational(1)) {
          x = y;
        } else if (y > Rational(2)) {
          x = y - Rational(2);
        } else {
          return y == Rational(1) || y == Rational(2);
        }
      }
    }
    case Kind::Union:
      return std::any_of(members().begin(), members().end(), [&](const CompactSet& x) { return x.contains(t); });
    case Kind::Affine:
      return inner().contains((t - b()) / a());
  }
  return false;
}

bool CompactSet::intersects(const Interval& iv) const {
  if (interval_empty(iv)) return false;
  switch (kind()) {
    case Kind::Finite:
      return std::any_of(points().begin(), points().end(), [&](const Rational& p) { return iv.contains(p); });
    case Kind::Geometric: {
      if (iv.contains(limit())) return true;
      const Interval J = affine_image(iv, Rational(1) / offset(), -limit() / offset());
      if (J.hi < Rational(0) || (J.hi == Rational(0))) return false;
      if (J.lo <= Rational(0)) return true;  // powers accumulate at 0
      Rational x(1);
      while (x >= J.lo) {
        if (J.contains(x)) return true;
        x *= ratio();
      }
      return false;
    }
    case Kind::Cantor:
      return cantor_meets(Rational(0), Rational(1), iv, 0);
    case Kind::Union:
      return std::any_of(members().begin(), members().end(), [&](const CompactSet& x) { return x.intersects(iv); });
    case Kind::Affine:
      return inner().intersects(affine_image(iv, Rational(1) / a(), -b() / a()));
  }
  return false;
}

std::vector<Interval> CompactSet::gaps(const Rational& min_len) const {
  if (min_len <= Rational(0)) throw UsageError("gap length threshold must be positive");
  std::vector<Interval> out;
  switch (kind()) {
    case Kind::Finite:
      for (std::size_t i = 0; i + 1 < points().size(); ++i) {
        Interval g{points()[i], points()[i + 1]};
        if (g.length() >= min_len) out.push_back(g);
      }
      break;
    case Kind::Geometric: {
      Rational x(1);
      while (true) {
        Rational p = limit() + offset() * x;
        Rational q = limit() + offset() * x * ratio();
        Interval g = offset() > Rational(0) ? Interval{q, p} : Interval{p, q};
        if (g.length() < min_len) break;
        out.push_back(g);
        x *= ratio();
      }
      break;
    }
    case Kind::Cantor: {
      std::vector<std::pair<Rational, Rational>> level{{Rational(0), Rational(1)}};
      while (!level.empty()) {
        std::vector<std::pair<Rational, Rational>> next;
        for (auto [u, v] : level) {
          Rational third = (v - u) / Rational(3);
          if (third < min_len) continue;
          out.push_back(Interval{u + third, v - third});
          next.emplace_back(u, u + third);
          next.emplace_back(v - third, v);
        }
        level = std::move(next);
      }
      break;
    }
    case Kind::Union: {
      const Rational m0 = min(), M0 = max();
      std::vector<Interval> cur;
      if (m0 < M0) cur.push_back(Interval{m0, M0});
      for (const auto& x : members()) {
        std::vector<Interval> comp = x.gaps(min_len);
        if (x.min() > m0) comp.push_back(Interval{m0, x.min()});
        if (x.max() < M0) comp.push_back(Interval{x.max(), M0});
        std::vector<Interval> next;
        for (const auto& c : cur) {
          for (const auto& g : comp) {
            Interval r{mdim::max(c.lo, g.lo), mdim::min(c.hi, g.hi)};
            if (r.lo < r.hi) next.push_back(r);
          }
        }
        cur = std::move(next);
      }
      for (const auto& c : cur) {
        if (c.length() >= min_len) out.push_back(c);
      }
      break;
    }
    case Kind::Affine: {
      const Rational scale = a().abs();
      for (const auto& g : inner().gaps(min_len / scale)) out.push_back(affine_image(g, a(), b()));
      break;
    }
  }
  sort_gaps(out);
  return out;
}

bool CompactSet::is_finite() const {
  switch (kind()) {
    case Kind::Finite:
      return true;
    case Kind::Geometric:
    case Kind::Cantor:
      return false;
    case Kind::Union:
      return std::all_of(members().begin(), members().end(), [](const CompactSet& x) { return x.is_finite(); });
    case Kind::Affine:
      return inner().is_finite();
  }
  return false;
}

bool CompactSet::has_cantor() const {
  switch (kind()) {
    case Kind::Cantor:
      return true;
    case Kind::Union:
      return std::any_of(members().begin(), members().end(), [](const CompactSet& x) { return x.has_cantor(); });
    case Kind::Affine:
      return inner().has_cantor();
    default:
      return false;
  }
}

nlohmann::json CompactSet::to_json() const {
  using nlohmann::json;
  switch (kind()) {
    case Kind::Finite: {
      json pts = json::array();
      for (const auto& p : points()) pts.push_back(p.to_string());
      return json{{"kind", "finite"}, {"points", pts}};
    }
    case Kind::Geometric:
      return json{{"kind", "geometric"},
                  {"limit", limit().to_string()},
                  {"ratio", ratio().to_string()},
                  {"offset", offset().to_string()}};
    case Kind::Cantor:
      return json{{"kind", "cantor"}};
    case Kind::Union: {
      json ms = json::array();
      for (const auto& x : members()) ms.push_back(x.to_json());
      return json{{"kind", "union"}, {"members", ms}};
    }
    case Kind::Affine:
      return json{{"kind", "affine"}, {"a", a().to_string()}, {"b", b().to_string()}, {"inner", inner().to_json()}};
  }
  return {};
}

CompactSet CompactSet::from_json(const nlohmann::json& j) {
  auto rat = [](const nlohmann::json& x) {
    return x.is_string() ? Rational::parse(x.get<std::string>()) : Rational::parse(x.dump());
  };
  try {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "finite") {
      std::vector<Rational> pts;
      for (const auto& p : j.at("points")) pts.push_back(rat(p));
      return finite(std::move(pts));
    }
    if (kind == "geometric") return geometric(rat(j.at("limit")), rat(j.at("ratio")), rat(j.at("offset")));
    if (kind == "cantor") return cantor();
    if (kind == "union") {
      std::vector<CompactSet> ms;
      for (const auto& x : j.at("members")) ms.push_back(from_json(x));
      return unite(std::move(ms));
    }
    if (kind == "affine") return affine(rat(j.at("a")), rat(j.at("b")), from_json(j.at("inner")));
    throw UsageError("unknown compact set kind '" + kind + "'");
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("malformed compact set: ") + e.what());
  }
}

std::vector<Interval> contiguous_intervals(const CompactSet& B, const Rational& min_len) {
  std::vector<Interval> out = B.gaps(min_len);
  if (B.min() > Rational(0)) out.push_back(Interval{Rational(0), B.min(), true, false});
  if (B.max() < Rational(1)) out.push_back(Interval{B.max(), Rational(1), false, true});
  sort_gaps(out);
  return out;
}

std::optional<CompactSet> cb_derivative(const CompactSet& B) {
  switch (B.kind()) {
    case CompactSet::Kind::Finite:
      return std::nullopt;
    case CompactSet::Kind::Geometric:
      return CompactSet::finite({B.limit()});
    case CompactSet::Kind::Cantor:
      return B;
    case CompactSet::Kind::Union: {
      std::vector<CompactSet> ds;
      for (const auto& x : B.members()) {
        if (auto d = cb_derivative(x)) ds.push_back(*d);
      }
      if (ds.empty()) return std::nullopt;
      if (ds.size() == 1) return ds.front();
      return CompactSet::unite(std::move(ds));
    }
    case CompactSet::Kind::Affine: {
      auto d = cb_derivative(B.inner());
      if (!d) return std::nullopt;
      return CompactSet::affine(B.a(), B.b(), *d);
    }
  }
  return std::nullopt;
}

std::string CbRank::code() const { return perfect_kernel ? "perfect-kernel" : std::to_string(rank); }

CbRank cb_rank(const CompactSet& B) {
  CbRank r;
  std::optional<CompactSet> cur = B;
  while (cur) {
    auto next = cb_derivative(*cur);
    if (next && *next == *cur) {
      r.perfect_kernel = true;
      return r;
    }
    cur = next;
    ++r.rank;
  }
  return r;
}

bool is_countable(const CompactSet& B) { return !B.has_cantor(); }

std::vector<int> snap_to_grid(const CompactSet& B, int m) {
  if (m < 1) throw UsageError("grid needs m >= 1");
  std::vector<int> out;
  for (int k = 0; k <= m; ++k) {
    Interval cell{mdim::max(Rational(0), Rational(2 * k - 1, 2 * m)), mdim::min(Rational(1), Rational(2 * k + 1, 2 * m)),
                  true, k == m};
    if (B.intersects(cell)) out.push_back(k);
  }
  return out;
}

bool is_on_grid(const CompactSet& B, int m) {
  if (!B.is_finite()) return false;
  for (int k : snap_to_grid(B, m)) {
    if (!B.contains(Rational(k, m))) return false;
  }
  // every point of B sits on the grid iff no point lies strictly between grid points
  for (int k = 0; k < m; ++k) {
    if (B.intersects(Interval{Rational(k, m), Rational(k + 1, m)})) return false;
  }
  return true;
}

Rational cantor_function(const Rational& t) {
  if (t <= Rational(0)) return Rational(0);
  if (t >= Rational(1)) return Rational(1);
  std::map<std::pair<std::int64_t, std::int64_t>, std::pair<Rational, Rational>> seen;  // x -> (acc, w)
  Rational x = t, acc(0), w(1, 2);
  while (true) {
    if (x == Rational(1)) return acc + w * Rational(2);
    auto key = std::make_pair(x.num(), x.den());
    if (auto it = seen.find(key); it != seen.end()) {
      const auto& [acc0, w0] = it->second;
      const Rational period = acc - acc0;
      const Rational rho = w / w0;
      return acc0 + period / (Rational(1) - rho);
    }
    seen.emplace(key, std::make_pair(acc, w));
    const Rational y = x * Rational(3);
    const std::int64_t d = y.floor();
    if (d == 1) return acc + w;
    if (d == 2) acc += w;
    x = y - Rational(d);
    if (w.den() > (std::int64_t{1} << 60)) throw std::overflow_error("ternary expansion period too long");
    w /= Rational(2);
  }
}

Rational cantor_function_eval(const CompactSet& K, const Rational& t) {
  switch (K.kind()) {
    case CompactSet::Kind::Cantor:
      return cantor_function(t);
    case CompactSet::Kind::Affine: {
      const Rational s = (t - K.b()) / K.a();
      const Rational v = cantor_function_eval(K.inner(), s);
      return K.a() > Rational(0) ? v : Rational(1) - v;
    }
    default:
      throw UnsupportedError("staircase function needs a Cantor-type set");
  }
}

std::optional<CompactSet> perfect_component(const CompactSet& B) {
  switch (B.kind()) {
    case CompactSet::Kind::Cantor:
      return B;
    case CompactSet::Kind::Union:
      for (const auto& x : B.members()) {
        if (auto c = perfect_component(x)) return c;
      }
      return std::nullopt;
    case CompactSet::Kind::Affine: {
      auto c = perfect_component(B.inner());
      if (!c) return std::nullopt;
      return CompactSet::affine(B.a(), B.b(), *c);
    }
    default:
      return std::nullopt;
  }
}

}  // namespace mdim
