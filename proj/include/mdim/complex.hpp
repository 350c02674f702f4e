#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <unordered_map>
#include <utility>
#include <vector>

#include "mdim/rational.hpp"

namespace mdim {

using Point = std::vector<Rational>;
using Simplex = std::vector<int>;  // sorted vertex ids

inline constexpr std::size_t kDefaultSimplexCap = 4'000'000;

struct SimplexHash {
  std::size_t operator()(const Simplex& s) const noexcept {
    std::uint64_t h = 1469598103934665603ULL;
    for (int v : s) {
      h ^= static_cast<std::uint64_t>(v) + 0x9e3779b97f4a7c15ULL;
      h *= 1099511628211ULL;
    }
    return static_cast<std::size_t>(h);
  }
};

/// Finite geometric simplicial complex. Simplices are kept in canonical
/// order (by size, then lexicographically), so faces always have smaller
/// ids than their cofaces. Vertex v is simplex {v}; vertex ids are
/// not simplex ids.
class SimplicialComplex {
 public:
  /// `generators` are closed under faces unless `already_closed`.
  SimplicialComplex(int ambient_dim, std::vector<Point> vertices, const std::vector<Simplex>& generators,
                    std::size_t cap = kDefaultSimplexCap, bool already_closed = false);

  int ambient_dim() const { return ambient_dim_; }
  int top_dim() const { return top_dim_; }
  int num_vertices() const { return static_cast<int>(points_.size()); }
  int num_simplices() const { return static_cast<int>(simplices_.size()); }

  const Point& point(int v) const { return points_[v]; }
  const std::vector<Point>& points() const { return points_; }
  const Simplex& simplex(int id) const { return simplices_[id]; }
  const std::vector<Simplex>& simplices() const { return simplices_; }
  std::optional<int> find(const Simplex& s) const;
  int id_of(const Simplex& s) const;  // throws if absent
  int vertex_simplex(int v) const { return vertex_simplex_[v]; }

  /// Ids of simplices containing vertex v, ascending.
  const std::vector<int>& star(int v) const { return star_[v]; }
  /// Ids of simplices containing simplex `id` (itself included), ascending.
  std::vector<int> cofaces(int id) const;
  /// Codimension-one faces / cofaces.
  std::pair<const int*, const int*> boundary(int id) const {
    return {bnd_.data() + bnd_off_[id], bnd_.data() + bnd_off_[id + 1]};
  }
  std::pair<const int*, const int*> coboundary(int id) const {
    return {cobnd_.data() + cobnd_off_[id], cobnd_.data() + cobnd_off_[id + 1]};
  }
  /// Ids of all nonempty faces (itself included).
  std::vector<int> faces(int id) const;
  const std::vector<int>& facets() const { return facets_; }

  Point barycenter(int id) const;
  /// Simplex whose relative interior contains p, if any.
  std::optional<int> carrier(const Point& p) const;

  /// Kuhn grid resolution when built by a Kuhn builder (coordinates k/m).
  std::optional<int> grid() const { return grid_; }
  void set_grid(int m) { grid_ = m; }

  bool operator==(const SimplicialComplex& o) const {
    return ambient_dim_ == o.ambient_dim_ && points_ == o.points_ && simplices_ == o.simplices_;
  }

 private:
  int ambient_dim_;
  int top_dim_ = -1;
  std::vector<Point> points_;
  std::vector<Simplex> simplices_;
  std::unordered_map<Simplex, int, SimplexHash> index_;
  std::vector<int> vertex_simplex_;
  std::vector<std::vector<int>> star_;
  std::vector<int> bnd_off_, bnd_, cobnd_off_, cobnd_;
  std::vector<int> facets_;
  std::optional<int> grid_;
};

using ComplexPtr = std::shared_ptr<const SimplicialComplex>;

/// Sorted set of simplex ids with an O(1) membership mask.
class SimplexSet {
 public:
  SimplexSet() = default;
  SimplexSet(std::size_t universe, std::vector<int> ids);
  static SimplexSet all(std::size_t universe);

  bool contains(int id) const { return id >= 0 && static_cast<std::size_t>(id) < mask_.size() && mask_[id]; }
  const std::vector<int>& ids() const { return ids_; }
  std::size_t size() const { return ids_.size(); }
  bool empty() const { return ids_.empty(); }
  std::size_t universe() const { return mask_.size(); }

  bool subset_of(const SimplexSet& o) const;
  SimplexSet intersect(const SimplexSet& o) const;
  SimplexSet unite(const SimplexSet& o) const;
  SimplexSet minus(const SimplexSet& o) const;

  friend bool operator==(const SimplexSet& a, const SimplexSet& b) { return a.ids_ == b.ids_; }
  friend bool operator<(const SimplexSet& a, const SimplexSet& b) { return a.ids_ < b.ids_; }

 private:
  std::vector<int> ids_;
  std::vector<char> mask_;
};

bool is_upward_closed(const SimplicialComplex& K, const SimplexSet& s);
bool is_downward_closed(const SimplicialComplex& K, const SimplexSet& s);
SimplexSet upward_closure(const SimplicialComplex& K, const SimplexSet& s);
SimplexSet downward_closure(const SimplicialComplex& K, const SimplexSet& s);
/// Topological closure of an open set: all faces of its members.
SimplexSet closure_of(const SimplicialComplex& K, const SimplexSet& open);
/// Vertices of the given simplices.
std::vector<int> vertices_of(const SimplicialComplex& K, const SimplexSet& s);

/// Open set: union of relative interiors of its (upward closed) members.
class OpenSimplexSet {
 public:
  OpenSimplexSet() = default;
  /// Validates upward closure.
  OpenSimplexSet(const SimplicialComplex& K, SimplexSet s);
  static OpenSimplexSet whole(const SimplicialComplex& K);
  /// Star cover element on a vertex set: {σ : σ ∩ V ≠ ∅}.
  static OpenSimplexSet star(const SimplicialComplex& K, const std::vector<int>& vertices);
  static OpenSimplexSet generated(const SimplicialComplex& K, const SimplexSet& s);

  const SimplexSet& set() const { return set_; }
  bool contains(int id) const { return set_.contains(id); }
  const std::vector<int>& ids() const { return set_.ids(); }
  bool empty() const { return set_.empty(); }
  std::size_t size() const { return set_.size(); }

  friend bool operator==(const OpenSimplexSet& a, const OpenSimplexSet& b) { return a.set_ == b.set_; }

 private:
  explicit OpenSimplexSet(SimplexSet s) : set_(std::move(s)) {}
  SimplexSet set_;
};

class Restriction {
 public:
  enum class Kind { Whole, Closed, Open, Empty };

  static Restriction whole() { return Restriction(Kind::Whole, {}); }
  static Restriction empty() { return Restriction(Kind::Empty, {}); }
  /// Validates downward closure; an empty payload becomes Kind::Empty.
  static Restriction closed(const SimplicialComplex& K, SimplexSet s);
  /// Validates upward closure; an empty payload becomes Kind::Empty.
  static Restriction open(const SimplicialComplex& K, SimplexSet s);

  Kind kind() const { return kind_; }
  const SimplexSet& payload() const { return payload_; }
  bool is_empty() const { return kind_ == Kind::Empty; }
  bool admits(int id) const;
  std::vector<int> admitted(const SimplicialComplex& K) const;

 private:
  Restriction(Kind k, SimplexSet s) : kind_(k), payload_(std::move(s)) {}
  Kind kind_;
  SimplexSet payload_;
};

const char* to_string(Restriction::Kind k);

/// Finite open cover. Duplicates are dropped (first occurrence kept);
/// origin(i) is the input index of kept element i.
class Cover {
 public:
  /// With drop_empty, empty elements are skipped instead of rejected.
  Cover(ComplexPtr K, std::vector<OpenSimplexSet> elements, bool drop_empty = false);

  const ComplexPtr& complex_ptr() const { return complex_; }
  const SimplicialComplex& complex() const { return *complex_; }
  const std::vector<OpenSimplexSet>& elements() const { return elements_; }
  const OpenSimplexSet& element(int i) const { return elements_[i]; }
  int size() const { return static_cast<int>(elements_.size()); }
  int origin(int i) const { return origin_[i]; }

  /// Number of elements containing simplex `id`.
  int multiplicity(int id) const;

 private:
  ComplexPtr complex_;
  std::vector<OpenSimplexSet> elements_;
  std::vector<int> origin_;
};

ExtInt ord(const Cover& alpha, const Restriction& Y);
Cover join(const Cover& alpha, const Cover& beta);
/// True iff every beta element lies inside some alpha element.
bool refines(const Cover& beta, const Cover& alpha);

struct Subdivision {
  ComplexPtr complex;
  std::vector<SimplexSet> pushed;
};

/// Barycentric subdivision. Vertex i of Sd(K) is the barycenter of simplex i
/// of K. A set S is pushed to {chains whose top element lies in S}, which
/// describes the same point set.
Subdivision barycentric_subdivide(const SimplicialComplex& K, const std::vector<SimplexSet>& sets,
                                  std::size_t cap = kDefaultSimplexCap);

Restriction push_restriction(const SimplicialComplex& Sd, const Restriction& Y, const SimplexSet& pushed_payload);

/// Kuhn (Freudenthal) triangulation of [0,1]^d at grid m.
SimplicialComplex build_triangulated_cube(int d, int m, std::size_t cap = kDefaultSimplexCap);

/// Axis-aligned grid box, per coordinate [lo,hi] in grid units (lo == hi fixes
/// the coordinate).
using GridBox = std::vector<std::pair<int, int>>;

/// Subcomplex of the Kuhn triangulation made of all Kuhn faces lying in a
/// common box.
SimplicialComplex kuhn_box_union(int d, int m, const std::vector<GridBox>& boxes,
                                 std::size_t cap = kDefaultSimplexCap);

/// Subcomplex of the Kuhn triangulation spanned by a set of grid points
/// (all Kuhn faces whose vertices are in the set).
SimplicialComplex kuhn_spanned(int d, int m, const std::vector<std::vector<int>>& grid_points,
                               std::size_t cap = kDefaultSimplexCap);

/// Grid coordinates (units of 1/m) of vertex v; requires grid().
std::vector<int> grid_coords(const SimplicialComplex& K, int v);

/// Vertex map between complexes that sends simplices to simplices.
class SimplicialMap {
 public:
  SimplicialMap(ComplexPtr source, ComplexPtr target, std::vector<int> vertex_map);

  const SimplicialComplex& source() const { return *source_; }
  const SimplicialComplex& target() const { return *target_; }
  const ComplexPtr& source_ptr() const { return source_; }
  const ComplexPtr& target_ptr() const { return target_; }
  int image_vertex(int v) const { return vmap_[v]; }
  int image(int simplex_id) const { return image_[simplex_id]; }
  bool is_surjective() const;

  /// {σ : f(σ) ∈ S}.
  SimplexSet pullback(const SimplexSet& s) const;
  Cover pullback(const Cover& c) const;

 private:
  ComplexPtr source_;
  ComplexPtr target_;
  std::vector<int> vmap_;
  std::vector<int> image_;
};

}  // namespace mdim
