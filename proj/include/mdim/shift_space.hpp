#pragma once

#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "mdim/box_cover.hpp"
#include "mdim/compact_set.hpp"
#include "mdim/complex.hpp"
#include "mdim/dim_optimizer.hpp"

namespace mdim {

/// Subshifts of [0,1]^Z.
struct FullShift {};
struct TrivialAction {};
struct PsiShift {
  CompactSet B;
};
/// [lo,hi]^Z.
struct BlockShift {
  Rational lo;
  Rational hi;
};

class SubshiftDescriptor {
 public:
  using Variant = std::variant<FullShift, TrivialAction, PsiShift, BlockShift>;

  SubshiftDescriptor(Variant v);  // NOLINT(google-explicit-constructor)
  SubshiftDescriptor(FullShift x) : SubshiftDescriptor(Variant(x)) {}  // NOLINT(google-explicit-constructor)
  SubshiftDescriptor(TrivialAction x) : SubshiftDescriptor(Variant(x)) {}  // NOLINT(google-explicit-constructor)
  SubshiftDescriptor(PsiShift x) : SubshiftDescriptor(Variant(std::move(x))) {}  // NOLINT(google-explicit-constructor)
  SubshiftDescriptor(BlockShift x) : SubshiftDescriptor(Variant(x)) {}  // NOLINT(google-explicit-constructor)
  const Variant& variant() const { return v_; }
  std::string tag() const;

  nlohmann::json to_json() const;
  static SubshiftDescriptor from_json(const nlohmann::json& j);

 private:
  Variant v_;
};

/// Projection of X to n consecutive coordinates at alphabet grid m, realized
/// as a closed subcomplex of the Kuhn triangulation of [0,1]^n. The carried
/// restriction is the whole subcomplex.
struct WindowProjection {
  int n = 0;
  int m = 0;
  ComplexPtr complex;
  Restriction restriction = Restriction::whole();
  /// Grid values (units of 1/m) used for PsiShift/BlockShift.
  std::vector<int> snapped;
  std::vector<std::string> warnings;

  /// Vertices in grid units.
  std::vector<std::vector<int>> grid_points() const;
};

/// With strict, a descriptor that is not exactly on the grid is an error;
/// otherwise it is snapped and a warning recorded.
WindowProjection window_projection(const SubshiftDescriptor& X, int n, int m, bool strict = false,
                                   std::size_t cap = kDefaultSimplexCap);

/// Closed restriction of the full Kuhn cube carved out by a window.
Restriction window_restriction_in(const SimplicialComplex& cube, const WindowProjection& w);

/// Grid boxes (per coordinate [lo,hi] in grid units) whose union is the window.
std::vector<GridBox> window_boxes(const SubshiftDescriptor& X, int n, int m, bool strict,
                                  std::vector<int>* snapped = nullptr, std::vector<std::string>* warnings = nullptr);

struct ConsistencyReport {
  bool projection_last = true;   // dropping the last coordinate of window n+1 gives window n
  bool projection_first = true;  // dropping the first one (shift) gives window n as well
  bool simplices_project = true;
  bool ok() const { return projection_last && projection_first && simplices_project; }
};
ConsistencyReport window_consistency(const SubshiftDescriptor& X, int n, int m);

/// d(x,y) = max_{|g| <= R} 2^{-|g|} |x_g - y_g| on points indexed by
/// g in [-radius, radius] (coords[g + radius]).
struct TruncatedPoint {
  int radius = 0;
  std::vector<Rational> coords;
  const Rational& at(int g) const { return coords[g + radius]; }
};

struct TruncatedMetric {
  int R = 4;
  Rational distance(const TruncatedPoint& x, const TruncatedPoint& y) const;
};

struct HausdorffEstimate {
  Rational value;
  int resolution = 0;
  int window = 0;
};

/// Exact Hausdorff distance of finite subsets of [0,1].
HausdorffEstimate hausdorff_distance(const std::vector<Rational>& A, const std::vector<Rational>& B);
/// Exact Hausdorff distance of finite grid point sets in [0,1]^n (grid units
/// at resolution m) under weights 2^{-|i - center|}, center = n/2.
HausdorffEstimate hausdorff_distance(const std::vector<std::vector<int>>& P, const std::vector<std::vector<int>>& Q,
                                     int m);
/// Hausdorff distance of two window projections (same n, m) on grid points.
HausdorffEstimate window_hausdorff(const WindowProjection& a, const WindowProjection& b);

struct WindowEstimate {
  int n = 0;
  ExtRational value;
  DimResult result;
};

/// For n = 1..n_max: D_L(alpha^[n] restricted to window(X,n)) / n at grid m
/// (m = 0 means the cover's resolution).
std::vector<WindowEstimate> mdim_window_estimate(const SubshiftDescriptor& X, const BoxCover& alpha, int n_max, int L,
                                                 int m = 0, const DimOptions& opts = {}, bool strict = false);

}  // namespace mdim
