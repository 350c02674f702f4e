#pragma once

#include <cstddef>
#include <vector>

#include "mdim/complex.hpp"

namespace mdim {

/// Cells of [0,1] at resolution m are coded 0..2m: code 2k is the point k/m,
/// code 2k+1 the open interval (k/m, (k+1)/m). A CellSet is a mask over codes.
using CellSet = std::vector<char>;
/// Product of one CellSet per coordinate.
using Box = std::vector<CellSet>;

/// Interval at resolution m in grid units. Interior endpoints are always
/// excluded; an endpoint at 0 or m is included iff its flag is set.
struct GridInterval {
  int lo = 0;
  int hi = 0;
  bool lo_closed = true;
  bool hi_closed = true;
};

CellSet cells_of(int m, const GridInterval& iv);
/// Open in [0,1]: every included point has its neighbouring intervals.
bool is_open_cellset(const CellSet& c);

/// Cover of [0,1]^d whose elements are unions of open grid boxes.
class BoxCover {
 public:
  /// Validates openness, nonemptiness, and (when (2m+1)^d is small) covering.
  BoxCover(int m, int d, std::vector<std::vector<Box>> elements);
  /// One-dimensional cover, one interval per element.
  static BoxCover intervals(int m, const std::vector<GridInterval>& elems);

  int resolution() const { return m_; }
  int dim() const { return d_; }
  int size() const { return static_cast<int>(elements_.size()); }
  const std::vector<std::vector<Box>>& elements() const { return elements_; }

  bool contains(int elem, const std::vector<int>& codes) const;
  bool covers_all_cells() const;

  /// Cell codes (at this resolution) of the open cell carrying a simplex of
  /// a Kuhn complex whose grid is a multiple of m.
  std::vector<int> cell_of(const SimplicialComplex& K, int simplex) const;
  /// Element i becomes the simplices whose carrier cell lies in it. Elements
  /// that miss K entirely are dropped (K may be a subcomplex of the cube).
  Cover to_cover(const ComplexPtr& K) const;

 private:
  friend BoxCover product_cover(const BoxCover& alpha, int n, std::size_t cap);
  BoxCover(int m, int d, std::vector<std::vector<Box>> elements, bool trusted);

  int m_;
  int d_;
  std::vector<std::vector<Box>> elements_;
};

/// alpha^[n]: elements U_{i1} x ... x U_{in} in lexicographic index order.
BoxCover product_cover(const BoxCover& alpha, int n, std::size_t cap = 1'000'000);

/// U = [0, 1 - 1/m), V = (1/m, 1]; needs m >= 3 (at m = 2 it would not cover 1/2).
BoxCover distinguishing_interval_cover(int m);
/// U = [0, 1), V = (0, 1].
BoxCover standard_path_cover(int m);

}  // namespace mdim
