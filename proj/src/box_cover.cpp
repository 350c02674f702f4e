#include "mdim/box_cover.hpp"

#include <cmath>
#include <string>

#include "mdim/errors.hpp"

namespace mdim {

CellSet cells_of(int m, const GridInterval& iv) {
  if (iv.lo < 0 || iv.hi > m || iv.lo >= iv.hi) throw UsageError("interval needs 0 <= lo < hi <= m");
  CellSet c(2 * m + 1, 0);
  for (int code = 2 * iv.lo + 1; code <= 2 * iv.hi - 1; ++code) c[code] = 1;
  if (iv.lo == 0 && iv.lo_closed) c[0] = 1;
  if (iv.hi == m && iv.hi_closed) c[2 * m] = 1;
  return c;
}

bool is_open_cellset(const CellSet& c) {
  const int top = static_cast<int>(c.size()) - 1;
  for (int code = 0; code <= top; code += 2) {
    if (!c[code]) continue;
    if (code > 0 && !c[code - 1]) return false;
    if (code < top && !c[code + 1]) return false;
  }
  return true;
}

BoxCover::BoxCover(int m, int d, std::vector<std::vector<Box>> elements, bool trusted)
    : m_(m), d_(d), elements_(std::move(elements)) {
  (void)trusted;
}

BoxCover::BoxCover(int m, int d, std::vector<std::vector<Box>> elements) : m_(m), d_(d), elements_(std::move(elements)) {
  if (m < 1 || d < 1) throw UsageError("box cover needs m >= 1 and d >= 1");
  if (elements_.empty()) throw UsageError("box cover has no elements");
  for (std::size_t i = 0; i < elements_.size(); ++i) {
    bool nonempty = false;
    for (const auto& box : elements_[i]) {
      if (static_cast<int>(box.size()) != d) throw UsageError("box dimension mismatch");
      bool box_nonempty = true;
      for (const auto& f : box) {
        if (static_cast<int>(f.size()) != 2 * m + 1) throw UsageError("cell set has wrong resolution");
        if (!is_open_cellset(f)) throw UsageError("box element " + std::to_string(i) + " is not open");
        bool any = false;
        for (char x : f) any = any || x;
        box_nonempty = box_nonempty && any;
      }
      nonempty = nonempty || box_nonempty;
    }
    if (!nonempty) throw UsageError("box element " + std::to_string(i) + " is empty");
  }
  if (std::pow(2.0 * m + 1, d) <= 1e6 && !covers_all_cells()) throw UsageError("box elements do not cover the cube");
}

BoxCover BoxCover::intervals(int m, const std::vector<GridInterval>& elems) {
  std::vector<std::vector<Box>> out;
  for (const auto& iv : elems) out.push_back({Box{cells_of(m, iv)}});
  return BoxCover(m, 1, std::move(out));
}

bool BoxCover::contains(int elem, const std::vector<int>& codes) const {
  for (const auto& box : elements_[elem]) {
    bool in = true;
    for (int i = 0; i < d_ && in; ++i) in = box[i][codes[i]] != 0;
    if (in) return true;
  }
  return false;
}

bool BoxCover::covers_all_cells() const {
  std::vector<int> codes(d_, 0);
  while (true) {
    bool hit = false;
    for (int e = 0; e < size() && !hit; ++e) hit = contains(e, codes);
    if (!hit) return false;
    int k = 0;
    for (; k < d_; ++k) {
      if (++codes[k] <= 2 * m_) break;
      codes[k] = 0;
    }
    if (k == d_) return true;
  }
}

std::vector<int> BoxCover::cell_of(const SimplicialComplex& K, int simplex) const {
  if (!K.grid()) throw UsageError("box cover conversion needs a Kuhn complex");
  const int M = *K.grid();
  if (M % m_ != 0) throw UsageError("complex grid " + std::to_string(M) + " is not a multiple of " + std::to_string(m_));
  if (K.ambient_dim() != d_) throw UsageError("box cover dimension does not match complex");
  const int q = M / m_;
  const Simplex& s = K.simplex(simplex);
  std::vector<int> lo(d_, M), hi(d_, 0);
  for (int v : s) {
    auto g = grid_coords(K, v);
    for (int i = 0; i < d_; ++i) {
      lo[i] = std::min(lo[i], g[i]);
      hi[i] = std::max(hi[i], g[i]);
    }
  }
  std::vector<int> codes(d_);
  for (int i = 0; i < d_; ++i) {
    if (hi[i] - lo[i] > 1) throw UsageError("simplex is not a Kuhn face");
    if (lo[i] == hi[i]) {
      codes[i] = lo[i] % q == 0 ? 2 * (lo[i] / q) : 2 * (lo[i] / q) + 1;
    } else {
      codes[i] = 2 * (lo[i] / q) + 1;
    }
  }
  return codes;
}

Cover BoxCover::to_cover(const ComplexPtr& K) const {
  const int n = K->num_simplices();
  std::vector<std::vector<int>> members(size());
  for (int id = 0; id < n; ++id) {
    auto codes = cell_of(*K, id);
    for (int e = 0; e < size(); ++e) {
      if (contains(e, codes)) members[e].push_back(id);
    }
  }
  std::vector<OpenSimplexSet> elems;
  for (auto& ids : members) elems.emplace_back(*K, SimplexSet(n, std::move(ids)));
  return Cover(K, std::move(elems), true);
}

BoxCover product_cover(const BoxCover& alpha, int n, std::size_t cap) {
  if (n < 1) throw UsageError("product cover needs n >= 1");
  const int k = alpha.size();
  double count = std::pow(static_cast<double>(k), n);
  if (count > static_cast<double>(cap)) throw CapError("product cover exceeds element cap");
  std::vector<std::vector<Box>> out;
  std::vector<int> idx(n, 0);
  while (true) {
    // union of products of the chosen elements' boxes
    std::vector<Box> boxes{Box{}};
    for (int j = 0; j < n; ++j) {
      std::vector<Box> next;
      for (const auto& partial : boxes) {
        for (const auto& b : alpha.elements()[idx[j]]) {
          Box nb = partial;
          nb.insert(nb.end(), b.begin(), b.end());
          next.push_back(std::move(nb));
        }
      }
      boxes = std::move(next);
    }
    out.push_back(std::move(boxes));
    int j = n - 1;
    for (; j >= 0; --j) {
      if (++idx[j] < k) break;
      idx[j] = 0;
    }
    if (j < 0) break;
  }
  return BoxCover(alpha.resolution(), alpha.dim() * n, std::move(out), true);
}

BoxCover distinguishing_interval_cover(int m) {
  if (m < 3) throw UsageError("a distinguishing interval 2-cover needs grid m >= 3");
  return BoxCover::intervals(m, {GridInterval{0, m - 1, true, true}, GridInterval{1, m, true, true}});
}

BoxCover standard_path_cover(int m) {
  if (m < 1) throw UsageError("grid needs m >= 1");
  return BoxCover::intervals(m, {GridInterval{0, m, true, false}, GridInterval{0, m, false, true}});
}

}  // namespace mdim
