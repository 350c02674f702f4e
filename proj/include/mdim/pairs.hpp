#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mdim/box_cover.hpp"
#include "mdim/dim_optimizer.hpp"
#include "mdim/rng.hpp"

namespace mdim {

// Covers here are covers of the alphabet [0,1] at grid M (cell masks, codes
// 0..2M), pulled back to the full shift through coordinate 0.

CellSet cell_closure(const CellSet& s);
CellSet cell_complement(const CellSet& s);
CellSet cell_union(const CellSet& a, const CellSet& b);
bool cell_subset(const CellSet& a, const CellSet& b);
bool cell_empty(const CellSet& s);
/// Closed ball [c - r, c + r] (grid units) clipped to [0, M].
CellSet closed_ball(int M, int c, int r);
/// Grid diameter of a closed cell set (max point - min point), -1 when empty.
int cell_diameter(const CellSet& s);
/// Element i of a one-dimensional BoxCover as a single mask.
CellSet element_mask(const BoxCover& alpha, int i);
BoxCover cover_from_masks(int M, const std::vector<CellSet>& masks);
/// Same cover on grid M * factor.
BoxCover refine_cover(const BoxCover& alpha, int factor);
/// Rectilinear re-gridding keeping only the points where membership changes.
BoxCover compress_cover(const BoxCover& alpha);

bool is_dense(const CellSet& open);
/// Two elements, both non-dense.
bool is_standard(const BoxCover& alpha);
/// x not in closure(V) and y not in closure(U); x, y grid points.
bool distinguishes(const BoxCover& alpha, int x, int y);

struct OracleResult {
  ExtRational value;        // D_L(alpha^[n]) / n, or its lower bound in decision mode
  bool exact = false;
  bool positive = false;
  int compressed_grid = 0;
  std::uint64_t nodes = 0;
  nlohmann::json to_json() const;
};

/// Window estimator on the full shift: D_L(alpha^[n]) / n on the compressed
/// grid, positive when >= threshold.
struct MdimOracle {
  int n = 2;
  int L = 1;
  Rational threshold{1, 4};
  DimOptions opts;

  /// Decision mode: only settles value >= threshold.
  OracleResult test(const BoxCover& alpha) const;
  /// Exact value.
  OracleResult value(const BoxCover& alpha) const;
};

struct StandardizeStep {
  std::string action;
  int index = -1;
  nlohmann::json detail;
};

struct StandardCoverCandidate {
  BoxCover cover;
  bool u_dense = false;
  bool v_dense = false;
  OracleResult oracle;
  std::vector<StandardizeStep> trace;
  bool ok = false;  // standard with positive oracle
  std::string failure;
  nlohmann::json to_json() const;
};

/// Drop redundant elements, pick a two-element coarsening (U_i, union of the
/// rest) with positive oracle, then cut closed cells out of dense elements.
StandardCoverCandidate standardize(const BoxCover& alpha, const MdimOracle& oracle);

struct PairStep {
  int n = 0;
  CellSet u_comp;  // U_n^c
  CellSet v_comp;  // V_n^c
  int u_choice = -1;
  int v_choice = -1;
  std::vector<OracleResult> u_trace;
  std::vector<OracleResult> v_trace;
};

struct PairInvariants {
  bool nested = true;
  bool diameters = true;
  bool inside_original = true;
  bool disjoint = true;
  bool ok() const { return nested && diameters && inside_original && disjoint; }
};

struct PairRegions {
  int M = 0;
  CellSet u_comp0;
  CellSet v_comp0;
  std::vector<PairStep> steps;
  std::optional<std::pair<int, int>> candidate;  // grid points x in U_n^c, y in V_n^c
  std::string failure;
  PairInvariants check() const;
  nlohmann::json to_json() const;
};

/// Nested construction for n = 1..n_max. The cover is refined to a grid that
/// is a multiple of lcm(1..n_max) first.
PairRegions find_pair_regions(const BoxCover& alpha, int n_max, const MdimOracle& oracle);

/// Distinguishing covers (complements of two disjoint closed balls around
/// y and x) on grid M.
std::vector<BoxCover> sample_distinguishing_covers(int M, int x, int y, int count, Rng& rng);

/// Piecewise-linear map [0,1] -> [0,1] given by images of grid points; images
/// of neighbours differ by at most one target grid step.
struct AlphabetMap {
  int source_grid = 0;
  int target_grid = 0;
  std::vector<int> image;
  bool is_surjective() const;
  int cell_image(int code) const;
  BoxCover pullback(const BoxCover& alpha) const;
};

struct TransferReport {
  ExtRational upstairs;
  ExtRational downstairs;
  bool inequality = true;
  int pairs_tested = 0;
  int pairs_positive = 0;
  bool ok() const { return inequality && pairs_tested == pairs_positive; }
  nlohmann::json to_json() const;
};

/// oracle(f^-1 alpha) <= oracle(alpha); for each upstairs pair with distinct
/// images, `samples` downstairs distinguishing covers must test positive.
TransferReport verify_pair_transfer(const AlphabetMap& f, const BoxCover& alpha,
                                    const std::vector<std::pair<int, int>>& pairs, const MdimOracle& oracle,
                                    int samples, std::uint64_t seed);

struct ClosureReport {
  bool skipped = false;
  int covers = 0;
  int distinguishing_tail = 0;
  int positive = 0;
  bool ok() const { return skipped || (distinguishing_tail == covers && positive == covers); }
};

/// candidates on grid M converging to their last element.
ClosureReport pair_closure_check(int M, const std::vector<std::pair<int, int>>& candidates, const MdimOracle& oracle,
                                 int samples, std::uint64_t seed);

}  // namespace mdim
