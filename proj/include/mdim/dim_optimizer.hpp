#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mdim/box_cover.hpp"
#include "mdim/complex.hpp"

namespace mdim {

enum class SearchMode { Exact, Heuristic };

struct DimOptions {
  SearchMode mode = SearchMode::Exact;
  std::size_t cap = kDefaultSimplexCap;
  /// Decision mode: stop as soon as the answer to "value <= cutoff" is known.
  std::optional<std::int64_t> cutoff;
  /// 0 means unlimited. When exceeded the result is a bound, exact = false.
  std::uint64_t node_limit = 0;
  /// Heuristic relabeling budget; 0 means 10 * |vertices|.
  std::uint64_t heuristic_budget = 0;
  /// Seed the lower bound with the Lebesgue covering bound when the complex is
  /// the whole Kuhn cube and no element meets two opposite faces.
  bool lebesgue = true;
};

/// A labeling problem on the vertices of an admitted region: every vertex gets
/// a label from its domain; the cost is the largest number of distinct labels
/// on a constraint simplex.
struct LabelProblem {
  int num_labels = 0;
  std::vector<std::vector<int>> domain;       // per local vertex, ascending
  std::vector<std::vector<int>> constraints;  // local vertex lists
  std::vector<int> vertex;                    // local -> complex vertex id
};

struct SearchStats {
  std::uint64_t nodes = 0;
  int decisions = 0;
};

struct DimResult {
  ExtInt value = ExtInt::neg_inf();
  /// Proven lower bound; equals value when exact.
  ExtInt lower_bound = ExtInt::neg_inf();
  /// Label (index into the input cover's elements) per vertex of level_complex.
  std::optional<std::vector<int>> witness;
  int level = 0;
  bool exact = true;
  ComplexPtr level_complex;
  /// Input cover elements pushed to level_complex (may be empty there).
  std::vector<SimplexSet> level_elements;
  Restriction level_restriction = Restriction::empty();
  SearchStats stats;
  std::string diagnostic;
};

/// Complex, cover sets and restriction after trimming to the closure of Y and
/// L barycentric subdivisions.
struct LevelData {
  ComplexPtr complex;
  std::vector<SimplexSet> elements;
  Restriction restriction = Restriction::empty();
};

LevelData prepare_level(const Cover& alpha, const Restriction& Y, int L, std::size_t cap = kDefaultSimplexCap);
LabelProblem build_label_problem(const LevelData& level, int num_labels);

/// Cost of a complete labeling (indexed by local vertex): max distinct - 1.
std::int64_t labeling_cost(const LabelProblem& p, const std::vector<int>& labels);

DimResult dee_hat(const Cover& alpha, const Restriction& Y, int L, const DimOptions& opts = {});
std::vector<DimResult> dee_hat_best(const Cover& alpha, const Restriction& Y, int L_max, const DimOptions& opts = {});

/// W_i = union of open stars of the vertices labeled i; empty W_i dropped.
Cover induced_cover(const ComplexPtr& K, const std::vector<int>& labels, int num_labels);
/// ord of the witness's induced cover on the level restriction.
ExtInt witness_order(const DimResult& r, int num_labels);
/// Every vertex's label names an element containing that vertex.
bool witness_admissible(const DimResult& r);

struct InequalityCheck {
  std::string name;
  bool pass = true;
  std::string lhs;
  std::string rhs;
  std::string detail;
};

struct InequalityReport {
  std::vector<InequalityCheck> checks;
  bool all_pass() const;
};

struct InequalityExtras {
  /// Product bound D(a^[n]) <= n D(a) on the cube at grid `grid` (level 0).
  std::shared_ptr<const BoxCover> product_factor;
  int product_n = 2;
  int product_grid = 0;  // 0: the factor's own resolution
  /// Pullback bound D(f^-1 gamma) <= D(gamma) at the given level.
  std::shared_ptr<const SimplicialMap> map;
  std::shared_ptr<const Cover> target_cover;
};

InequalityReport verify_inequalities(const Cover& alpha, const Cover& beta, int L, const InequalityExtras& extras = {},
                                     const DimOptions& opts = {});

}  // namespace mdim
