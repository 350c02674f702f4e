#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "mdim/box_cover.hpp"
#include "mdim/dim_optimizer.hpp"
#include "mdim/rng.hpp"

namespace mdim {

/// Elements are open stars of vertex groups; every vertex lands in at least
/// one group, so the result covers K.
Cover random_star_cover(const ComplexPtr& K, Rng& rng, int min_elems = 2, int max_elems = 4);
/// Random open intervals covering [0,1] at grid m.
BoxCover random_interval_cover(int m, Rng& rng);
/// Kuhn cube at grid 2m onto the one at grid m, coordinatewise k -> floor(k/2).
SimplicialMap halving_map(const ComplexPtr& fine, const ComplexPtr& coarse);

struct SuiteTrial {
  int index = 0;
  std::string complex;
  int L = 0;
  InequalityReport report;
};

struct SuiteReport {
  int trials = 0;
  int checks = 0;
  int violations = 0;
  std::map<std::string, int> per_check;  // check family -> times evaluated
  std::vector<SuiteTrial> failing;
  nlohmann::json to_json() const;
};

/// Seeded random cover pairs alternating between a path (d=1) and a square
/// (d=2): D <= ord, refinement monotonicity, shifted subadditivity, product
/// bound and pullback bound per trial.
SuiteReport run_inequality_suite(std::uint64_t seed, int trials, const DimOptions& opts = {});

}  // namespace mdim
