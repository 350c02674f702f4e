#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mdim/compact_set.hpp"
#include "mdim/shift_space.hpp"

namespace mdim {

/// psi(B): fixed points b^Z for b in B plus full-shift blocks over closures
/// of the intervals contiguous to B.
SubshiftDescriptor psi(const CompactSet& B);

/// pi((x_g)) = f(x_0) with f the staircase function of `kernel`.
struct FactorDescriptor {
  CompactSet kernel;
  std::string formula = "pi(x) = f(x_0)";
  Rational eval(const Rational& t) const { return cantor_function_eval(kernel, t); }
};

struct StaircaseCheck {
  int intervals = 0;       // contiguous intervals examined
  int samples = 0;         // evaluations inside them
  bool constant_on_intervals = true;
  std::vector<std::string> violations;
  Rational f0;
  Rational f1;
  bool non_constant = false;
};

/// Contiguous intervals of B at lengths >= min_len, glued when their closures
/// touch. For finite and simple convergent sets everything chains into one
/// component; a Cantor part leaves many.
struct BlockGraphReport {
  int intervals = 0;
  int components = 0;
  Rational covered;  // total length of the intervals
};
BlockGraphReport block_graph(const CompactSet& B, const Rational& min_len);

struct CpmdVerdict {
  bool yes = false;
  CbRank rank;
  std::string witness;
  std::optional<FactorDescriptor> factor;
  std::optional<StaircaseCheck> staircase;
  BlockGraphReport blocks;

  nlohmann::json to_json() const;
};

/// yes iff B is countable; otherwise a non-constant zero-dimensional factor
/// is produced and checked on up to max_intervals contiguous intervals
/// (10 exact samples each).
CpmdVerdict cpmd_verdict(const CompactSet& B, int max_intervals = 64);

/// Staircase checks of the factor on the contiguous intervals of B.
StaircaseCheck check_staircase(const FactorDescriptor& f, const CompactSet& B, int max_intervals = 64,
                               int samples_per_interval = 10);

/// Grid points (units of 1/m) of the length-n window of psi(B).
std::vector<std::vector<int>> psi_window_points(const CompactSet& B, int n, int m);

struct PsiContinuityReport {
  Rational eps;
  Rational delta;
  Rational set_distance;     // d_H(A,B)
  Rational window_distance;  // d_H of the windows
  bool premise = false;      // d_H(A,B) < delta/4
  bool pass = true;          // premise implies window distance < eps
  nlohmann::json to_json() const;
};

/// delta(eps) = eps: windows use sup of weighted coordinate distances with
/// weights <= 1, so the identity is a modulus for the coordinate maps.
Rational psi_modulus(const Rational& eps);

/// A and B must be finite sets on grid m.
PsiContinuityReport psi_continuity_check(const CompactSet& A, const CompactSet& B, const Rational& eps, int n, int m);

struct PsiSuiteReport {
  std::vector<PsiContinuityReport> trials;
  int violations = 0;
};
/// Random finite grid sets A and perturbations B with d_H(A,B) < delta/4.
PsiSuiteReport psi_continuity_suite(std::uint64_t seed, int trials, const Rational& eps, int n, int m);

}  // namespace mdim
