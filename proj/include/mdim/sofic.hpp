#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mdim/box_cover.hpp"
#include "mdim/dim_optimizer.hpp"
#include "mdim/shift_space.hpp"

namespace mdim {

/// Permutation model of a finite symmetric support F0 of a group on [n].
/// For Z (cyclic models) element labels are the integers themselves.
struct SoficApproximation {
  int n = 0;
  std::vector<std::string> elements;
  std::vector<std::vector<int>> perms;
  /// (i, j) -> index of elements[i] * elements[j] when it lies in the support.
  std::map<std::pair<int, int>, int> product;
  std::optional<int> identity;
  bool cyclic = false;
  std::vector<int> shifts;  // cyclic models: the integer of each element

  int index_of(const std::string& label) const;  // throws UsageError if absent
  nlohmann::json to_json() const;
};

/// s(g): v -> v + g mod n on the given integers (no freeness precondition).
SoficApproximation cyclic_model(int n, const std::vector<int>& elements);
/// Support {-k..k}; needs n > 2k.
SoficApproximation cyclic_approximation(int n, int k);

/// Text format:
///   size <n>
///   identity <label>          (optional)
///   <label>: <image of 0> <image of 1> ...
///   <a> * <b> = <c>           (products inside the support)
/// '#' starts a comment.
SoficApproximation parse_model(const std::string& text);
SoficApproximation load_model(const std::string& path);

struct PairQuality {
  std::string g;
  std::string h;
  std::optional<Rational> multiplicative;  // fraction with s(gh)v = s(g)s(h)v
  std::optional<Rational> free;            // g != h: fraction with s(g)v != s(h)v
};

/// All ordered pairs of F (labels). Pairs whose product is missing from a
/// loaded model's table get no multiplicativity fraction.
std::vector<PairQuality> approximation_quality(const SoficApproximation& s, const std::vector<std::string>& F);
nlohmann::json quality_to_json(const std::vector<PairQuality>& q);

/// phi: [n] -> truncated points of [0,1]^Z.
struct Microstate {
  std::vector<TruncatedPoint> points;
  int size() const { return static_cast<int>(points.size()); }
};

struct Defect {
  Rational squared;  // (1/n) sum_v d(phi(s_g v), g phi(v))^2
  double value() const;
};

/// Z acts by (g x)_h = x_{h+g}; loaded models only for constant points
/// (trivial action). Needs point radius >= R + |g|.
Defect microstate_defect(const Microstate& phi, int g_index, const SoficApproximation& s, const TruncatedMetric& metric);

/// In Map(F, delta) (strict = false, defect <= delta) or Map' (strict, < delta).
bool in_map(const Microstate& phi, const std::vector<int>& F_indices, const SoficApproximation& s,
            const TruncatedMetric& metric, const Rational& delta, bool strict);

/// phi_z(v)_g = z_{(v+g) mod n}; exact orbit of the periodic point of period z.
Microstate periodic_microstate(const std::vector<Rational>& z, int radius);
/// phi(v) = x_v constant sequences.
Microstate constant_microstate(const std::vector<Rational>& x, int radius);

struct EstimatorParams {
  std::vector<std::string> F{"-1", "0", "1"};
  Rational delta{1, 20};
  int R = 4;
  int L = 0;
  bool strict = false;
  DimOptions opts;
};

/// Microstate restriction realized on the Kuhn cube [0,1]^n at grid m,
/// through the coordinate-0 evaluation phi -> (phi(v)_0)_v.
struct MicrostateRealization {
  ComplexPtr complex;     // nullptr when empty
  bool exact = false;     // whole microstate image at grid resolution
  bool lower_bound = false;
  std::string method;     // periodic-family / tube / periodic-blocks / empty
  std::size_t points = 0;
};

MicrostateRealization realize_microstates(const SubshiftDescriptor& X, const SoficApproximation& s, int m,
                                          const EstimatorParams& p);

/// Grid points of the trivial-action tube {x : defect <= delta (or <) for g in F}.
std::vector<std::vector<int>> tube_points(const SoficApproximation& s, int m, const EstimatorParams& p);

struct SoficEstimate {
  int model = 0;
  int n = 0;
  ExtRational value;
  bool exact = false;
  bool lower_bound = false;
  std::string method;
  std::optional<DimResult> result;
  nlohmann::json to_json() const;
};

std::vector<SoficEstimate> sofic_mdim_estimate(const SubshiftDescriptor& X, const BoxCover& alpha,
                                               const EstimatorParams& p, const std::vector<SoficApproximation>& models);

struct EntropyEstimate {
  int model = 0;
  int n = 0;
  std::optional<std::int64_t> count;  // minimal subcover size; nullopt = empty microstate space
  bool lower_bound = false;
  double value() const;  // log(count) / n, -inf when empty
  nlohmann::json to_json() const;
};

std::vector<EntropyEstimate> sofic_entropy_estimate(const SubshiftDescriptor& X, const BoxCover& alpha,
                                                    const EstimatorParams& p,
                                                    const std::vector<SoficApproximation>& models);

/// Minimal number of cover elements whose union contains every admitted simplex.
std::int64_t min_subcover(const Cover& c, const Restriction& Y);

struct SemicontTrial {
  std::vector<Rational> B;
  Rational distance;
  ExtInt ord;
  bool drop = false;
};

struct SemicontReport {
  ExtInt base_ord;
  Rational rho;
  int fine_grid = 0;
  std::vector<SemicontTrial> trials;
  int violations = 0;
  nlohmann::json to_json() const;
};

/// Lower semicontinuity of X -> ord(beta | Map'(X)) at X = psi(B), B finite on
/// the grid of beta's complex (a Kuhn cube [0,1]^n). Perturbations B' live on a
/// finer grid with d_H(B, B') < rho; beta is carried to the finer cube by carriers.
SemicontReport semicontinuity_probe(const CompactSet& B, const Cover& beta, const EstimatorParams& p, int trials,
                                    std::uint64_t seed);

}  // namespace mdim
