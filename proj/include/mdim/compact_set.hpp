#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mdim/rational.hpp"

namespace mdim {

/// Interval (c,d) with optionally included endpoints. Gaps of a compact set
/// are open; the contiguous intervals touching 0 or 1 are half-open there.
struct Interval {
  Rational lo;
  Rational hi;
  bool lo_closed = false;
  bool hi_closed = false;

  Rational length() const { return hi - lo; }
  bool contains(const Rational& t) const {
    return (lo < t || (lo_closed && lo == t)) && (t < hi || (hi_closed && hi == t));
  }
  friend bool operator==(const Interval&, const Interval&) = default;
};

std::string to_string(const Interval& iv);

/// Symbolic nonempty compact subset of [0,1].
class CompactSet {
 public:
  enum class Kind { Finite, Geometric, Cantor, Union, Affine };

  static CompactSet finite(std::vector<Rational> points);
  /// {limit + offset * ratio^k : k >= 0} together with limit; 0 < ratio < 1.
  static CompactSet geometric(Rational limit, Rational ratio, Rational offset);
  static CompactSet cantor();
  static CompactSet unite(std::vector<CompactSet> members);
  /// {a t + b : t in inner}, a != 0.
  static CompactSet affine(Rational a, Rational b, CompactSet inner);

  Kind kind() const;
  const std::vector<Rational>& points() const;  // Finite
  const Rational& limit() const;                // Geometric
  const Rational& ratio() const;
  const Rational& offset() const;
  const std::vector<CompactSet>& members() const;  // Union
  const Rational& a() const;                       // Affine
  const Rational& b() const;
  const CompactSet& inner() const;

  Rational min() const;
  Rational max() const;
  bool contains(const Rational& t) const;
  bool intersects(const Interval& iv) const;
  /// Maximal open gaps inside (min, max) of length >= min_len (> 0),
  /// sorted by decreasing length, then position.
  std::vector<Interval> gaps(const Rational& min_len) const;
  bool is_finite() const;
  bool has_cantor() const;

  nlohmann::json to_json() const;
  static CompactSet from_json(const nlohmann::json& j);

  friend bool operator==(const CompactSet& x, const CompactSet& y) { return x.to_json() == y.to_json(); }

 private:
  struct Node;
  explicit CompactSet(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

/// Intervals contiguous to B: the gaps plus [0,min) and (max,1] when nonempty.
std::vector<Interval> contiguous_intervals(const CompactSet& B, const Rational& min_len);

/// Cantor-Bendixson derivative; nullopt is the empty set.
std::optional<CompactSet> cb_derivative(const CompactSet& B);

struct CbRank {
  bool perfect_kernel = false;  // a nonempty perfect part survives
  int rank = 0;                 // steps to reach the empty set when countable
  std::string code() const;
};

CbRank cb_rank(const CompactSet& B);
bool is_countable(const CompactSet& B);

/// Grid points k/m (as k) that some point of B rounds to (nearest, ties up).
std::vector<int> snap_to_grid(const CompactSet& B, int m);
/// True iff B is exactly a set of grid points k/m.
bool is_on_grid(const CompactSet& B, int m);

/// Staircase function of a Cantor-type set (the Cantor set or affine images
/// of one): the distribution function of its natural measure.
Rational cantor_function_eval(const CompactSet& K, const Rational& t);
/// Standard Cantor function, exact via ternary digits.
Rational cantor_function(const Rational& t);
/// A Cantor-type component of B (its perfect kernel, or part of it).
std::optional<CompactSet> perfect_component(const CompactSet& B);

}  // namespace mdim
