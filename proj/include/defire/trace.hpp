#pragma once

#include <cstddef>
#include <vector>

#include "defire/profile.hpp"

namespace defire {

/// One maximal plateau (lo, hi] of a non-decreasing profile.
struct Plateau {
  double lo;
  double hi;
};

/// The combinatorial skeleton of a non-decreasing profile: the family of
/// disjoint semi-open plateau intervals, ordered left to right.
///
/// The same interval family encodes both the lower trace (left endpoint of
/// the plateau containing x) and the upper trace (right endpoint). Points
/// covered by no plateau are isolated cells, where both traces equal x; this
/// only occurs for idealized infinite-population traces. Traces of step
/// profiles tile (0,1] completely.
class Trace {
 public:
  Trace() = default;
  explicit Trace(std::vector<Plateau> plateaus);

  const std::vector<Plateau>& plateaus() const { return plateaus_; }
  std::size_t plateau_count() const { return plateaus_.size(); }

  /// True when the plateaus cover (0,1] with no gaps, i.e. the trace comes
  /// from a finite step profile.
  bool tiles_unit_interval(double tol = 1e-12) const;

  double lower(double x) const;
  double upper(double x) const;

  /// Right limits lower(x+0) and upper(x+0) for x in (0,1).
  double lower_right_limit(double x) const;
  double upper_right_limit(double x) const;

  /// Exact integrals of the two step functions over (0,1].
  double integral_lower() const;
  double integral_upper() const;

 private:
  // Index of the plateau containing x (lo < x <= hi), or npos.
  std::size_t find(double x) const;
  // Index of the plateau containing x+0 (lo <= x < hi), or npos.
  std::size_t find_right(double x) const;

  std::vector<Plateau> plateaus_;
};

/// Trace of a step profile: every cluster is one plateau (for a step
/// function there are no isolated cells).
Trace compute_traces(const StepProfile& profile);

/// Integral of the lower trace over (0,1].
double trace_integral(const Trace& trace);

}  // namespace defire
