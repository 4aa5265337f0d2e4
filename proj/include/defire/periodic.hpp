#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "defire/firing.hpp"
#include "defire/params.hpp"
#include "defire/trace.hpp"

namespace defire {

/// Which periodic branch applies: no_damp fires strictly above level zero
/// (period < 1), damp waits at level zero before every firing (period >= 1).
enum class OrbitBranch { no_damp, damp };

inline const char* to_string(OrbitBranch b) {
  return b == OrbitBranch::no_damp ? "no_damp" : "damp";
}

/// The unique profile with a given lower trace whose trajectory repeats
/// after one full cycle of firings.
struct PeriodicOrbit {
  StepProfile profile;
  double period = 0.0;
  OrbitBranch branch = OrbitBranch::no_damp;
  /// Existence bound minus epsilon; +inf when the criterion is vacuous.
  /// Positive means the orbit exists with margin, negative means it does not.
  double existence_margin = 0.0;
};

struct ExistenceBound {
  /// Critical coupling for the trace; +inf sentinel when the criterion never
  /// binds (the parameter constraint epsilon < 1/eta is then the only limit).
  double bound;
  /// True when the infimum in the criterion is attained (always, for finite
  /// step traces); the orbit then exists iff epsilon is strictly below bound.
  bool strict;
};

/// Critical coupling above which no periodic profile with this trace exists.
/// Requires a trace with lower(1) > 0 (not a single all-covering plateau).
ExistenceBound existence_bound(const Trace& trace);

struct ConstructOutcome {
  std::optional<PeriodicOrbit> orbit;
  /// Epsilon sits exactly on the existence boundary: the cycle still
  /// attracts, but no profile solves the evolution equation (ghost orbit).
  bool ghost_candidate = false;
  ExistenceBound bound{0.0, true};
};

/// Builds the periodic profile for the trace, or none when the existence
/// criterion fails. The trace must tile (0,1] (finite step profile).
ConstructOutcome construct_periodic(const Trace& trace, const Params& params);

/// Closes the loop with the firing engine: L1 distance between the orbit
/// profile and its image under one full cycle, plus the period mismatch.
double verify_fixed_point(const PeriodicOrbit& orbit, const Params& params);

struct ScanRow {
  double epsilon;
  bool exists = false;
  bool ghost_candidate = false;
  std::optional<OrbitBranch> branch;
  std::optional<double> period;
  double bound = 0.0;
  bool strict = true;
};

struct ScanResult {
  std::vector<ScanRow> rows;
  /// Consecutive grid pair straddling the existence transition, when present.
  std::optional<std::pair<double, double>> transition_bracket;
};

/// Existence and orbit data across a grid of couplings at fixed eta.
ScanResult scan_epsilon(const Trace& trace, double eta, const std::vector<double>& grid);

}  // namespace defire
