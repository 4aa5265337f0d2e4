#include "defire/periodic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace defire {

namespace {

constexpr double kBoundaryTol = 1e-12;

// Ratio term of the existence criterion on the piece of the trace domain
// starting at x: (upper - lower) / (1 - upper(upper+0) + upper). Constant on
// plateaus, zero at isolated points.
double plateau_ratio(const Trace& trace, const Plateau& p) {
  const double next_upper = trace.upper_right_limit(p.hi);
  const double denom = 1.0 - next_upper + p.hi;
  return (p.hi - p.lo) / denom;
}

}  // namespace

ExistenceBound existence_bound(const Trace& trace) {
  const double utr1 = trace.lower(1.0);
  if (!(utr1 > 0.0)) {
    throw std::domain_error(
        "existence_bound: not applicable to a fully synchronized trace (lower(1) = 0)");
  }

  // Infimum of the trace-preservation ratio over (0, lower(1)). The ratio is
  // constant on every plateau and zero on gaps, so a finite enumeration is
  // exact and the infimum is attained.
  double inf_ratio = std::numeric_limits<double>::infinity();
  double pos = 0.0;
  for (const Plateau& p : trace.plateaus()) {
    if (p.lo > pos + kBoundaryTol && pos < utr1) inf_ratio = std::min(inf_ratio, 0.0);
    if (p.lo < utr1) inf_ratio = std::min(inf_ratio, plateau_ratio(trace, p));
    pos = p.hi;
  }
  if (pos < utr1 - kBoundaryTol) inf_ratio = std::min(inf_ratio, 0.0);
  if (trace.plateaus().empty()) inf_ratio = 0.0;  // purely increasing trace

  // Positivity of the lowest constructed level is a second, independent
  // constraint on the waiting branch: period - 1 < (1 - lower(1)) /
  // (1 - upper(0+0)). It coincides with the ratio infimum for uniform
  // traces but binds first on sufficiently lopsided ones.
  const double positivity_ratio = (1.0 - utr1) / (1.0 - trace.upper_right_limit(0.0));
  const double binding = std::min(inf_ratio, positivity_ratio);

  const double integral = trace.integral_lower();
  if (!(binding < 1.0)) {
    return {std::numeric_limits<double>::infinity(), true};
  }
  return {1.0 / (integral * (1.0 - binding)), true};
}

ConstructOutcome construct_periodic(const Trace& trace, const Params& params) {
  if (!trace.tiles_unit_interval()) {
    throw std::domain_error(
        "construct_periodic: trace must tile (0,1] (finite step profile)");
  }
  ConstructOutcome out;
  out.bound = existence_bound(trace);

  if (std::isfinite(out.bound.bound) &&
      std::abs(params.epsilon - out.bound.bound) <= kBoundaryTol * std::max(1.0, out.bound.bound)) {
    out.ghost_candidate = true;
    return out;
  }
  const bool exists = out.bound.strict ? params.epsilon < out.bound.bound
                                       : params.epsilon <= out.bound.bound;
  if (!exists) return out;

  const auto& plateaus = trace.plateaus();
  const double integral = trace.integral_lower();
  const double utr1 = trace.lower(1.0);

  PeriodicOrbit orbit;
  orbit.existence_margin = out.bound.bound - params.epsilon;
  orbit.profile.lengths.reserve(plateaus.size());
  orbit.profile.levels.reserve(plateaus.size());
  for (const Plateau& p : plateaus) orbit.profile.lengths.push_back(p.hi - p.lo);

  if (params.epsilon * integral < 1.0) {
    // Fires strictly above level zero; the period is below 1.
    orbit.branch = OrbitBranch::no_damp;
    orbit.period = (1.0 - params.eta) / (1.0 - params.mu() * integral);
    for (const Plateau& p : plateaus) {
      orbit.profile.levels.push_back(1.0 - orbit.period * (utr1 - p.lo));
    }
  } else {
    // Every cluster waits at level zero before firing; the period is >= 1
    // and does not involve eta.
    orbit.branch = OrbitBranch::damp;
    orbit.period = (2.0 * integral - 1.0 / params.epsilon) / integral;
    for (const Plateau& p : plateaus) {
      orbit.profile.levels.push_back((1.0 - p.hi) * (1.0 - orbit.period) + 1.0 - utr1 + p.lo);
    }
  }
  orbit.profile.levels.back() = 1.0;  // exact by construction; pin the float

  for (double u : orbit.profile.levels) {
    if (!(u > 0.0)) {
      throw internal_error("construct_periodic: non-positive level despite existence");
    }
  }
  out.orbit = std::move(orbit);
  return out;
}

double verify_fixed_point(const PeriodicOrbit& orbit, const Params& params) {
  const CycleResult cycle = full_cycle(orbit.profile, params);
  return l1_distance(cycle.post_profile, orbit.profile) +
         std::abs(cycle.return_time - orbit.period);
}

ScanResult scan_epsilon(const Trace& trace, double eta, const std::vector<double>& grid) {
  if (grid.empty()) throw std::invalid_argument("scan_epsilon: empty grid");
  for (double eps : grid) {
    if (!(eps > 0.0 && eps < 1.0 / eta)) {
      throw std::invalid_argument("scan_epsilon: grid value outside (0, 1/eta)");
    }
  }

  ScanResult result;
  result.rows.reserve(grid.size());
  for (double eps : grid) {
    const Params params(eps, eta);
    const ConstructOutcome outcome = construct_periodic(trace, params);
    ScanRow row;
    row.epsilon = eps;
    row.bound = outcome.bound.bound;
    row.strict = outcome.bound.strict;
    row.ghost_candidate = outcome.ghost_candidate;
    row.exists = outcome.orbit.has_value();
    if (outcome.orbit) {
      row.branch = outcome.orbit->branch;
      row.period = outcome.orbit->period;
    }
    result.rows.push_back(row);
  }
  for (std::size_t i = 1; i < result.rows.size(); ++i) {
    if (result.rows[i - 1].exists != result.rows[i].exists) {
      result.transition_bracket = {result.rows[i - 1].epsilon, result.rows[i].epsilon};
      break;
    }
  }
  return result;
}

}  // namespace defire
