#pragma once

#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "defire/params.hpp"
#include "defire/profile.hpp"

namespace defire {

/// Raised when the engine reaches a state the model forbids (a bug, not a
/// caller error).
struct internal_error : std::logic_error {
  using std::logic_error::logic_error;
};

/// Which branch of the firing-time formula applied: plus fires at positive
/// level, minus fires from level zero (possibly as a merged group).
enum class Branch { plus, minus };

inline const char* to_string(Branch b) { return b == Branch::plus ? "plus" : "minus"; }

/// One firing event of the leading cluster(s).
struct FiringOutcome {
  double firing_time = 0.0;      ///< elapsed since the profile snapshot
  std::size_t merge_extent = 1;  ///< leading clusters that fire together
  Branch branch = Branch::plus;
  StepProfile post_profile;  ///< rotated: increasing levels, last level 1
};

struct MergeEvent {
  std::size_t firing_index;    ///< 0-based within the cycle
  std::size_t clusters_merged; ///< extent of the merged group (>= 2)
};

/// One full cycle of firings: every cluster present at cycle start fires
/// exactly once (a merged group counts as one firing).
struct CycleResult {
  std::size_t cycle_index = 0;
  double return_time = 0.0;          ///< total elapsed over the cycle
  std::vector<double> firing_times;  ///< within-cycle instants, increasing
  std::vector<Branch> branches;      ///< per firing
  std::vector<std::size_t> extents;  ///< per firing
  StepProfile post_profile;
  std::vector<MergeEvent> merges;
  std::vector<std::string> warnings;  ///< measure-zero coincidences, logged

  // Per-cycle audit data (always cheap to collect).
  double max_zero_group_length = 0.0;  ///< largest group firing from level 0
  double max_plus_overshoot = -std::numeric_limits<double>::infinity();
  ///< max of firing_time - lowest level over plus firings (<= 0 expected)
  double min_sampled_repressor = std::numeric_limits<double>::infinity();
  ///< min of M over sampled interior instants; +inf when sampling is off
};

struct CycleOptions {
  std::size_t max_firings = 1'000'000;
  /// Interior sample count per inter-firing interval for the repressor-floor
  /// audit; 0 disables sampling.
  std::size_t repressor_samples = 0;
};

/// Repressor level of one cluster: (1-eps*eta)*u_i + eps*eta * mean.
double repressor_level(const StepProfile& profile, std::size_t cluster, const Params& params);

/// Tail excess at the right edge of `cluster`: sum over later clusters of
/// length*(level - level_of_cluster). Non-increasing in the cluster index.
double s_value(const StepProfile& profile, std::size_t cluster);

struct PlateauExtent {
  std::size_t extent;
  Branch branch;
};

/// Size of the first firing plateau: the leading clusters where
/// eps*S exceeds 1 fire together from level zero (branch minus); when
/// eps*S <= 1 already at the first cluster the firing happens at positive
/// level (branch plus, extent 1). Ties resolve to plus.
PlateauExtent plateau_extent(const StepProfile& profile, const Params& params);

/// Computes the next firing exactly:
///   plus:  T = (1-mu)*u_1 + mu*mean - eta             (fires at level u_1-T >= 0)
///   minus: T = (tail integral - 1/eps) / (1 - L)      (group of length L fires from 0)
/// and returns the rotated post-firing profile.
FiringOutcome first_firing(const StepProfile& profile, const Params& params);

/// Runs firings until every cluster present at cycle start has fired once.
CycleResult full_cycle(const StepProfile& profile, const Params& params,
                       const CycleOptions& options = {});

struct SimulateOptions {
  std::size_t n_cycles = 1;
  double tol = 1e-12;  ///< successive-cycle L1 distance defining convergence
  bool stop_when_converged = true;
  std::size_t max_firings_per_cycle = 1'000'000;
  std::size_t repressor_samples = 0;
  bool record_events = false;
};

struct FiringEvent {
  double t;  ///< absolute firing instant
  std::vector<std::size_t> fired_clusters;  ///< indices in the pre-firing profile
  std::vector<double> post_levels;
};

struct SimulationResult {
  std::vector<CycleResult> cycles;
  std::vector<double> l1_deltas;  ///< distance between successive post profiles
  bool converged = false;
  std::size_t merge_event_count = 0;
  std::size_t total_firings = 0;

  // Aggregated audits over the whole run.
  double min_sampled_repressor = std::numeric_limits<double>::infinity();
  double min_inter_firing_gap = std::numeric_limits<double>::infinity();
  double max_zero_group_length = 0.0;
  double max_plus_overshoot = -std::numeric_limits<double>::infinity();
  bool branch_plus_seen = false;
  bool branch_minus_seen = false;

  std::vector<FiringEvent> events;  ///< populated when record_events

  const StepProfile& final_profile() const { return cycles.back().post_profile; }
};

/// Repeated full cycles with convergence and audit bookkeeping.
SimulationResult simulate(const StepProfile& profile, const Params& params,
                          const SimulateOptions& options);

/// Absolute first-firing instants of each original cluster, per cycle start.
/// Only defined for merge-free runs (cluster identity is stable there).
std::vector<std::vector<double>> per_cluster_schedules(const SimulationResult& result);

/// Brute-force verification oracle: marches the levels with explicit
/// decrement and clamping at step dt, brackets the first step where the
/// minimal repressor level falls to eta, and bisects the bracket to dt/100.
/// Independent of the algebraic firing-time path.
double oracle_firing_time(const StepProfile& profile, const Params& params, double dt);

/// Level of one cluster at time t, reconstructed from its firing schedule:
/// (u0 - t)+ before the first firing, (1 - t + T_n)+ between firings.
/// The valid horizon extends one guaranteed inter-firing gap past the last
/// scheduled firing; beyond that the value would depend on unknown firings.
double evaluate_solution(const StepProfile& profile, const Params& params, std::size_t cluster,
                         double t, const std::vector<double>& schedule);

}  // namespace defire
