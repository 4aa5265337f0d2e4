#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "defire/params.hpp"

namespace defire {

/// Population profile with finitely many clusters ("steps").
///
/// Cluster n occupies a block of cells of total length lengths[n]; all of its
/// cells share the expression level levels[n]. Cells are labelled so that
/// levels increase with the cluster index, lengths sum to 1, and at cycle
/// boundaries the last cluster has just fired (level 1). Cells are never
/// enumerated individually: plateau arithmetic represents the continuum
/// exactly.
struct StepProfile {
  std::vector<double> lengths;
  std::vector<double> levels;

  std::size_t size() const { return lengths.size(); }

  /// Right cell boundary of each cluster (prefix sums of lengths).
  std::vector<double> boundaries() const;

  /// Mean field: sum of length*level over all clusters.
  double mean_level() const;
};

struct ValidationReport {
  std::vector<std::string> issues;
  bool ok() const { return issues.empty(); }
  /// All issues joined with "; " (empty when valid).
  std::string message() const;
};

/// Checks the shape invariants (positive lengths summing to 1, strictly
/// increasing levels in (0,1], last level 1) and the admissibility
/// conditions: epsilon < 1/eta and repressor level above eta in every
/// cluster. Violations are reported, not thrown.
ValidationReport validate_profile(const StepProfile& profile, const Params& params);

/// Same checks from raw parameter values, so out-of-range parameters are
/// themselves reported instead of failing Params construction.
ValidationReport validate_profile(const StepProfile& profile, double epsilon, double eta);

/// Throws std::invalid_argument with the report message when invalid.
void require_valid(const StepProfile& profile, const Params& params);

/// L1 distance between two profiles on (0,1]. Partitions that differ are
/// refined to the merged boundary set first, so profiles with different
/// cluster splits compare correctly. Throws when the partitions cannot be
/// aligned (total lengths disagree).
double l1_distance(const StepProfile& p, const StepProfile& q);

/// Cyclic relabeling that moves the first k clusters to the back.
/// Requires 0 <= k < N.
StepProfile rotate_profile(const StepProfile& profile, std::size_t k);

/// Merges adjacent clusters whose levels agree within tol; such cells form a
/// single group and never split.
StepProfile canonicalize(const StepProfile& profile, double tol = 1e-12);

}  // namespace defire
