#pragma once

#include <cstdint>
#include <vector>

#include "defire/params.hpp"
#include "defire/profile.hpp"
#include "defire/trace.hpp"

namespace defire {

/// First-firing-time function of a profile, one value per cluster.
struct FiringProfile {
  std::vector<double> lengths;
  std::vector<double> times;  ///< non-decreasing
};

/// Integral operator of the firing-time equation:
/// (L v)(x) = eps*eta * integral of v over (0, lower(x)]. Exact plateau sums;
/// `values` must match the trace partition.
std::vector<double> apply_L(const Trace& trace, const std::vector<double>& values,
                            const Params& params);

struct NeumannResult {
  FiringProfile firing;
  std::size_t iterations;
};

/// Solves (Id - L) T = rhs for the first-firing times by fixed-point
/// iteration T <- rhs + L T, starting from T = rhs, until the sup-norm change
/// drops to tol. Converges geometrically at rate eps*eta. The solution is
/// validated post hoc: every time must stay at or below its level (the
/// equation only describes firings that happen above level zero).
NeumannResult solve_T1_neumann(const StepProfile& profile, const Params& params, double tol);

/// One-cycle contraction constant 1 - mu + mu(e^mu - mu - 1) + mu^2/(1-mu);
/// below 1 exactly when mu < mu_critical().
double contraction_constant(double mu);

/// Positive solution of e^mu + mu^2/(1-mu) = 2, in (0.46, 0.47). Bisection
/// to 1e-12, cached.
double mu_critical();

/// Runs one full cycle on two same-trace profiles and returns the ratio of
/// the post-cycle to the pre-cycle L1 distance (0 when u = v). Verifies the
/// hypotheses through the engine: same lower trace, every firing above level
/// zero, no merges, eps*eta < mu_critical(). Throws internal_error if the
/// ratio exceeds contraction_constant(eps*eta) + 1e-9.
double verify_cycle_contraction(const StepProfile& u, const StepProfile& v,
                                const Params& params);

/// Discontinuous dependence of the first firing time on the initial profile.
/// The base profile holds `base_level` on (0,x1] and 1 above; the perturbed
/// profile depresses the lower half of the left plateau by 1/n. As n grows,
/// the firing times on (x1/2, x1] converge to a limit strictly above the
/// unperturbed value.
struct DiscontinuityDemo {
  double x1 = 0.0;
  double base_level = 0.0;
  std::uint64_t n = 0;  ///< 0 encodes the unperturbed limit profile itself

  double unperturbed_time = 0.0;         ///< T1 of the base profile's left plateau
  std::vector<double> perturbed_times;   ///< per cluster of the perturbed profile
  double limit_lower_region = 0.0;       ///< predicted limit on (0, x1/2]
  double limit_jump_region = 0.0;        ///< predicted limit on (x1/2, x1]
};

/// Requires eps <= 1 and a valid two-plateau base profile. n = 0 is the
/// infinite-n sentinel: the perturbed times are then the unperturbed ones.
DiscontinuityDemo discontinuity_limit(double x1, double base_level, const Params& params,
                                      std::uint64_t n);

}  // namespace defire
