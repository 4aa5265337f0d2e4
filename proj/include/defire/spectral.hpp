#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "defire/firing.hpp"
#include "defire/params.hpp"

namespace defire {

/// Coefficient vector of one linearized firing-map piece, after the
/// difference change of variables that turns the derivative into a companion
/// matrix. K = N-1 coefficients for an N-cluster length distribution.
struct CompanionSpec {
  std::vector<double> coeffs;  ///< a_1..a_K, positive, non-decreasing
  Branch source = Branch::plus;
  std::size_t rotation = 0;
};

struct BranchCoeffs {
  CompanionSpec plus;
  CompanionSpec minus;
};

/// Coefficient vectors of both branches for the length list rotated by j:
///   a_n(+) = 1 - eps*eta * sum_{m>n} l_m
///   a_n(-) = (sum_{m=2}^{n+1} l_m) / (1 - l_1)
BranchCoeffs branch_coeffs(const std::vector<double>& lengths, const Params& params,
                           std::size_t rotation);

/// K x K companion matrix: ones on the superdiagonal, last row -a_1..-a_K.
Eigen::MatrixXd companion_matrix(const CompanionSpec& spec);

/// Largest eigenvalue modulus. Computed from the eigenvalue decomposition;
/// see gelfand_upper_bound for the norm-based sanity bracket.
double spectral_radius(const Eigen::MatrixXd& m);

/// ||m^p||_2^(1/p); an upper bound on the spectral radius for every p >= 1,
/// converging down to it. Used as an independent cross-check.
double gelfand_upper_bound(const Eigen::MatrixXd& m, int p);

enum class BranchSet { plus_only, minus_only, both };

struct RatioBound {
  double bound;
  /// Set when bound >= 1: the minus branch always contributes the ratio
  /// a_{N-1}/1 = 1, so the two-branch bound is uninformative as computed.
  bool flagged;
};

/// Consecutive-coefficient ratio bound on the joint spectral radius of the
/// companion family over all rotations of the length list (with a_{K+1} = 1).
RatioBound jsr_ratio_bound(const std::vector<double>& lengths, const Params& params,
                           BranchSet branches = BranchSet::both);

/// 64-bit linear congruential generator, pinned for bit-exact
/// reproducibility: x <- 6364136223846793005*x + 1442695040888963407 mod 2^64,
/// high 32 bits used per draw.
struct Lcg64 {
  std::uint64_t state;

  explicit Lcg64(std::uint64_t seed) : state(seed) {}

  std::uint32_t next_u32() {
    state = 6364136223846793005ULL * state + 1442695040888963407ULL;
    return static_cast<std::uint32_t>(state >> 32);
  }
  std::uint64_t next_index(std::uint64_t m) { return next_u32() % m; }
  /// Uniform double in [0,1) with 32 bits of randomness.
  double next_unit() { return next_u32() * 0x1.0p-32; }
};

struct RadiusSample {
  std::size_t k;  ///< word length
  double value;   ///< SpecRad(product)^(1/k)
};

struct ContractionEstimate {
  double ratio_bound = 0.0;
  bool flagged = false;
  std::vector<RadiusSample> samples;
  std::optional<double> empirical_rho;
};

/// Draws `trials` uniform random words of length k over the companion family
/// (all rotations, selected branches) and records SpecRad(product)^(1/k).
/// Trial i uses seed+i, so trials are independent and order-insensitive.
/// Throws internal_error if any sample exceeds the ratio bound by more than
/// 1e-9 (that inequality is a theorem).
std::vector<RadiusSample> sample_product_radius(const std::vector<double>& lengths,
                                                const Params& params, std::size_t k,
                                                std::size_t trials, std::uint64_t seed,
                                                BranchSet branches = BranchSet::both);

/// Per-firing contraction rate of a simulated approach to a periodic
/// profile: least-squares slope of log L1-distance against the cumulative
/// firing count, fitted over the tail half of the series, exponentiated.
/// Distances below 1e-14 are truncated; at least 3 usable cycles of at
/// least 5 provided are required.
double empirical_contraction(const std::vector<CycleResult>& cycles,
                             const StepProfile& reference);

}  // namespace defire
