#include "defire/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "defire/profile.hpp"

namespace defire {

namespace {

void check_lengths(const std::vector<double>& lengths) {
  if (lengths.size() < 2) {
    throw std::invalid_argument("companion coefficients need at least 2 clusters");
  }
  double total = 0.0;
  for (double l : lengths) {
    if (!(l > 0.0)) throw std::invalid_argument("lengths must be positive");
    total += l;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw std::invalid_argument("lengths must sum to 1");
  }
}

std::vector<double> rotated(const std::vector<double>& lengths, std::size_t j) {
  std::vector<double> out(lengths.size());
  for (std::size_t i = 0; i < lengths.size(); ++i) out[i] = lengths[(i + j) % lengths.size()];
  return out;
}

}  // namespace

BranchCoeffs branch_coeffs(const std::vector<double>& lengths, const Params& params,
                           std::size_t rotation) {
  check_lengths(lengths);
  if (rotation >= lengths.size()) {
    throw std::invalid_argument("branch_coeffs: rotation out of range");
  }
  const std::vector<double> l = rotated(lengths, rotation);
  const std::size_t n = l.size();
  const double mu = params.mu();

  BranchCoeffs out;
  out.plus.source = Branch::plus;
  out.minus.source = Branch::minus;
  out.plus.rotation = out.minus.rotation = rotation;
  out.plus.coeffs.resize(n - 1);
  out.minus.coeffs.resize(n - 1);

  double tail = 0.0;
  for (std::size_t m = n; m-- > 1;) {
    tail += l[m];
    out.plus.coeffs[m - 1] = 1.0 - mu * tail;
  }
  double partial = 0.0;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    partial += l[k + 1];
    out.minus.coeffs[k] = partial / (1.0 - l[0]);
  }
  return out;
}

Eigen::MatrixXd companion_matrix(const CompanionSpec& spec) {
  const std::size_t k = spec.coeffs.size();
  if (k == 0) throw std::invalid_argument("companion_matrix: empty coefficient vector");
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k),
                                            static_cast<Eigen::Index>(k));
  for (std::size_t i = 0; i + 1 < k; ++i) {
    m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i + 1)) = 1.0;
  }
  for (std::size_t i = 0; i < k; ++i) {
    m(static_cast<Eigen::Index>(k - 1), static_cast<Eigen::Index>(i)) = -spec.coeffs[i];
  }
  return m;
}

double spectral_radius(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("spectral_radius: non-square matrix");
  if (m.rows() == 0) throw std::invalid_argument("spectral_radius: empty matrix");
  if (m.rows() == 1) return std::abs(m(0, 0));
  const Eigen::VectorXcd eigenvalues = m.eigenvalues();
  double rho = 0.0;
  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
    rho = std::max(rho, std::abs(eigenvalues[i]));
  }
  return rho;
}

double gelfand_upper_bound(const Eigen::MatrixXd& m, int p) {
  if (m.rows() != m.cols()) throw std::invalid_argument("gelfand_upper_bound: non-square matrix");
  if (p < 1) throw std::invalid_argument("gelfand_upper_bound: p must be >= 1");
  Eigen::MatrixXd power = Eigen::MatrixXd::Identity(m.rows(), m.cols());
  for (int i = 0; i < p; ++i) power = power * m;
  const double norm = power.jacobiSvd().singularValues()(0);
  return std::pow(norm, 1.0 / p);
}

RatioBound jsr_ratio_bound(const std::vector<double>& lengths, const Params& params,
                           BranchSet branches) {
  check_lengths(lengths);
  double bound = 0.0;
  for (std::size_t j = 0; j < lengths.size(); ++j) {
    const BranchCoeffs coeffs = branch_coeffs(lengths, params, j);
    auto fold = [&bound](const std::vector<double>& a) {
      for (std::size_t i = 0; i < a.size(); ++i) {
        const double next = i + 1 < a.size() ? a[i + 1] : 1.0;
        bound = std::max(bound, a[i] / next);
      }
    };
    if (branches != BranchSet::minus_only) fold(coeffs.plus.coeffs);
    if (branches != BranchSet::plus_only) fold(coeffs.minus.coeffs);
  }
  return {bound, bound >= 1.0};
}

std::vector<RadiusSample> sample_product_radius(const std::vector<double>& lengths,
                                                const Params& params, std::size_t k,
                                                std::size_t trials, std::uint64_t seed,
                                                BranchSet branches) {
  if (k < 1) throw std::invalid_argument("sample_product_radius: k must be >= 1");
  if (trials < 1) throw std::invalid_argument("sample_product_radius: trials must be >= 1");
  check_lengths(lengths);

  std::vector<Eigen::MatrixXd> family;
  for (std::size_t j = 0; j < lengths.size(); ++j) {
    const BranchCoeffs coeffs = branch_coeffs(lengths, params, j);
    if (branches != BranchSet::minus_only) family.push_back(companion_matrix(coeffs.plus));
    if (branches != BranchSet::plus_only) family.push_back(companion_matrix(coeffs.minus));
  }
  const RatioBound bound = jsr_ratio_bound(lengths, params, branches);

  std::vector<RadiusSample> samples;
  samples.reserve(trials);
  for (std::size_t trial = 0; trial < trials; ++trial) {
    Lcg64 rng(seed + trial);
    Eigen::MatrixXd product =
        Eigen::MatrixXd::Identity(family.front().rows(), family.front().cols());
    for (std::size_t step = 0; step < k; ++step) {
      product = family[rng.next_index(family.size())] * product;
    }
    const double value = std::pow(spectral_radius(product), 1.0 / static_cast<double>(k));
    if (value > bound.bound + 1e-9) {
      std::ostringstream os;
      os << "sampled product radius " << value << " exceeds the ratio bound " << bound.bound;
      throw internal_error(os.str());
    }
    samples.push_back({k, value});
  }
  return samples;
}

double empirical_contraction(const std::vector<CycleResult>& cycles,
                             const StepProfile& reference) {
  if (reference.size() < 2) {
    throw std::invalid_argument("empirical_contraction: reference must have >= 2 clusters");
  }
  if (cycles.size() < 5) {
    throw std::invalid_argument("empirical_contraction: need at least 5 cycles");
  }

  // log distance against cumulative firing count; stop at float-precision
  // saturation.
  std::vector<double> xs, ys;
  double firings = 0.0;
  for (const CycleResult& cycle : cycles) {
    firings += static_cast<double>(cycle.firing_times.size());
    const double d = l1_distance(cycle.post_profile, reference);
    if (d < 1e-14) break;
    xs.push_back(firings);
    ys.push_back(std::log(d));
  }
  if (xs.size() < 3) {
    throw std::domain_error(
        "empirical_contraction: distances converged past float precision; too few points");
  }

  const std::size_t begin = xs.size() / 2;  // fit over the tail half
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(xs.size() - begin);
  for (std::size_t i = begin; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double denom = n * sxx - sx * sx;
  if (!(std::abs(denom) > 0.0)) {
    throw std::domain_error("empirical_contraction: degenerate fit");
  }
  const double slope = (n * sxy - sx * sy) / denom;
  return std::exp(slope);
}

}  // namespace defire
