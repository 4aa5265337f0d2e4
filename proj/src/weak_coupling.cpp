#include "defire/weak_coupling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "defire/firing.hpp"

namespace defire {

std::vector<double> apply_L(const Trace& trace, const std::vector<double>& values,
                            const Params& params) {
  const auto& plateaus = trace.plateaus();
  if (values.size() != plateaus.size()) {
    throw std::invalid_argument("apply_L: values do not match the trace partition");
  }
  if (!trace.tiles_unit_interval()) {
    throw std::invalid_argument("apply_L: trace must tile (0,1]");
  }
  // lower(x) on plateau i is its left endpoint, so the integral over
  // (0, lower(x)] is the exact prefix sum of length*value.
  std::vector<double> out(values.size());
  const double mu = params.mu();
  double prefix = 0.0;
  for (std::size_t i = 0; i < plateaus.size(); ++i) {
    out[i] = mu * prefix;
    prefix += (plateaus[i].hi - plateaus[i].lo) * values[i];
  }
  return out;
}

NeumannResult solve_T1_neumann(const StepProfile& profile, const Params& params, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("solve_T1_neumann: tol must be positive");
  require_valid(profile, params);

  const Trace trace = compute_traces(profile);
  const std::size_t n = profile.size();
  const double mu = params.mu();
  const auto boundaries = profile.boundaries();

  // rhs_i = (1-mu) u_i - eta + mu (lower_i + integral of u over (lower_i, 1]).
  std::vector<double> rhs(n);
  double tail = 0.0;
  for (std::size_t i = n; i-- > 0;) {
    tail += profile.lengths[i] * profile.levels[i];
    const double lower = i == 0 ? 0.0 : boundaries[i - 1];
    rhs[i] = (1.0 - mu) * profile.levels[i] - params.eta + mu * (lower + tail);
  }

  std::vector<double> times = rhs;
  std::size_t iterations = 0;
  double change = std::numeric_limits<double>::infinity();
  while (change > tol) {
    const std::vector<double> lt = apply_L(trace, times, params);
    change = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double next = rhs[i] + lt[i];
      change = std::max(change, std::abs(next - times[i]));
      times[i] = next;
    }
    ++iterations;
    if (iterations > 10'000) {
      throw internal_error("solve_T1_neumann: iteration failed to converge");
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (times[i] > profile.levels[i] + 1e-12) {
      std::ostringstream os;
      os << "solve_T1_neumann: outside applicability regime (T > u at cluster " << i << ")";
      throw std::domain_error(os.str());
    }
    if (i > 0 && times[i] < times[i - 1] - 1e-12) {
      throw internal_error("solve_T1_neumann: firing times lost monotonicity");
    }
  }
  return {FiringProfile{profile.lengths, std::move(times)}, iterations};
}

double contraction_constant(double mu) {
  if (!(mu >= 0.0 && mu < 1.0)) {
    throw std::invalid_argument("contraction_constant: mu out of [0,1)");
  }
  return 1.0 - mu + mu * (std::exp(mu) - mu - 1.0) + mu * mu / (1.0 - mu);
}

double mu_critical() {
  static const double value = [] {
    auto f = [](double m) { return std::exp(m) + m * m / (1.0 - m) - 2.0; };
    double lo = 0.4, hi = 0.5;
    while (hi - lo > 1e-12) {
      const double mid = 0.5 * (lo + hi);
      (f(mid) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  }();
  return value;
}

namespace {

void require_same_trace(const StepProfile& u, const StepProfile& v) {
  const auto bu = u.boundaries();
  const auto bv = v.boundaries();
  if (bu.size() != bv.size()) {
    throw std::invalid_argument("profiles have different lower traces");
  }
  for (std::size_t i = 0; i < bu.size(); ++i) {
    if (std::abs(bu[i] - bv[i]) > 1e-12) {
      throw std::invalid_argument("profiles have different lower traces");
    }
  }
}

// Full cycle under the contraction hypotheses: every firing above level
// zero (branch plus), no merges, and a clean cycle boundary, so the trace
// is preserved and the next cycle starts strictly later.
CycleResult hypothesis_cycle(const StepProfile& p, const Params& params) {
  CycleResult cycle = full_cycle(p, params);
  if (!cycle.merges.empty()) {
    throw std::domain_error("contraction hypotheses violated: grouping occurred");
  }
  for (Branch b : cycle.branches) {
    if (b != Branch::plus) {
      throw std::domain_error("contraction hypotheses violated: firing from level zero");
    }
  }
  if (!cycle.warnings.empty()) {
    throw std::domain_error("contraction hypotheses violated: coincident cycle boundary");
  }
  return cycle;
}

}  // namespace

double verify_cycle_contraction(const StepProfile& u, const StepProfile& v,
                                const Params& params) {
  if (!(params.mu() < mu_critical())) {
    throw std::invalid_argument("verify_cycle_contraction requires eps*eta < mu_critical()");
  }
  require_valid(u, params);
  require_valid(v, params);
  require_same_trace(u, v);

  const double before = l1_distance(u, v);
  if (before == 0.0) return 0.0;

  const CycleResult cu = hypothesis_cycle(u, params);
  const CycleResult cv = hypothesis_cycle(v, params);
  const double after = l1_distance(cu.post_profile, cv.post_profile);
  const double ratio = after / before;

  const double rho = contraction_constant(params.mu());
  if (ratio > rho + 1e-9) {
    std::ostringstream os;
    os << "cycle contraction ratio " << ratio << " exceeds the constant " << rho;
    throw internal_error(os.str());
  }
  return ratio;
}

DiscontinuityDemo discontinuity_limit(double x1, double base_level, const Params& params,
                                      std::uint64_t n) {
  if (!(params.epsilon <= 1.0)) {
    throw std::invalid_argument("discontinuity_limit requires eps <= 1");
  }
  if (!(x1 > 0.0 && x1 < 1.0)) {
    throw std::invalid_argument("discontinuity_limit: x1 must lie in (0,1)");
  }
  const StepProfile base{{x1, 1.0 - x1}, {base_level, 1.0}};
  require_valid(base, params);

  DiscontinuityDemo demo;
  demo.x1 = x1;
  demo.base_level = base_level;
  demo.n = n;

  // T1 of the left plateau of the base profile (branch plus, eps <= 1).
  demo.unperturbed_time = first_firing(base, params).firing_time;
  demo.limit_lower_region = demo.unperturbed_time;
  demo.limit_jump_region =
      demo.unperturbed_time +
      params.mu() * (x1 / 2.0) * (demo.unperturbed_time - base_level + 1.0);

  if (n == 0) {
    demo.perturbed_times = {demo.unperturbed_time, demo.unperturbed_time};
    return demo;
  }

  const double depressed = base_level - 1.0 / static_cast<double>(n);
  if (!(depressed > 0.0)) {
    throw std::invalid_argument("discontinuity_limit: depression reaches level zero");
  }
  const StepProfile perturbed{{x1 / 2.0, x1 / 2.0, 1.0 - x1}, {depressed, base_level, 1.0}};

  // With eps <= 1 there are no merges, so within-cycle firing k belongs to
  // cluster k: the cycle's firing instants are exactly T1 per cluster.
  const CycleResult cycle = full_cycle(perturbed, params);
  demo.perturbed_times = cycle.firing_times;
  return demo;
}

}  // namespace defire
