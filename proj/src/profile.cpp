#include "defire/profile.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace defire {

namespace {
constexpr double kLengthTol = 1e-12;
}

std::vector<double> StepProfile::boundaries() const {
  std::vector<double> b(lengths.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    acc += lengths[i];
    b[i] = acc;
  }
  return b;
}

double StepProfile::mean_level() const {
  double m = 0.0;
  for (std::size_t i = 0; i < lengths.size(); ++i) m += lengths[i] * levels[i];
  return m;
}

std::string ValidationReport::message() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < issues.size(); ++i) {
    if (i) os << "; ";
    os << issues[i];
  }
  return os.str();
}

ValidationReport validate_profile(const StepProfile& profile, const Params& params) {
  return validate_profile(profile, params.epsilon, params.eta);
}

ValidationReport validate_profile(const StepProfile& profile, double epsilon, double eta) {
  ValidationReport report;
  auto add = [&report](const std::string& s) { report.issues.push_back(s); };

  bool params_ok = true;
  if (!(eta > 0.0 && eta < 1.0)) {
    add("eta out of range");
    params_ok = false;
  }
  if (params_ok && !(epsilon > 0.0 && epsilon < 1.0 / eta)) {
    add("epsilon out of range");
    params_ok = false;
  }

  const std::size_t n = profile.lengths.size();
  if (n == 0 || profile.levels.size() != n) {
    add("lengths and levels must be non-empty and of equal size");
    return report;
  }
  for (double l : profile.lengths) {
    if (!(l > 0.0)) {
      add("lengths must be strictly positive");
      break;
    }
  }
  const double total = std::accumulate(profile.lengths.begin(), profile.lengths.end(), 0.0);
  if (std::abs(total - 1.0) > kLengthTol) add("lengths do not sum to 1");

  bool increasing = true;
  for (std::size_t i = 0; i < n; ++i) {
    const double u = profile.levels[i];
    if (!(u > 0.0 && u <= 1.0)) {
      add("levels must lie in (0,1]");
      break;
    }
  }
  for (std::size_t i = 1; i < n; ++i) {
    if (!(profile.levels[i] > profile.levels[i - 1])) increasing = false;
  }
  if (!increasing) add("levels not strictly increasing");
  if (std::abs(profile.levels.back() - 1.0) > kLengthTol) add("last level must be 1");

  if (report.ok() && params_ok) {
    // Admissibility: the repressor level exceeds eta in every cluster. The
    // minimum is at the lowest cluster, but report each violation.
    const double mu = epsilon * eta;
    const double mean = profile.mean_level();
    for (std::size_t i = 0; i < n; ++i) {
      const double m = (1.0 - mu) * profile.levels[i] + mu * mean;
      if (!(m > eta)) {
        std::ostringstream os;
        os << "Mu(0+0) <= eta at cluster " << i;
        add(os.str());
      }
    }
  }
  return report;
}

void require_valid(const StepProfile& profile, const Params& params) {
  const ValidationReport report = validate_profile(profile, params);
  if (!report.ok()) throw std::invalid_argument("invalid profile: " + report.message());
}

double l1_distance(const StepProfile& p, const StepProfile& q) {
  if (p.lengths.empty() || q.lengths.empty()) {
    throw std::invalid_argument("l1_distance: empty profile");
  }
  const auto bp = p.boundaries();
  const auto bq = q.boundaries();
  if (std::abs(bp.back() - bq.back()) > 1e-9) {
    throw std::invalid_argument("l1_distance: partitions cover different total length");
  }
  // Walk the merged boundary set; boundaries within kLengthTol coincide.
  double dist = 0.0;
  double pos = 0.0;
  std::size_t i = 0, j = 0;
  while (i < bp.size() && j < bq.size()) {
    const double next = std::min(bp[i], bq[j]);
    const double w = next - pos;
    if (w > 0.0) dist += w * std::abs(p.levels[i] - q.levels[j]);
    if (bp[i] <= next + kLengthTol) ++i;
    if (bq[j] <= next + kLengthTol) ++j;
    pos = next;
  }
  return dist;
}

StepProfile rotate_profile(const StepProfile& profile, std::size_t k) {
  const std::size_t n = profile.size();
  if (k >= n) throw std::invalid_argument("rotate_profile: k out of range");
  StepProfile out;
  out.lengths.reserve(n);
  out.levels.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t s = (i + k) % n;
    out.lengths.push_back(profile.lengths[s]);
    out.levels.push_back(profile.levels[s]);
  }
  return out;
}

StepProfile canonicalize(const StepProfile& profile, double tol) {
  StepProfile out;
  for (std::size_t i = 0; i < profile.size(); ++i) {
    if (!out.levels.empty() && std::abs(profile.levels[i] - out.levels.back()) <= tol) {
      out.lengths.back() += profile.lengths[i];
    } else {
      out.lengths.push_back(profile.lengths[i]);
      out.levels.push_back(profile.levels[i]);
    }
  }
  return out;
}

}  // namespace defire
