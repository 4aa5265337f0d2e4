#include "defire/trace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace defire {

namespace {
constexpr std::size_t npos = static_cast<std::size_t>(-1);
}

Trace::Trace(std::vector<Plateau> plateaus) : plateaus_(std::move(plateaus)) {
  double prev = 0.0;
  for (const Plateau& p : plateaus_) {
    if (!(p.lo >= prev - 1e-15 && p.lo < p.hi && p.hi <= 1.0 + 1e-15)) {
      throw std::invalid_argument("trace plateaus must be disjoint, ordered, inside (0,1]");
    }
    prev = p.hi;
  }
}

bool Trace::tiles_unit_interval(double tol) const {
  if (plateaus_.empty()) return false;
  if (std::abs(plateaus_.front().lo) > tol) return false;
  if (std::abs(plateaus_.back().hi - 1.0) > tol) return false;
  for (std::size_t i = 1; i < plateaus_.size(); ++i) {
    if (std::abs(plateaus_[i].lo - plateaus_[i - 1].hi) > tol) return false;
  }
  return true;
}

std::size_t Trace::find(double x) const {
  // First plateau with hi >= x, then membership test lo < x <= hi.
  auto it = std::lower_bound(plateaus_.begin(), plateaus_.end(), x,
                             [](const Plateau& p, double v) { return p.hi < v; });
  if (it == plateaus_.end() || !(it->lo < x)) return npos;
  return static_cast<std::size_t>(it - plateaus_.begin());
}

std::size_t Trace::find_right(double x) const {
  // Plateau containing x+0: lo <= x < hi.
  auto it = std::upper_bound(plateaus_.begin(), plateaus_.end(), x,
                             [](double v, const Plateau& p) { return v < p.hi; });
  if (it == plateaus_.end() || !(it->lo <= x)) return npos;
  return static_cast<std::size_t>(it - plateaus_.begin());
}

double Trace::lower(double x) const {
  const std::size_t i = find(x);
  return i == npos ? x : plateaus_[i].lo;
}

double Trace::upper(double x) const {
  const std::size_t i = find(x);
  return i == npos ? x : plateaus_[i].hi;
}

double Trace::lower_right_limit(double x) const {
  const std::size_t i = find_right(x);
  return i == npos ? x : plateaus_[i].lo;
}

double Trace::upper_right_limit(double x) const {
  const std::size_t i = find_right(x);
  return i == npos ? x : plateaus_[i].hi;
}

namespace {

// Integral of x over the gaps between plateaus (isolated cells).
double gap_integral(const std::vector<Plateau>& ps) {
  double acc = 0.0;
  double pos = 0.0;
  for (const Plateau& p : ps) {
    if (p.lo > pos) acc += 0.5 * (p.lo * p.lo - pos * pos);
    pos = p.hi;
  }
  if (pos < 1.0) acc += 0.5 * (1.0 - pos * pos);
  return acc;
}

}  // namespace

double Trace::integral_lower() const {
  double acc = gap_integral(plateaus_);
  for (const Plateau& p : plateaus_) acc += p.lo * (p.hi - p.lo);
  return acc;
}

double Trace::integral_upper() const {
  double acc = gap_integral(plateaus_);
  for (const Plateau& p : plateaus_) acc += p.hi * (p.hi - p.lo);
  return acc;
}

Trace compute_traces(const StepProfile& profile) {
  if (profile.lengths.empty()) throw std::invalid_argument("compute_traces: empty profile");
  std::vector<Plateau> ps;
  ps.reserve(profile.size());
  double pos = 0.0;
  for (double l : profile.lengths) {
    if (!(l > 0.0)) throw std::invalid_argument("compute_traces: non-positive cluster length");
    ps.push_back({pos, pos + l});
    pos += l;
  }
  if (std::abs(pos - 1.0) > 1e-9) {
    throw std::invalid_argument("compute_traces: lengths do not sum to 1");
  }
  ps.back().hi = 1.0;  // absorb rounding in the running sum
  return Trace(std::move(ps));
}

double trace_integral(const Trace& trace) { return trace.integral_lower(); }

}  // namespace defire
