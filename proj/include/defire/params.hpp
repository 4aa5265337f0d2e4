#pragma once

#include <stdexcept>

namespace defire {

/// Model parameters: coupling strength epsilon and firing threshold eta.
///
/// Admissible range is 0 < eta < 1 and 0 < epsilon < 1/eta, which keeps the
/// diffusion coefficient mu = epsilon*eta inside (0,1) and repressor levels
/// non-negative.
struct Params {
  double epsilon;
  double eta;

  Params(double epsilon_, double eta_) : epsilon(epsilon_), eta(eta_) {
    if (!(eta > 0.0 && eta < 1.0)) {
      throw std::invalid_argument("eta out of range (0,1)");
    }
    if (!(epsilon > 0.0 && epsilon < 1.0 / eta)) {
      throw std::invalid_argument("epsilon out of range (0,1/eta)");
    }
  }

  /// Diffusion coefficient epsilon*eta, always in (0,1).
  double mu() const { return epsilon * eta; }
};

}  // namespace defire
