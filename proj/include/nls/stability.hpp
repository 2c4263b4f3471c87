#pragma once

// Variational checks on the nonlinear branches.
//
// Excited states: the curve Psi(eps) = beta(eps) Q + eps phi_1 keeps the mass
// of Q = Q_{j,r} and, for small eps and r, lowers the energy by about
// eps^2 (e_1 - e_j). Ground state: L_- = H - E + kappa Q^2 has kernel Q and is
// otherwise positive, and L_+ = H - E + 3 kappa Q^2 is positive.

#include <vector>

#include "nls/model.hpp"

namespace nls {

struct CurvePoint {
  Vec psi;
  double beta = 1;
  double g1 = 0, g2 = 0;
};

// Q is the real profile Q_{j,r}. Throws domain when 1 - g1 eps^2 <= 0.
CurvePoint curve_psi(const DiscreteOperator& op, const Vec& phi1, const Vec& Q, double eps);

// Stationary profile at amplitude r, refined by Newton from the branch.
struct StationaryProfile {
  Vec Q;
  double E = 0;  // frequency
  double residual = 0;
};
StationaryProfile stationary_profile(const Model& m, int j, double r);

struct InstabilityReport {
  int j = 0;
  double r = 0;
  double g1 = 0, g2 = 0;
  std::vector<double> eps, beta, gap, mass_defect;
  double slope = 0;   // least-squares gap / eps^2
  double target = 0;  // e_1 - e_j
  bool negative = false;

  double slope_error() const { return std::abs(slope - target) / std::abs(target); }
};

// Default eps grid: 8 log-spaced points over [r/40, r/4].
InstabilityReport instability_certificate(const Model& m, int j, double r, std::vector<double> eps = {});

struct PositivityReport {
  double rho = 0, E = 0;
  double lminus0 = 0, lminus1 = 0;  // two lowest eigenvalues of L_-
  double lplus0 = 0;                // lowest eigenvalue of L_+
  double kernel_residual = 0;       // ||L_- Q|| / ||Q||
  double overlap = 0;               // |<v, Q>| / ||Q|| for the lowest L_- eigenvector
  bool stable = false;              // lminus1 > 0 and lplus0 > 0
};
PositivityReport ground_positivity(const Model& m, double rho);

}  // namespace nls
