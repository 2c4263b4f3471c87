#pragma once

// Nonlinear bound-state branches Q_z = z (phi + t psi(t)), E_z = e + t f(t),
// t = |z|^2, of H Q + kappa |Q|^2 Q = E Q with <psi, phi> = 0. The rescaled
// unknowns (psi, f) stay regular at t = 0, where psi solves
// (H - e) psi = -P kappa phi^3 and f = int kappa phi^4.

#include <utility>
#include <vector>

#include "nls/spectral.hpp"

namespace nls {

struct BranchOptions {
  double rho_max = 0.4;
  int n_samples = 33;
  double decades = 2.0;  // samples span rho_max 10^-decades .. rho_max
  double tol = 1e-10;    // relative residual of the stationary equation
  int max_newton = 25;
  int max_halvings = 8;
};

struct BranchSample {
  double rho = 0, t = 0;
  Vec psi, dpsi;  // psi(t) and d psi / dt
  double f = 0, df = 0;
  double residual = 0;
  int newton_iters = 0;
};

class BoundStateFamily {
 public:
  int j = 0;  // 0-based mode index
  double e = 0;
  double h = 0;
  Vec phi;
  Vec kappa;
  std::vector<BranchSample> samples;  // samples[0] is t = 0
  int halvings = 0;

  double rho_max() const { return samples.back().rho; }
  double t_max() const { return samples.back().t; }

  // Cubic Hermite interpolation in t.
  void interpolate(double t, Vec& psi, Vec& dpsi, double& f, double& df) const;
  Vec psi(double t) const;
  double f(double t) const;

  double energy(double rho) const;  // E_rho
  Vec profile(double rho) const;    // real Q_rho
  // Q_z = e^{i theta} Q_rho; throws branch_radius beyond rho_max.
  CVec evaluate(cplx z, double* E = nullptr) const;
  // q_hat(t) = t psi(t) and its t-derivative.
  Vec qhat(double t) const;
  Vec qhat_prime(double t) const;
  // (d_z q, d_zbar q) at z.
  std::pair<CVec, CVec> derivative_profiles(cplx z) const;
  // D_R Q and D_I Q (derivatives along Re z and Im z).
  std::pair<CVec, CVec> dQ(cplx z) const;

  // lambda(t) = E(Q) - e t, its t-derivative, and the symplectic coefficients.
  double lambda(double t) const;
  double dlambda(double t) const;
  double gamma(double t) const;
  double varpi(double t) const { return 1.0 / (1.0 + gamma(t)) - 1.0; }

 private:
  size_t interval(double t) const;
};

BoundStateFamily solve_branch(const DiscreteOperator& op, const EigenBasis& basis, int j,
                              const BranchOptions& opt = {});

// Fresh Newton solve at a single amplitude, warm-started from the branch
// when given. Returns (psi, f).
struct BranchPoint {
  Vec psi;
  double f = 0;
  double residual = 0;
  int iters = 0;
  bool converged = false;
};
BranchPoint solve_point(const DiscreteOperator& op, const EigenBasis& basis, int j, double t,
                        const Vec* psi0 = nullptr, double f0 = 0.0, double tol = 1e-10,
                        int max_newton = 25);

// ||H Q + kappa |Q|^2 Q - E Q|| / ||Q||
double stationary_residual(const DiscreteOperator& op, const CVec& Q, double E);

struct BranchCertificate {
  double q_exponent = 0;       // fitted over the upper decade
  double q_exponent_low = 0;   // fitted over the lower decade
  double quad_coefficient = 0; // (E - e)/rho^2 extrapolated to rho = 0
  double phi4 = 0;             // int kappa phi^4
  double max_residual = 0;
  double max_orthogonality = 0;
};
BranchCertificate certify(const BoundStateFamily& fam, const DiscreteOperator& op);

// e_j <q_k, phi_j> + <kappa |Q_k|^2 Q_k, phi_j> - E_k <q_k, phi_j>, written
// with E_j and its shift so that both sides of the identity appear; relative.
double rescaled_residual(const DiscreteOperator& op, const EigenBasis& basis,
                         const BoundStateFamily& fam_j, const BoundStateFamily& fam_k, cplx zj,
                         cplx zk);

}  // namespace nls
