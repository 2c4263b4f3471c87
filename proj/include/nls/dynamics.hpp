#pragma once

// Time evolution. The PDE i u_t = H u + kappa |u|^2 u is advanced by Strang
// splitting: exact nonlinear phase, Crank-Nicolson for H (optionally with an
// absorbing layer -iW), exact nonlinear phase. The reduced model is the
// resonant modulation system
//
//   i z_j' = (1 + varpi_j)(e_j z_j + d_zbar_j Z_0)
//            - sum_{c,d} nu_j z^(mu+beta) zbar^(nu+alpha) / zbar_j <R+(L_d) conj G_d, G_c>
//            - sum_{c,d} mu_j z^(nu+alpha) zbar^(mu+beta) / zbar_j <R-(L_d) G_d, conj G_c>
//
// with c = (mu, nu), d = (alpha, beta) running over the resonant channels.

#include <string>
#include <vector>

#include "nls/fgr.hpp"
#include "nls/modulation.hpp"

namespace nls {

struct TrajectoryRecord {
  std::vector<double> t;
  std::vector<CVec> z, zeta;
  std::vector<double> mass, energy, V;  // V = sum |e_j| |zeta_j|^2
  std::vector<double> eta_norm;
  std::vector<CVec> snapshots;
  bool truncated = false;
  std::string note;

  size_t size() const { return t.size(); }
  int modes() const { return z.empty() ? 0 : static_cast<int>(z[0].size()); }
  double max_mass_drift() const;    // relative to mass[0]
  double max_energy_drift() const;  // relative to |energy[0]|
};

struct PdeOptions {
  double dt = 0.0025;
  int sample_every = 40;
  bool absorber = true;
  double cap_fraction = 0.15;
  double cap_strength = 4.0;  // W0 = cap_strength * L_ref
  double L_ref = -1;          // |e_1| when negative
  bool snapshots = false;
  ChartOptions chart;
};

class ReducedModel;

// The reduced model, when given, supplies zeta at the sample times.
TrajectoryRecord integrate_pde(const Model& m, const CVec& u0, double T, const PdeOptions& opt = {},
                               const ReducedModel* reduced = nullptr);

// One Strang step, exposed for the kernel benchmark and tests.
class StrangStepper {
 public:
  StrangStepper(const DiscreteOperator& op, double dt, const Vec& W);
  void step(CVec& u) const;
  double dt() const { return dt_; }

 private:
  const DiscreteOperator* op_;
  double dt_;
  CVec diag_;  // H.diag - i W
  CBandLU lhs_;
  mutable CVec rhs_;
};

enum class ReducedIntegrator { split, rk4 };

struct ReducedOptions {
  bool varpi = true;
  bool damping = true;  // off keeps only the principal-value part of the couplings
  ReducedIntegrator integrator = ReducedIntegrator::split;
  LimitingOptions resolvent;
};

class ReducedModel {
 public:
  const EffectiveHamiltonian* H = nullptr;
  const FgrTable* fgr = nullptr;
  ReducedOptions opt;
  // Channels with nonzero profile.
  std::vector<Monomial> monos;
  std::vector<double> L;
  CMat K;  // K(d, c) = <R(L_d) conj G_d, G_c>, R = R+ or its principal value

  int modes() const { return H->model->modes(); }
  // Integrable phase rates Omega_j(|z|^2).
  Vec omega(const CVec& z) const;
  // Resonant coupling part of z'.
  CVec coupling(const CVec& z) const;
  CVec rhs(const CVec& z) const;
  double lyapunov(const CVec& zeta) const;
};

ReducedModel build_reduced(const EffectiveHamiltonian& H, const FgrTable& fgr,
                           const ReducedOptions& opt = {});

TrajectoryRecord integrate_reduced(const ReducedModel& rm, const CVec& z0, double T, double dt,
                                   int sample_every = 10);

// zeta from z, summing only over pairs of channels at different frequencies.
CVec zeta_transform(const ReducedModel& rm, const CVec& z);

struct LyapunovSeries {
  std::vector<double> V;
  std::vector<double> rate;  // 2 sum_L Gamma_L(zeta) at the samples
  double dissipation = 0;    // trapezoid integral of rate
  double delta_V = 0;        // V(T) - V(0)
  double closure = 0;        // |delta_V - dissipation|
  double max_decrease = 0;   // largest step-to-step drop of V
};
LyapunovSeries lyapunov_series(const TrajectoryRecord& traj, const FgrTable& fgr);

struct Verdict {
  std::string kind;  // "selected", "none", "inconclusive"
  int j0 = -1;
  std::vector<double> rho_plus;             // final-window means of |z_j|
  std::vector<std::vector<double>> window;  // per mode windowed means
  std::vector<double> decay_rate;           // -d log|z_j| / dt fitted on window means
  std::vector<bool> decaying;
  std::vector<double> final_change;         // relative change of the last two window means
};
// Windows of width window_fraction * T. A mode decays when its final mean is
// below tol times its first mean, or when the means drop strictly across all
// windows by at least min_trend relative; modes below 1e-3 sqrt(mass) count as absent.
Verdict selection_verdict(const TrajectoryRecord& traj, double window_fraction = 0.2, double tol = 0.2,
                          double min_trend = 1e-5);

struct DispersiveReport {
  std::vector<double> t, norm;
  double exponent = 0;  // fitted slope of log norm against log t
};
// Weighted norm ||<r>^-sigma e^{-iHt} R+(L) P_c v|| under the absorbing-layer evolution.
DispersiveReport dispersive_decay(const Model& m, double L, const CVec& v, double T, double dt,
                                  double sigma = 2.0);

}  // namespace nls
