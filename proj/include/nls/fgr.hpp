#pragma once

// Fermi Golden Rule quantities per radiating frequency L:
//   G_L(zeta) = sqrt(pi) sum_{M_L} zeta^mu zetabar^nu G_{mu nu}
//   Gamma_L   = L <delta(H - L) conj G_L, G_L>
// The pairings <delta(H - L) conj G_a, G_c> are stored as a Gram matrix per L.

#include <string>
#include <vector>

#include "nls/continuum.hpp"
#include "nls/normal_form.hpp"

namespace nls {

struct FgrLevel {
  double L = 0;
  std::vector<Monomial> monos;
  std::vector<CVec> G;
  CMat P;  // P(a, c) = <delta(H - L) conj G_a, G_c>
  Vec gram_eigenvalues;
};

struct FgrTable {
  const DiscreteOperator* op = nullptr;
  const EigenBasis* basis = nullptr;
  Vec e;
  double tau = 0;
  SpectralMeasureBackend backend;
  std::vector<FgrLevel> levels;

  // Index of the level at L within tau; domain error otherwise.
  int level_index(double L) const;
  const FgrLevel& level(double L) const { return levels[static_cast<size_t>(level_index(L))]; }
  // max over levels of ||P - P^H|| and of -min eig(P), relative to max |P|.
  double gram_defect() const;
};

// Channels with zero profile are kept; they contribute zero rows.
FgrTable build_fgr_table(const DiscreteOperator& op, const EigenBasis& basis,
                         const std::vector<Channel>& channels,
                         const SpectralMeasureBackend& backend = {});
FgrTable build_fgr_table(const EffectiveHamiltonian& H, const SpectralMeasureBackend& backend = {});

CVec g_l(const FgrTable& t, double L, const CVec& zeta);
double gamma_l(const FgrTable& t, double L, const CVec& zeta);
// sum over L of Gamma_L
double gamma_total(const FgrTable& t, const CVec& zeta);

struct H4Report {
  double c_low = 0, c_high = 0;
  int samples = 0;
  bool holds = false;  // c_low > threshold
};
// Ratio sum_L <delta conj G_L, G_L> / sum_M |zeta^(mu + nu)|^2 over the samples.
H4Report check_h4(const FgrTable& t, const std::vector<CVec>& samples, double threshold = 1e-8);
// Random zeta on spheres of the given radii.
std::vector<CVec> sphere_samples(int n, const std::vector<double>& radii, int per_radius, unsigned seed);

struct PvCheck {
  double residual = 0;  // |Im of the principal-value part|
  double scale = 0;     // sum of term magnitudes
  double relative() const { return scale > 0 ? residual / scale : 0.0; }
};
inline LimitingOptions epsilon_limit() {
  LimitingOptions o;
  o.mode = LimitMode::epsilon;
  return o;
}
// Principal value as the symmetric average of the epsilon resolvents.
PvCheck pv_cancellation_check(const FgrTable& t, double L, const CVec& zeta,
                              const LimitingOptions& opt = epsilon_limit());

}  // namespace nls
