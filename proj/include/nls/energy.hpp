#pragma once

// Quartic truncation of E(sum_j Q_{z_j} + R[z] eta) in (z, eta):
//
//   sum_j (e_j |z_j|^2 + lambda_j(|z_j|^2)) + <H eta, conj eta> + S_4(z)
//   + 2 Re sum z^mu zbar^nu <G_{mu nu}, eta>
//   + int A |eta|^2 + 2 Re int B conj(eta)^2 + 2 Re int C |eta|^2 conj(eta)
//   + (1/2) int kappa |eta|^4
//
// with a = sum z_j phi_j, A = 2 kappa |a|^2, B = kappa a^2 / 2, C = kappa a.
// Terms linear in eta through a single Q_j vanish on H_c[z]; what remains is
// the cubic cross interaction collected in the vector terms.

#include <vector>

#include "nls/model.hpp"
#include "nls/resonance.hpp"

namespace nls {

cplx monomial_value(const Monomial& p, const CVec& z);

// coef z^mu zbar^nu; the list is closed under conjugation.
struct ScalarTerm {
  Monomial mono;
  cplx coef;
};

// z^mu zbar^nu <G, eta> + c.c.
struct VectorTerm {
  Monomial mono;
  CVec G;
};

struct QuadraticProfiles {
  Vec A;
  CVec B, C;
};

class HamiltonianExpansion {
 public:
  const Model* model = nullptr;
  int order = 4;
  std::vector<ScalarTerm> scalar;  // quartic cross terms S_4
  std::vector<VectorTerm> vector;  // cubic in z, linear in eta

  // sum e_j |z_j|^2 + lambda_j + S_4
  cplx scalar_part(const CVec& z) const;
  cplx vector_part(const CVec& z, const CVec& eta) const;
  QuadraticProfiles quadratic_profiles(const CVec& z) const;
  cplx eta_part(const CVec& z, const CVec& eta) const;
  // Complex so that reality can be checked; the energy is its real part.
  cplx evaluate(const CVec& z, const CVec& eta) const;
  double energy(const CVec& z, const CVec& eta) const { return evaluate(z, eta).real(); }
};

// truncation_order 2 keeps e_j|z_j|^2 + lambda_j + <H eta, conj eta>; 4 is the full form above.
HamiltonianExpansion expand_energy(const Model& m, int truncation_order = 4);

struct SymplecticCoefficients {
  std::vector<Vec> rho, gamma, varpi;  // per mode
};
SymplecticCoefficients symplectic_coefficients(const Model& m, const Vec& rho);

struct GaugeReport {
  double max_relative_change = 0;
  double max_imaginary = 0;  // relative
};
GaugeReport verify_gauge_structure(const HamiltonianExpansion& ex,
                                   const std::vector<std::pair<CVec, CVec>>& states,
                                   const std::vector<double>& angles);

}  // namespace nls
