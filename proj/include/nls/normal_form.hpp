#pragma once

// One Birkhoff step on the quartic expansion. Non-resonant monomials are removed
// by the time-one flow of a real generating function
//
//   chi = sum b z^mu zbar^nu + sum (z^mu zbar^nu <B, eta> + c.c.)
//
// whose bracket with e_j|z_j|^2 + <H eta, conj eta> cancels them:
//   b = i a / ((mu - nu).e),   B = i (H - L)^{-1} P_c G,   L = (nu - mu).e.
// The flow is z' = -i (1 + varpi_j) d chi / d zbar_j, eta' = -i d chi / d conj(eta).

#include <functional>
#include <string>
#include <vector>

#include "nls/energy.hpp"
#include "nls/resonance.hpp"

namespace nls {

struct ScalarGenerator {
  Monomial mono;
  cplx b;
  double divisor = 0;  // (mu - nu).e
};

struct VectorGenerator {
  Monomial mono;
  CVec B;
  double L = 0;  // (nu - mu).e, negative
};

// level 1 targets the cubic radiation couplings, level 2 the quartic scalar
// monomials with mu != nu.
struct GeneratingFunction {
  int level = 0;
  std::vector<ScalarGenerator> scalar;
  std::vector<VectorGenerator> vector;

  bool empty() const { return scalar.empty() && vector.empty(); }
  cplx value(const CVec& z, const CVec& eta, double h) const;
  // Hamiltonian field at (z, eta).
  void field(const Model& m, const CVec& z, const CVec& eta, CVec& dz, CVec& deta) const;
};

GeneratingFunction solve_homological(const HamiltonianExpansion& ex, const ResonanceTable& table,
                                     int level);

// Max resolvent residual ||(H - L) B - i P_c G|| / ||G|| over the vector generators.
double homological_residual(const HamiltonianExpansion& ex, const GeneratingFunction& chi);

// Time-one flow by RK4.
void flow(const Model& m, const GeneratingFunction& chi, CVec& z, CVec& eta, int steps = 8);

// Energy in the new coordinates: E(synthesize(flow(z, eta))).
using EnergyFn = std::function<double(const CVec&, const CVec&)>;
EnergyFn exact_energy_fn(const Model& m);
EnergyFn transformed_energy_fn(const Model& m, const GeneratingFunction& chi, int steps = 8);

// Coefficient re-extraction from an energy function by a phase-torus DFT and a
// polynomial fit in the amplitude.
struct ProbeOptions {
  std::vector<double> amplitudes{0.015, 0.025, 0.04, 0.06};
  int torus = 8;
  double eps = 1e-4;  // central difference along eta
};
// Coefficient c of z^mu zbar^nu <G, v> (|nu| = |mu| + 1), with all |z_j| equal.
cplx probe_vector(const EnergyFn& E, int n, const Monomial& mono, const CVec& v,
                  const ProbeOptions& opt = {});
// Individual coefficients of monomials sharing one phase frequency mu - nu and
// one degree, from E(z, 0) on several amplitude ratios.
std::vector<cplx> probe_scalar(const EnergyFn& E, const std::vector<Monomial>& monos,
                               Eigen::Index eta_size, const ProbeOptions& opt = {});

struct ChannelCheck {
  Monomial mono;
  bool vector = false;
  double before = 0, after = 0;
  double ratio() const { return before == 0 ? 0 : std::abs(after) / std::abs(before); }
};

struct TransformReport {
  std::vector<ChannelCheck> targeted;
  std::vector<ChannelCheck> preserved;
  double min_annihilation = 0;   // min before/after over targeted channels
  double max_preserved_change = 0;
  double min_divisor = 0;        // smallest |divisor| applied
};

// Applies chi to the expansion: targeted terms are dropped from the returned
// expansion and the drop is verified by re-extraction from the exact energy.
HamiltonianExpansion apply_transform(const HamiltonianExpansion& ex, const GeneratingFunction& chi,
                                     const ResonanceTable& table, TransformReport* report = nullptr,
                                     const CVec* probe_direction = nullptr,
                                     const ProbeOptions& opt = {});

struct Channel {
  Monomial mono;
  CVec G;
  double L = 0;
  std::string source;  // "expansion" or "beyond truncation"
  double norm = 0;
};

class EffectiveHamiltonian {
 public:
  const Model* model = nullptr;
  Mat a;  // Z_0 = sum lambda_j + sum_{j<k} a_jk |z_j|^2 |z_k|^2, symmetric, zero diagonal
  std::vector<Channel> channels;
  std::vector<double> Lambda;
  std::vector<std::vector<int>> ML;  // indices into channels, aligned with Lambda

  double Z0(const CVec& z) const;
  // d Z_0 / d zbar_j
  CVec dZ0(const CVec& z) const;
  int frequency_index(double L) const;
};

EffectiveHamiltonian effective_hamiltonian(const HamiltonianExpansion& ex, const ResonanceTable& table);

}  // namespace nls
