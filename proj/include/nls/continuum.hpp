#pragma once

// Continuous-spectrum quantities at a positive energy L: the spectral density
// pairing <F, delta(H - L) conj G> and the boundary values (H - L -+ i0)^{-1}.
//
// Density convention: delta(H - L) = psi_L psi_L^T with psi_L the regular
// solution normalized to sin(k r + delta) / sqrt(pi k), k = sqrt(L), so that
// int dL delta(H - L) = P_c.

#include <string>
#include <vector>

#include "nls/spectral.hpp"

namespace nls {

enum class MeasureKind { generalized_eigenfunction, smoothed_eigensum };
const char* to_string(MeasureKind k);
MeasureKind measure_kind_from(const std::string& s);

struct SpectralMeasureBackend {
  MeasureKind kind = MeasureKind::generalized_eigenfunction;
  // generalized eigenfunction: amplitude fit window, fractions of r_max
  double match_from = 0.5;
  double match_to = 0.9;
  // smoothed eigensum: enlarged box and Gaussian widths in level spacings
  int box_factor = 6;
  std::vector<double> width_multiples{2.0, 3.0, 4.0};
  double extrap_tol = 1e-2;
};

class SpectralDensity {
 public:
  SpectralDensity(const DiscreteOperator& op, double L, const SpectralMeasureBackend& backend);
  // <F, delta(H - L) conj G>
  cplx pairing(const CVec& F, const CVec& G) const;
  double energy() const { return L_; }
  MeasureKind kind() const { return backend_.kind; }
  // Diagnostics of the last smoothed-eigensum evaluation.
  struct Trace {
    std::vector<double> widths;
    std::vector<cplx> values;
    cplx linear = 0, quadratic = 0;
  };
  const Trace& last_trace() const { return trace_; }

 private:
  cplx pairing_eigensum(const CVec& F, const CVec& G) const;

  SpectralMeasureBackend backend_;
  double L_ = 0;
  double h_ = 0;
  Vec psi_;                 // generalized eigenfunction on the grid
  Vec box_e_;               // box eigenvalues in the window
  std::vector<Vec> box_v_;  // their eigenvectors restricted to the grid
  std::vector<double> sigma_;
  mutable Trace trace_;
};

cplx delta_pairing(const DiscreteOperator& op, double L, const CVec& F, const CVec& G,
                   const SpectralMeasureBackend& backend = {});

enum class LimitMode { absorbing, epsilon };
const char* to_string(LimitMode m);
LimitMode limit_mode_from(const std::string& s);

struct LimitingOptions {
  LimitMode mode = LimitMode::absorbing;
  double cap_fraction = 0.15;  // layer width as a fraction of r_max
  double cap_strength = 4.0;   // W0 = cap_strength * L
  std::vector<double> eps{0.4, 0.2, 0.1};
  int box_factor = 6;
  double eps_tol = 5e-2;
  double interior_tol = 1e-6;
};

// W(r) = W0 ((r - r_c) / (r_max - r_c))^4 on r > r_c = (1 - fraction) r_max.
Vec absorber_profile(const RadialGrid& grid, double fraction, double W0);

// Factored boundary value of the resolvent at L, sign +1 for R^+ = (H - L - i0)^{-1}.
class LimitingResolvent {
 public:
  LimitingResolvent(const DiscreteOperator& op, const EigenBasis& basis, double L, int sign,
                    const LimitingOptions& opt = {});
  CVec apply(const CVec& f) const;
  double energy() const { return L_; }
  int sign() const { return sign_; }
  double last_interior_residual() const { return interior_residual_; }

 private:
  const DiscreteOperator* op_;
  const EigenBasis* basis_;
  LimitingOptions opt_;
  double L_;
  int sign_;
  CBandLU cap_lu_;
  Eigen::Index interior_end_ = 0;
  std::vector<CBandLU> eps_lu_;
  Eigen::Index box_n_ = 0;
  mutable double interior_residual_ = 0;
};

CVec limiting_resolvent(const DiscreteOperator& op, const EigenBasis& basis, double L,
                        const CVec& f, int sign, const LimitingOptions& opt = {});
// (1/2)(R^+ + R^-) f
CVec principal_value(const DiscreteOperator& op, const EigenBasis& basis, double L,
                     const CVec& f, const LimitingOptions& opt = {});

// Value at zero of the polynomial in s through the points (s_i, y_i).
cplx extrapolate_to_zero(const std::vector<double>& s, const std::vector<cplx>& y);
CVec extrapolate_to_zero(const std::vector<double>& s, const std::vector<CVec>& y);

}  // namespace nls
