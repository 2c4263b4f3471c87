#pragma once

// Coordinates u = sum_j Q_{z_j} + R[z] eta with eta orthogonal to every phi_j.
// H_c[z] is cut out by Im int conj(v) D_{jA} Q_{j z_j} = 0 (A = R, I) and
// R[z] f = f + sum_j (int B_j f + int C_j conj f) phi_j maps into it.

#include <vector>

#include "nls/model.hpp"

namespace nls {

struct ModulationState {
  CVec z;
  CVec eta;
  int iters = 0;
  double residual = 0;
};

class ROperator {
 public:
  CVec z;
  std::vector<CVec> B, C;
  Mat M;  // 2n x 2n constraint block, unknowns (Re alpha_j, Im alpha_j)
  Mat W;  // M^{-1}
  double condition = 1;

  cplx alpha(int j, const CVec& f, double h) const;
  CVec apply(const CVec& f, const EigenBasis& basis, double h) const;
};

// D_{jR} Q and D_{jI} Q at z_j, ordered (0R, 0I, 1R, ...).
std::vector<CVec> tangent_profiles(const Model& m, const CVec& z);

struct ChartOptions {
  double radius = -1;  // negative: half the branch radius
  double max_condition = 1e8;
  double tol = 1e-12;  // constraint residual relative to ||u||
  int max_newton = 30;
};

double chart_radius(const Model& m, const ChartOptions& opt = {});

ROperator build_r_operator(const Model& m, const CVec& z, const ChartOptions& opt = {});

// The same inverse by the Neumann series around z = 0; cross-check only.
Mat neumann_inverse(const Model& m, const CVec& z, int terms);

// max_{jA} |Im int conj(v) D_{jA} Q|, relative to ||v||.
double range_residual(const Model& m, const CVec& z, const CVec& v);

ModulationState decompose(const Model& m, const CVec& u, const ChartOptions& opt = {});
CVec synthesize(const Model& m, const ModulationState& s, const ChartOptions& opt = {});

}  // namespace nls
