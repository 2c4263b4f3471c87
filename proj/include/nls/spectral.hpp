#pragma once

#include <vector>

#include "nls/grid.hpp"

namespace nls {

struct EigenBasis {
  Vec e;                     // ascending, all < 0
  std::vector<Vec> phi;      // real, h sum phi^2 = 1, positive near r = 0
  double gap_tolerance = 0;  // absolute
  double h = 0;

  int count() const { return static_cast<int>(e.size()); }
  double min_gap() const;
};

struct EigenOptions {
  int max_states = 16;
  double gap_rel_tol = 1e-6;  // relative to |e_1|
};

EigenBasis eigenbasis(const DiscreteOperator& op, const EigenOptions& opt = {});

CVec project_continuous(const EigenBasis& basis, const CVec& f);
Vec project_continuous(const EigenBasis& basis, const Vec& f);

// x = (H - lambda)^{-1} f for lambda < 0 away from the point spectrum.
struct ResolventOptions {
  double collision_tol = -1.0;  // absolute; negative selects basis.gap_tolerance
  double residual_tol = 1e-10;
};
CVec resolvent_solve(const DiscreteOperator& op, const EigenBasis& basis, double lambda,
                     const CVec& f, const ResolventOptions& opt = {});

// x = (H - lambda)^{-1} P_c f restricted to the continuous subspace. Valid for
// every lambda < 0, including lambda = e_j, where the plain solve is singular.
CVec continuous_resolvent(const DiscreteOperator& op, const EigenBasis& basis, double lambda,
                          const CVec& f, double residual_tol = 1e-11);

// Numerov regular solution of w'' = (V - L) w on the grid nodes, w(0) = 0,
// w(h) = h. Returned without the r = 0 node.
Vec numerov_regular(const DiscreteOperator& op, double L);

// Heuristic for (H2): the zero-energy regular solution grows like a r + b
// outside the well; a near-vanishing slope signals a zero resonance.
struct ZeroEnergyReport {
  double slope = 0;
  double intercept = 0;
  double slope_ratio = 0;  // |a| r_max / (|a| r_max + |b|)
  bool flagged = false;
};
ZeroEnergyReport zero_energy_check(const DiscreteOperator& op, double flag_below = 0.05);

// Eigenvalues at n and 2n points combined for a 4th-order scheme.
Vec richardson4(const Vec& coarse, const Vec& fine);

}  // namespace nls
