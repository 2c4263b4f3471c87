#pragma once

#include <vector>

#include "nls/bound_states.hpp"
#include "nls/continuum.hpp"

namespace nls {

// Everything downstream of the linear problem: operator, eigenbasis and one
// nonlinear branch per eigenvalue.
struct Model {
  DiscreteOperator op;
  EigenBasis basis;
  std::vector<BoundStateFamily> fam;

  int modes() const { return basis.count(); }
  double h() const { return op.h(); }
  // Smallest branch radius over the modes.
  double branch_radius() const;
  // Q_{z_j} summed over j.
  CVec bound_sum(const CVec& z) const;
};

Model build_model(const DiscreteOperator& op, const EigenOptions& eig = {},
                  const BranchOptions& branch = {});

}  // namespace nls
