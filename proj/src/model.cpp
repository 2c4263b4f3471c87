#include "nls/model.hpp"

#include <algorithm>
#include <limits>

namespace nls {

double Model::branch_radius() const {
  double r = std::numeric_limits<double>::infinity();
  for (const auto& f : fam) r = std::min(r, f.rho_max());
  return r;
}

CVec Model::bound_sum(const CVec& z) const {
  CVec u = CVec::Zero(op.size());
  for (int j = 0; j < modes(); ++j) u += fam[static_cast<size_t>(j)].evaluate(z[j]);
  return u;
}

Model build_model(const DiscreteOperator& op, const EigenOptions& eig, const BranchOptions& branch) {
  Model m{op, eigenbasis(op, eig), {}};
  for (int j = 0; j < m.basis.count(); ++j) m.fam.push_back(solve_branch(op, m.basis, j, branch));
  return m;
}

}  // namespace nls
