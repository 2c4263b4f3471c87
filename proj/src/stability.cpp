#include <cmath>

#include "nls/error.hpp"
#include "nls/stability.hpp"

namespace nls {

CurvePoint curve_psi(const DiscreteOperator& op, const Vec& phi1, const Vec& Q, double eps) {
  const double qq = op.dot(Q, Q), qp = op.dot(Q, phi1);
  CurvePoint c;
  c.g1 = (qq - qp * qp) / (qq * qq);
  c.g2 = -qp / qq;
  const double disc = 1.0 - c.g1 * eps * eps;
  if (!(disc > 0)) fail(ErrorKind::domain, "eps too large for the mass-preserving curve");
  c.beta = std::sqrt(disc) + c.g2 * eps;
  c.psi = c.beta * Q + eps * phi1;
  return c;
}

StationaryProfile stationary_profile(const Model& m, int j, double r) {
  if (j < 0 || j >= m.modes()) fail(ErrorKind::domain, "mode index out of range");
  const auto& fam = m.fam[static_cast<size_t>(j)];
  if (!(r >= 0) || r > fam.rho_max()) fail(ErrorKind::branch_radius, "amplitude outside the computed branch");
  const double t = r * r;
  const Vec psi0 = fam.psi(t);
  BranchPoint p = solve_point(m.op, m.basis, j, t, &psi0, fam.f(t));
  if (!p.converged) fail(ErrorKind::convergence, "stationary profile did not converge");
  StationaryProfile s;
  s.Q = r * (fam.phi + t * p.psi);
  s.E = fam.e + t * p.f;
  s.residual = stationary_residual(m.op, s.Q.cast<cplx>(), s.E);
  return s;
}

InstabilityReport instability_certificate(const Model& m, int j, double r, std::vector<double> eps) {
  if (j < 1) fail(ErrorKind::domain, "the instability curve needs an excited mode");
  if (!(r > 0)) fail(ErrorKind::domain, "amplitude must be positive");
  if (eps.empty())
    for (int k = 0; k < 8; ++k) eps.push_back(0.25 * r * std::pow(10.0, -double(7 - k) / 7.0));
  const auto& op = m.op;
  const StationaryProfile s = stationary_profile(m, j, r);
  const double E0 = op.energy(s.Q.cast<cplx>());
  const double M0 = op.dot(s.Q, s.Q);
  InstabilityReport rep;
  rep.j = j;
  rep.r = r;
  rep.target = m.basis.e[0] - m.basis.e[j];
  rep.negative = true;
  double num = 0, den = 0;
  for (double e : eps) {
    const CurvePoint c = curve_psi(op, m.basis.phi[0], s.Q, e);
    rep.g1 = c.g1;
    rep.g2 = c.g2;
    const double gap = op.energy(c.psi.cast<cplx>()) - E0;
    rep.eps.push_back(e);
    rep.beta.push_back(c.beta);
    rep.gap.push_back(gap);
    rep.mass_defect.push_back((op.dot(c.psi, c.psi) - M0) / M0);
    if (e > 0 && !(gap < 0)) rep.negative = false;
    num += gap * e * e;
    den += e * e * e * e;
  }
  rep.slope = den > 0 ? num / den : 0.0;
  return rep;
}

namespace {

// Euclidean residual of the pentadiagonal action; the grid weight cancels in ratios.
double rel_norm(const Vec& a, const Vec& b) { return a.norm() / b.norm(); }

}  // namespace

PositivityReport ground_positivity(const Model& m, double rho) {
  if (!(rho > 0)) fail(ErrorKind::domain, "positivity check needs rho > 0");
  const StationaryProfile s = stationary_profile(m, 0, rho);
  const Vec q2k = m.op.kappa.cwiseProduct(s.Q.cwiseAbs2());
  Penta lm = m.op.H, lp = m.op.H;
  lm.diag.array() += q2k.array() - s.E;
  lp.diag.array() += 3.0 * q2k.array() - s.E;

  PositivityReport r;
  r.rho = rho;
  r.E = s.E;
  const Vec ev = band_eigenvalues_index(lm, 1, 2);
  r.lminus0 = ev[0];
  r.lminus1 = ev[1];
  r.lplus0 = band_eigenvalues_index(lp, 1, 1)[0];
  r.kernel_residual = rel_norm(lm.apply(s.Q), s.Q);
  const Vec v = inverse_iteration(lm, r.lminus0);
  r.overlap = std::abs(v.dot(s.Q)) / s.Q.norm();
  r.stable = r.lminus1 > 0 && r.lplus0 > 0;
  return r;
}

}  // namespace nls
