#include "nls/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "nls/error.hpp"

namespace nls {

double EigenBasis::min_gap() const {
  double g = std::numeric_limits<double>::infinity();
  for (int j = 0; j + 1 < count(); ++j) g = std::min(g, e[j + 1] - e[j]);
  if (count() > 0) g = std::min(g, -e[count() - 1]);
  return g;
}

EigenBasis eigenbasis(const DiscreteOperator& op, const EigenOptions& opt) {
  EigenBasis b;
  b.h = op.h();
  const double vmin = op.V.minCoeff();
  const double lo = std::min(vmin, 0.0) - 1.0;
  Vec all = band_eigenvalues(op.H, lo, 0.0);
  // The open interval excludes a numerically zero eigenvalue from the box.
  std::vector<double> neg;
  for (Eigen::Index i = 0; i < all.size(); ++i)
    if (all[i] < 0.0) neg.push_back(all[i]);
  if (neg.empty()) {
    b.e.resize(0);
    return b;
  }
  std::sort(neg.begin(), neg.end());
  const int m = std::min<int>(static_cast<int>(neg.size()), opt.max_states);
  b.e.resize(m);
  for (int j = 0; j < m; ++j) b.e[j] = neg[static_cast<size_t>(j)];
  b.gap_tolerance = opt.gap_rel_tol * std::abs(b.e[0]);
  for (int j = 0; j + 1 < m; ++j) {
    if (b.e[j + 1] - b.e[j] < b.gap_tolerance) {
      std::ostringstream os;
      os << "eigenvalues " << b.e[j] << " and " << b.e[j + 1] << " closer than "
         << b.gap_tolerance;
      fail(ErrorKind::degenerate, os.str());
    }
  }
  const double sh = std::sqrt(op.h());
  for (int j = 0; j < m; ++j) {
    Vec v = inverse_iteration(op.H, b.e[j]);
    // Rayleigh refinement keeps e and phi mutually consistent.
    b.e[j] = v.dot(op.H.apply(v));
    for (int k = 0; k < j; ++k) v -= (v.dot(b.phi[k]) * op.h()) * b.phi[k];
    v /= v.norm() * sh;
    Eigen::Index first = 0;
    const double vmax = v.cwiseAbs().maxCoeff();
    while (first < v.size() && std::abs(v[first]) < 1e-6 * vmax) ++first;
    if (v[first] < 0.0) v = -v;
    b.phi.push_back(v);
  }
  return b;
}

CVec project_continuous(const EigenBasis& basis, const CVec& f) {
  CVec out = f;
  for (const Vec& p : basis.phi) {
    const cplx c = basis.h * (p.cast<cplx>().cwiseProduct(f)).sum();
    out -= c * p.cast<cplx>();
  }
  return out;
}

Vec project_continuous(const EigenBasis& basis, const Vec& f) {
  Vec out = f;
  for (const Vec& p : basis.phi) out -= (basis.h * p.dot(f)) * p;
  return out;
}

CVec resolvent_solve(const DiscreteOperator& op, const EigenBasis& basis, double lambda,
                     const CVec& f, const ResolventOptions& opt) {
  if (!(lambda < 0.0)) {
    std::ostringstream os;
    os << "resolvent at lambda = " << lambda << " lies in the continuous spectrum";
    fail(ErrorKind::spectrum_collision, os.str());
  }
  const double tol = opt.collision_tol >= 0.0 ? opt.collision_tol : basis.gap_tolerance;
  for (int j = 0; j < basis.count(); ++j) {
    if (std::abs(lambda - basis.e[j]) <= tol) {
      std::ostringstream os;
      os << "resolvent at lambda = " << lambda << " within " << tol << " of eigenvalue e_"
         << j + 1 << " = " << basis.e[j];
      fail(ErrorKind::spectrum_collision, os.str());
    }
  }
  BandLU lu(op.H, -lambda);
  CVec x = lu.solve(f);
  const double fn = f.norm();
  if (fn == 0.0) return x;
  for (int it = 0; it < 3; ++it) {
    CVec r = f - (op.apply(x) - lambda * x);
    if (r.norm() <= 0.1 * opt.residual_tol * fn) break;
    x += lu.solve(r);
  }
  const double res = (f - (op.apply(x) - lambda * x)).norm() / fn;
  if (res > opt.residual_tol) {
    std::ostringstream os;
    os << "resolvent residual " << res << " at lambda = " << lambda;
    fail(ErrorKind::convergence, os.str());
  }
  return x;
}

CVec continuous_resolvent(const DiscreteOperator& op, const EigenBasis& basis, double lambda,
                          const CVec& f, double residual_tol) {
  if (!(lambda < 0.0)) {
    std::ostringstream os;
    os << "resolvent at lambda = " << lambda << " lies in the continuous spectrum";
    fail(ErrorKind::spectrum_collision, os.str());
  }
  const CVec pf = project_continuous(basis, f);
  const double fn = pf.norm();
  if (fn == 0.0) return CVec::Zero(f.size());
  // Near an eigenvalue, factor at a shifted point and iterate on the residual
  // within P_c; the error contracts by delta / dist(lambda, [0, inf)).
  double near = std::numeric_limits<double>::infinity();
  for (int j = 0; j < basis.count(); ++j) near = std::min(near, std::abs(lambda - basis.e[j]));
  double delta = 0.0;
  if (near < 1e-3 * std::abs(lambda)) {
    double gap = std::abs(lambda);
    if (basis.count() > 1) gap = std::min(gap, basis.min_gap());
    delta = 1e-2 * gap;
  }
  const double ls = lambda - delta;
  BandLU lu(op.H, -ls);
  CVec x = CVec::Zero(f.size());
  double res = 0;
  for (int it = 0; it < 60; ++it) {
    // Residual correction; with delta > 0 this is the same fixed point.
    const CVec r = project_continuous(basis, CVec(pf - (op.apply(x) - lambda * x)));
    res = r.norm() / fn;
    if (res <= residual_tol) return x;
    x += project_continuous(basis, CVec(lu.solve(r)));
  }
  std::ostringstream os;
  os << "continuous resolvent residual " << res << " at lambda = " << lambda;
  fail(ErrorKind::convergence, os.str());
}

Vec numerov_regular(const DiscreteOperator& op, double L) {
  const Eigen::Index n = op.size();
  const double h = op.h(), h2 = h * h;
  auto f = [&](Eigen::Index k) {  // k = 0 is r = 0
    const double v = k == 0 ? op.potential(0.0) : op.V[k - 1];
    return 1.0 + h2 * (L - v) / 12.0;
  };
  Vec w(n + 1);
  w[0] = 0.0;
  w[1] = h;
  double fm = f(0), f0 = f(1);
  for (Eigen::Index k = 1; k < n; ++k) {
    const double fp = f(k + 1);
    w[k + 1] = ((12.0 - 10.0 * f0) * w[k] - fm * w[k - 1]) / fp;
    fm = f0;
    f0 = fp;
  }
  return w.tail(n);
}

ZeroEnergyReport zero_energy_check(const DiscreteOperator& op, double flag_below) {
  ZeroEnergyReport rep;
  Vec w = numerov_regular(op, 0.0);
  const Eigen::Index n = op.size();
  const Eigen::Index i0 = n / 2, i1 = (9 * n) / 10;
  // Least-squares line through the outer region, where V is below the floor.
  double sr = 0, sw = 0, srr = 0, srw = 0;
  const double m = static_cast<double>(i1 - i0);
  for (Eigen::Index k = i0; k < i1; ++k) {
    const double r = op.grid.r(k);
    sr += r;
    sw += w[k];
    srr += r * r;
    srw += r * w[k];
  }
  rep.slope = (m * srw - sr * sw) / (m * srr - sr * sr);
  rep.intercept = (sw - rep.slope * sr) / m;
  const double a = std::abs(rep.slope) * op.grid.r_max;
  rep.slope_ratio = a / (a + std::abs(rep.intercept));
  rep.flagged = rep.slope_ratio < flag_below;
  return rep;
}

Vec richardson4(const Vec& coarse, const Vec& fine) {
  const Eigen::Index m = std::min(coarse.size(), fine.size());
  return (16.0 * fine.head(m) - coarse.head(m)) / 15.0;
}

}  // namespace nls
