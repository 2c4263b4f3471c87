#include "nls/bound_states.hpp"

#include <cmath>
#include <sstream>

#include "nls/error.hpp"

namespace nls {

namespace {

struct Work {
  const DiscreteOperator& op;
  const Vec& phi;
  double e;
  double delta;  // shift that keeps the banded factor away from singularity
};

double hnorm(const Vec& v, double h) { return std::sqrt(h * v.squaredNorm()); }

// F1 = (H - e - t f) psi - f phi + kappa (phi + t psi)^3
Vec residual_F1(const Work& w, double t, const Vec& psi, double f) {
  const Vec u = w.phi + t * psi;
  return w.op.apply(psi) - (w.e + t * f) * psi - f * w.phi +
         w.op.kappa.cwiseProduct(u.cwiseProduct(u).cwiseProduct(u));
}

// Bordered Jacobian [[A, -v], [h phi^T, 0]] with Keller elimination on a
// shifted factor and refinement against the exact operator.
class Bordered {
 public:
  Bordered(const Work& w, double t, const Vec& psi, double f) : w_(w) {
    const Vec u = w.phi + t * psi;
    A_.diag = w.op.H.diag.array() - (w.e + t * f) +
              3.0 * t * (w.op.kappa.array() * u.array().square());
    A_.o1 = w.op.H.o1;
    A_.o2 = w.op.H.o2;
    v_ = u;
    lu_ = BandLU(A_, w.delta);
    b_ = lu_.solve(v_);
    pb_ = w.op.h() * w.phi.dot(b_);
  }

  void solve(const Vec& r1, double r2, Vec& x, double& s) const {
    approx(r1, r2, x, s);
    const double scale = hnorm(r1, w_.op.h()) + std::abs(r2) + 1e-300;
    for (int it = 0; it < 8; ++it) {
      Vec R1 = r1 - (A_.apply(x) - v_ * s);
      const double R2 = r2 - w_.op.h() * w_.phi.dot(x);
      if (hnorm(R1, w_.op.h()) + std::abs(R2) < 1e-15 * scale) break;
      Vec dx;
      double ds;
      approx(R1, R2, dx, ds);
      x += dx;
      s += ds;
    }
  }

 private:
  void approx(const Vec& r1, double r2, Vec& x, double& s) const {
    const Vec a = lu_.solve(r1);
    s = (r2 - w_.op.h() * w_.phi.dot(a)) / pb_;
    x = a + s * b_;
  }

  const Work& w_;
  Penta A_;
  Vec v_;
  BandLU lu_;
  Vec b_;
  double pb_ = 0;
};

double shift_for(const EigenBasis& basis, int j) {
  double gap = -basis.e[j];
  for (int k = 0; k < basis.count(); ++k)
    if (k != j) gap = std::min(gap, std::abs(basis.e[k] - basis.e[j]));
  return 1e-3 * gap;
}

double relative_residual(const Work& w, double t, const Vec& psi, double f) {
  if (t == 0.0) return 0.0;
  const Vec F1 = residual_F1(w, t, psi, f);
  return t * hnorm(F1, w.op.h()) / hnorm(w.phi + t * psi, w.op.h());
}

BranchPoint newton(const Work& w, double t, Vec psi, double f, double tol, int max_newton) {
  BranchPoint p;
  const double h = w.op.h();
  double prev = std::numeric_limits<double>::infinity();
  for (int it = 0; it < max_newton; ++it) {
    const Vec F1 = residual_F1(w, t, psi, f);
    const double F2 = h * w.phi.dot(psi);
    const double rn = hnorm(F1, h) + std::abs(F2);
    if (!std::isfinite(rn) || rn > 1e6 * prev) break;
    prev = std::min(prev, rn);
    Bordered J(w, t, psi, f);
    Vec dx;
    double ds;
    J.solve(-F1, -F2, dx, ds);
    psi += dx;
    f += ds;
    p.iters = it + 1;
    const double step = hnorm(dx, h) / std::max(hnorm(psi, h), 1e-300);
    if (step < 1e-13 && std::abs(ds) <= 1e-13 * std::max(std::abs(f), 1e-300)) {
      p.converged = true;
      break;
    }
  }
  p.psi = psi;
  p.f = f;
  p.residual = relative_residual(w, t, psi, f);
  if (p.converged && p.residual > tol) p.converged = false;
  if (!std::isfinite(p.residual)) p.converged = false;
  return p;
}

void tangent(const Work& w, double t, const Vec& psi, double f, Vec& dpsi, double& df) {
  const Vec u = w.phi + t * psi;
  const Vec dFdt = -f * psi + 3.0 * w.op.kappa.cwiseProduct(u.cwiseProduct(u)).cwiseProduct(psi);
  Bordered J(w, t, psi, f);
  J.solve(-dFdt, 0.0, dpsi, df);
}

}  // namespace

BranchPoint solve_point(const DiscreteOperator& op, const EigenBasis& basis, int j, double t,
                        const Vec* psi0, double f0, double tol, int max_newton) {
  if (j < 0 || j >= basis.count()) fail(ErrorKind::domain, "mode index out of range");
  Work w{op, basis.phi[static_cast<size_t>(j)], basis.e[j], shift_for(basis, j)};
  Vec psi = psi0 ? *psi0 : Vec::Zero(op.size());
  if (!psi0) f0 = op.h() * (op.kappa.array() * w.phi.array().pow(4)).sum();
  return newton(w, t, psi, f0, tol, max_newton);
}

BoundStateFamily solve_branch(const DiscreteOperator& op, const EigenBasis& basis, int j,
                              const BranchOptions& opt) {
  if (j < 0 || j >= basis.count()) fail(ErrorKind::domain, "mode index out of range");
  if (opt.n_samples < 4) fail(ErrorKind::config, "branch needs at least 4 samples");
  Work w{op, basis.phi[static_cast<size_t>(j)], basis.e[j], shift_for(basis, j)};
  BoundStateFamily fam;
  fam.j = j;
  fam.e = basis.e[j];
  fam.h = op.h();
  fam.phi = w.phi;
  fam.kappa = op.kappa;

  // t = 0 is linear in (psi, f): one Newton step from zero is exact.
  BranchPoint p0 = solve_point(op, basis, j, 0.0, nullptr, 0.0, opt.tol, opt.max_newton);
  if (!p0.converged) fail(ErrorKind::convergence, "branch start at t = 0 did not converge");
  BranchSample s0;
  s0.psi = p0.psi;
  s0.f = p0.f;
  s0.newton_iters = p0.iters;
  tangent(w, 0.0, s0.psi, s0.f, s0.dpsi, s0.df);

  double rho_max = opt.rho_max;
  double last_good = 0.0;
  for (int halving = 0; halving <= opt.max_halvings; ++halving) {
    std::vector<BranchSample> out{s0};
    bool ok = true;
    for (int k = 0; k < opt.n_samples && ok; ++k) {
      const double rho =
          rho_max * std::pow(10.0, -opt.decades * (1.0 - double(k) / (opt.n_samples - 1)));
      const double t = rho * rho;
      // Predictor-corrector with sub-steps on failure.
      BranchSample prev = out.back();
      BranchPoint p;
      for (int sub : {1, 4, 16}) {
        BranchSample cur = prev;
        bool sub_ok = true;
        for (int m = 1; m <= sub; ++m) {
          const double tm = prev.t + (t - prev.t) * double(m) / sub;
          Vec guess = cur.psi + (tm - cur.t) * cur.dpsi;
          p = newton(w, tm, guess, cur.f + (tm - cur.t) * cur.df, opt.tol, opt.max_newton);
          if (!p.converged) {
            sub_ok = false;
            break;
          }
          cur.t = tm;
          cur.psi = p.psi;
          cur.f = p.f;
          tangent(w, tm, cur.psi, cur.f, cur.dpsi, cur.df);
        }
        if (sub_ok) break;
        p.converged = false;
      }
      if (!p.converged) {
        ok = false;
        break;
      }
      BranchSample s;
      s.rho = rho;
      s.t = t;
      s.psi = p.psi;
      s.f = p.f;
      s.residual = p.residual;
      s.newton_iters = p.iters;
      tangent(w, t, s.psi, s.f, s.dpsi, s.df);
      out.push_back(std::move(s));
      last_good = std::max(last_good, rho);
    }
    if (ok) {
      fam.samples = std::move(out);
      fam.halvings = halving;
      return fam;
    }
    rho_max *= 0.5;
  }
  std::ostringstream os;
  os << "branch " << j + 1 << " failed after " << opt.max_halvings
     << " halvings; last converged rho = " << last_good;
  fail(ErrorKind::branch_radius, os.str());
}

size_t BoundStateFamily::interval(double t) const {
  if (t < 0.0 || t > t_max() * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "amplitude |z| = " << std::sqrt(std::max(t, 0.0)) << " outside branch radius "
       << rho_max();
    fail(ErrorKind::branch_radius, os.str());
  }
  size_t lo = 0, hi = samples.size() - 1;
  while (hi - lo > 1) {
    const size_t mid = (lo + hi) / 2;
    if (samples[mid].t <= t)
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

void BoundStateFamily::interpolate(double t, Vec& psi, Vec& dpsi, double& f, double& df) const {
  const size_t i = interval(t);
  const BranchSample& a = samples[i];
  const BranchSample& b = samples[i + 1];
  const double d = b.t - a.t;
  const double s = std::clamp((t - a.t) / d, 0.0, 1.0);
  const double s2 = s * s, s3 = s2 * s;
  const double h00 = 2 * s3 - 3 * s2 + 1, h10 = s3 - 2 * s2 + s;
  const double h01 = -2 * s3 + 3 * s2, h11 = s3 - s2;
  const double g00 = (6 * s2 - 6 * s) / d, g10 = 3 * s2 - 4 * s + 1;
  const double g01 = (-6 * s2 + 6 * s) / d, g11 = 3 * s2 - 2 * s;
  psi = h00 * a.psi + h10 * d * a.dpsi + h01 * b.psi + h11 * d * b.dpsi;
  dpsi = g00 * a.psi + g10 * a.dpsi + g01 * b.psi + g11 * b.dpsi;
  f = h00 * a.f + h10 * d * a.df + h01 * b.f + h11 * d * b.df;
  df = g00 * a.f + g10 * a.df + g01 * b.f + g11 * b.df;
}

Vec BoundStateFamily::psi(double t) const {
  Vec p, dp;
  double f0, df0;
  interpolate(t, p, dp, f0, df0);
  return p;
}

double BoundStateFamily::f(double t) const {
  Vec p, dp;
  double f0, df0;
  interpolate(t, p, dp, f0, df0);
  return f0;
}

double BoundStateFamily::energy(double rho) const { return e + rho * rho * f(rho * rho); }

Vec BoundStateFamily::profile(double rho) const {
  const double t = rho * rho;
  return rho * (phi + t * psi(t));
}

CVec BoundStateFamily::evaluate(cplx z, double* E) const {
  const double t = std::norm(z);
  Vec p, dp;
  double f0, df0;
  interpolate(t, p, dp, f0, df0);
  if (E) *E = e + t * f0;
  return z * (phi + t * p).cast<cplx>();
}

Vec BoundStateFamily::qhat(double t) const { return t * psi(t); }

Vec BoundStateFamily::qhat_prime(double t) const {
  Vec p, dp;
  double f0, df0;
  interpolate(t, p, dp, f0, df0);
  return p + t * dp;
}

std::pair<CVec, CVec> BoundStateFamily::derivative_profiles(cplx z) const {
  const double t = std::norm(z);
  Vec p, dp;
  double f0, df0;
  interpolate(t, p, dp, f0, df0);
  const Vec qh = t * p;
  const Vec qhp = p + t * dp;
  CVec dz = (qh + t * qhp).cast<cplx>();
  CVec dzb = (z * z) * qhp.cast<cplx>();
  return {dz, dzb};
}

std::pair<CVec, CVec> BoundStateFamily::dQ(cplx z) const {
  auto [dq, dqb] = derivative_profiles(z);
  CVec dz = phi.cast<cplx>() + dq;
  return {dz + dqb, I * (dz - dqb)};
}

double BoundStateFamily::lambda(double t) const {
  if (t == 0.0) return 0.0;
  Vec p, dp;
  double f0, df0;
  interpolate(t, p, dp, f0, df0);
  const Vec u = phi + t * p;
  // On the branch H u = E u - t kappa u^3, so <H u, u> = E |u|^2 - t int kappa u^4.
  const double E = e + t * f0;
  const double quartic = h * (kappa.array() * u.array().pow(4)).sum();
  const double Hu_u = E * h * u.squaredNorm() - t * quartic;
  return t * (Hu_u - e) + 0.5 * t * t * quartic;
}

double BoundStateFamily::gamma(double t) const {
  if (t == 0.0) return 0.0;
  Vec p, dp;
  double f0, df0;
  interpolate(t, p, dp, f0, df0);
  return 3.0 * t * t * h * p.squaredNorm() + 2.0 * t * t * t * h * p.dot(dp);
}

double BoundStateFamily::dlambda(double t) const {
  Vec p, dp;
  double f0, df0;
  interpolate(t, p, dp, f0, df0);
  const double g = 3.0 * t * t * h * p.squaredNorm() + 2.0 * t * t * t * h * p.dot(dp);
  return (e + t * f0) * (1.0 + g) - e;
}

double stationary_residual(const DiscreteOperator& op, const CVec& Q, double E) {
  const double qn = std::sqrt(op.mass(Q));
  if (qn == 0.0) return 0.0;
  CVec r = op.apply(Q) - E * Q;
  for (Eigen::Index k = 0; k < Q.size(); ++k) r[k] += op.kappa[k] * std::norm(Q[k]) * Q[k];
  return std::sqrt(op.mass(r)) / qn;
}

namespace {

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

BranchCertificate certify(const BoundStateFamily& fam, const DiscreteOperator& op) {
  BranchCertificate c;
  const double rm = fam.rho_max();
  std::vector<double> xu, yu, xl, yl, tq, fq;
  for (size_t i = 1; i < fam.samples.size(); ++i) {
    const auto& s = fam.samples[i];
    const double qn = s.rho * s.t * std::sqrt(fam.h * s.psi.squaredNorm());
    if (s.rho >= rm / 10.0 * (1 - 1e-12)) {
      xu.push_back(std::log(s.rho));
      yu.push_back(std::log(qn));
    }
    if (s.rho <= rm / 10.0 * (1 + 1e-12)) {
      xl.push_back(std::log(s.rho));
      yl.push_back(std::log(qn));
    }
    if (s.rho >= rm / 16.0 * (1 - 1e-12) && s.rho <= rm / 4.0 * (1 + 1e-12)) {
      tq.push_back(s.t);
      fq.push_back(s.f);  // (E - e) / rho^2
    }
    double E = 0;
    CVec Q = fam.evaluate(s.rho, &E);
    c.max_residual = std::max(c.max_residual, stationary_residual(op, Q, E));
    c.max_orthogonality = std::max(
        c.max_orthogonality, std::abs(fam.h * fam.phi.dot(s.psi)) * s.rho * s.t);
  }
  c.q_exponent = fit_slope(xu, yu);
  c.q_exponent_low = fit_slope(xl, yl);
  // Quadratic least squares in t, value at t = 0.
  Eigen::MatrixXd A(static_cast<Eigen::Index>(tq.size()), 3);
  Vec b(static_cast<Eigen::Index>(tq.size()));
  for (size_t i = 0; i < tq.size(); ++i) {
    A(static_cast<Eigen::Index>(i), 0) = 1.0;
    A(static_cast<Eigen::Index>(i), 1) = tq[i];
    A(static_cast<Eigen::Index>(i), 2) = tq[i] * tq[i];
    b[static_cast<Eigen::Index>(i)] = fq[i];
  }
  c.quad_coefficient = A.colPivHouseholderQr().solve(b)[0];
  c.phi4 = fam.h * (fam.kappa.array() * fam.phi.array().pow(4)).sum();
  return c;
}

double rescaled_residual(const DiscreteOperator& op, const EigenBasis& basis,
                         const BoundStateFamily& fam_j, const BoundStateFamily& fam_k, cplx zj,
                         cplx zk) {
  double Ej = 0, Ek = 0;
  fam_j.evaluate(zj, &Ej);
  CVec Qk = fam_k.evaluate(zk, &Ek);
  const CVec phij = basis.phi[static_cast<size_t>(fam_j.j)].cast<cplx>();
  CVec qk = Qk - zk * fam_k.phi.cast<cplx>();
  CVec cub(Qk.size());
  for (Eigen::Index i = 0; i < Qk.size(); ++i) cub[i] = op.kappa[i] * std::norm(Qk[i]) * Qk[i];
  const double dEj = Ej - fam_j.e;
  const cplx qphi = op.dot(qk, phij);
  const cplx cphi = op.dot(cub, phij);
  const cplx total = Ej * qphi + cphi - Ek * qphi - dEj * qphi;
  const double scale = (std::abs(Ej) + std::abs(Ek)) * std::abs(qphi) + std::abs(cphi);
  return scale == 0.0 ? 0.0 : std::abs(total) / scale;
}

}  // namespace nls
