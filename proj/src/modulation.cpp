#include "nls/modulation.hpp"

#include <cmath>
#include <sstream>

#include "nls/error.hpp"

namespace nls {

namespace {

// Rows (l, A), columns (Re alpha_j, Im alpha_j):
// Im( conj(alpha_j) p ) = Re(alpha_j) Im p - Im(alpha_j) Re p, p = int phi_j d_{lA}.
Mat constraint_block(const Model& m, const std::vector<CVec>& d) {
  const int n = m.modes();
  Mat M(2 * n, 2 * n);
  for (int r = 0; r < 2 * n; ++r)
    for (int j = 0; j < n; ++j) {
      const cplx p = m.op.dot(m.basis.phi[static_cast<size_t>(j)].cast<cplx>(), d[static_cast<size_t>(r)]);
      M(r, 2 * j) = p.imag();
      M(r, 2 * j + 1) = -p.real();
    }
  return M;
}

double hnorm(const Model& m, const CVec& v) { return std::sqrt(m.op.mass(v)); }

void check_radius(const Model& m, const CVec& z, double radius) {
  for (Eigen::Index j = 0; j < z.size(); ++j)
    if (std::abs(z[j]) > radius) {
      std::ostringstream os;
      os << "|z_" << j + 1 << "| = " << std::abs(z[j]) << " exceeds chart radius " << radius;
      fail(ErrorKind::chart, os.str());
    }
  (void)m;
}

}  // namespace

cplx ROperator::alpha(int j, const CVec& f, double h) const {
  const auto& b = B[static_cast<size_t>(j)];
  const auto& c = C[static_cast<size_t>(j)];
  return h * (b.cwiseProduct(f).sum() + c.cwiseProduct(f.conjugate()).sum());
}

CVec ROperator::apply(const CVec& f, const EigenBasis& basis, double h) const {
  CVec out = f;
  for (int j = 0; j < basis.count(); ++j)
    out += alpha(j, f, h) * basis.phi[static_cast<size_t>(j)].cast<cplx>();
  return out;
}

std::vector<CVec> tangent_profiles(const Model& m, const CVec& z) {
  std::vector<CVec> d;
  for (int j = 0; j < m.modes(); ++j) {
    auto [dr, di] = m.fam[static_cast<size_t>(j)].dQ(z[j]);
    d.push_back(std::move(dr));
    d.push_back(std::move(di));
  }
  return d;
}

double chart_radius(const Model& m, const ChartOptions& opt) {
  return opt.radius > 0 ? opt.radius : 0.5 * m.branch_radius();
}

ROperator build_r_operator(const Model& m, const CVec& z, const ChartOptions& opt) {
  check_radius(m, z, chart_radius(m, opt));
  const int n = m.modes();
  ROperator R;
  R.z = z;
  const auto d = tangent_profiles(m, z);
  R.M = constraint_block(m, d);
  Eigen::JacobiSVD<Mat> svd(R.M);
  const Vec s = svd.singularValues();
  R.condition = s[0] / s[s.size() - 1];
  if (!(R.condition < opt.max_condition)) {
    std::ostringstream os;
    os << "constraint block ill-conditioned (cond = " << R.condition << ") at |z| = " << z.norm();
    fail(ErrorKind::chart, os.str());
  }
  R.W = R.M.partialPivLu().inverse();
  for (int j = 0; j < n; ++j) {
    CVec b = CVec::Zero(m.op.size()), c = CVec::Zero(m.op.size());
    for (int r = 0; r < 2 * n; ++r) {
      const cplx w(R.W(2 * j, r), R.W(2 * j + 1, r));
      b += (-0.5 * I * w) * d[static_cast<size_t>(r)].conjugate();
      c += (0.5 * I * w) * d[static_cast<size_t>(r)];
    }
    R.B.push_back(std::move(b));
    R.C.push_back(std::move(c));
  }
  return R;
}

Mat neumann_inverse(const Model& m, const CVec& z, int terms) {
  const int n = m.modes();
  std::vector<CVec> d0;
  for (int j = 0; j < n; ++j) {
    d0.push_back(m.basis.phi[static_cast<size_t>(j)].cast<cplx>());
    d0.push_back(I * m.basis.phi[static_cast<size_t>(j)].cast<cplx>());
  }
  const Mat M0 = constraint_block(m, d0);
  const Mat M1 = constraint_block(m, tangent_profiles(m, z)) - M0;
  const Mat M0i = M0.inverse();
  const Mat K = -M0i * M1;
  Mat term = M0i, sum = M0i;
  for (int k = 1; k < terms; ++k) {
    term = K * term;
    sum += term;
  }
  return sum;
}

double range_residual(const Model& m, const CVec& z, const CVec& v) {
  const double nv = hnorm(m, v);
  if (nv == 0.0) return 0.0;
  double worst = 0;
  for (const CVec& d : tangent_profiles(m, z))
    worst = std::max(worst, std::abs(m.op.dot(v.conjugate().eval(), d).imag()));
  return worst / nv;
}

namespace {

// F_{jA} = -Im int (u - sum Q) conj(D_{jA} Q).
Vec constraints(const Model& m, const CVec& u, const CVec& z) {
  const CVec theta = u - m.bound_sum(z);
  const auto d = tangent_profiles(m, z);
  Vec F(static_cast<Eigen::Index>(d.size()));
  for (size_t r = 0; r < d.size(); ++r)
    F[static_cast<Eigen::Index>(r)] = -m.op.dot(theta, d[r].conjugate().eval()).imag();
  return F;
}

CVec unpack(const Vec& x) {
  CVec z(x.size() / 2);
  for (Eigen::Index j = 0; j < z.size(); ++j) z[j] = cplx(x[2 * j], x[2 * j + 1]);
  return z;
}

}  // namespace

ModulationState decompose(const Model& m, const CVec& u, const ChartOptions& opt) {
  const int n = m.modes();
  ModulationState s;
  const double nu = hnorm(m, u);
  if (nu == 0.0) {
    s.z = CVec::Zero(n);
    s.eta = CVec::Zero(m.op.size());
    return s;
  }
  const double radius = chart_radius(m, opt);
  Vec x(2 * n);
  for (int j = 0; j < n; ++j) {
    const cplx zj = m.op.dot(u, m.basis.phi[static_cast<size_t>(j)].cast<cplx>());
    x[2 * j] = zj.real();
    x[2 * j + 1] = zj.imag();
  }
  Vec F = constraints(m, u, unpack(x));
  double res = F.norm() / nu;
  int it = 0;
  for (; it < opt.max_newton && res > opt.tol; ++it) {
    const double step = 1e-7 * std::max(x.norm(), 1e-3);
    Mat J(2 * n, 2 * n);
    for (int c = 0; c < 2 * n; ++c) {
      Vec xp = x, xm = x;
      xp[c] += step;
      xm[c] -= step;
      J.col(c) = (constraints(m, u, unpack(xp)) - constraints(m, u, unpack(xm))) / (2 * step);
    }
    x -= J.partialPivLu().solve(F);
    const CVec z = unpack(x);
    if (!std::isfinite(x.norm()) || z.cwiseAbs().maxCoeff() > radius) {
      std::ostringstream os;
      os << "decomposition left the chart after " << it + 1 << " Newton steps; last z = (";
      for (int j = 0; j < n; ++j) os << (j ? ", " : "") << z[j];
      os << ")";
      fail(ErrorKind::chart, os.str());
    }
    F = constraints(m, u, z);
    res = F.norm() / nu;
  }
  if (res > opt.tol) {
    std::ostringstream os;
    os << "decomposition did not converge: residual " << res << " after " << it << " steps";
    fail(ErrorKind::chart, os.str());
  }
  s.z = unpack(x);
  s.eta = project_continuous(m.basis, CVec(u - m.bound_sum(s.z)));
  s.iters = it;
  s.residual = res;
  return s;
}

CVec synthesize(const Model& m, const ModulationState& s, const ChartOptions& opt) {
  check_radius(m, s.z, chart_radius(m, opt));
  if (s.z.size() != m.modes()) fail(ErrorKind::domain, "state has the wrong number of modes");
  const ROperator R = build_r_operator(m, s.z, opt);
  return m.bound_sum(s.z) + R.apply(s.eta, m.basis, m.h());
}

}  // namespace nls
