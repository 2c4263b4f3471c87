#include "nls/continuum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "nls/error.hpp"

namespace nls {

const char* to_string(MeasureKind k) {
  return k == MeasureKind::generalized_eigenfunction ? "generalized_eigenfunction"
                                                     : "smoothed_eigensum";
}

MeasureKind measure_kind_from(const std::string& s) {
  if (s == "generalized_eigenfunction") return MeasureKind::generalized_eigenfunction;
  if (s == "smoothed_eigensum") return MeasureKind::smoothed_eigensum;
  fail(ErrorKind::config, "unknown spectral backend '" + s + "'");
}

const char* to_string(LimitMode m) { return m == LimitMode::absorbing ? "absorbing" : "epsilon"; }

LimitMode limit_mode_from(const std::string& s) {
  if (s == "absorbing") return LimitMode::absorbing;
  if (s == "epsilon") return LimitMode::epsilon;
  fail(ErrorKind::config, "unknown limiting-resolvent mode '" + s + "'");
}

cplx extrapolate_to_zero(const std::vector<double>& s, const std::vector<cplx>& y) {
  cplx acc = 0.0;
  for (size_t i = 0; i < s.size(); ++i) {
    double w = 1.0;
    for (size_t j = 0; j < s.size(); ++j)
      if (j != i) w *= -s[j] / (s[i] - s[j]);
    acc += w * y[i];
  }
  return acc;
}

CVec extrapolate_to_zero(const std::vector<double>& s, const std::vector<CVec>& y) {
  CVec acc = CVec::Zero(y.front().size());
  for (size_t i = 0; i < s.size(); ++i) {
    double w = 1.0;
    for (size_t j = 0; j < s.size(); ++j)
      if (j != i) w *= -s[j] / (s[i] - s[j]);
    acc += w * y[i];
  }
  return acc;
}

namespace {

DiscreteOperator box_operator(const DiscreteOperator& op, int factor) {
  const int nb = factor * (op.grid.n_points + 1) - 1;
  RadialGrid g = RadialGrid::make(factor * op.grid.r_max, nb);
  return build_operator(g, op.potential, std::numeric_limits<double>::infinity());
}

}  // namespace

SpectralDensity::SpectralDensity(const DiscreteOperator& op, double L,
                                 const SpectralMeasureBackend& backend)
    : backend_(backend), L_(L), h_(op.h()) {
  if (!(L > 0.0)) {
    std::ostringstream os;
    os << "spectral density needs L > 0, got " << L;
    fail(ErrorKind::domain, os.str());
  }
  const double k = std::sqrt(L);
  if (backend.kind == MeasureKind::generalized_eigenfunction) {
    Vec w = numerov_regular(op, L);
    const double h = op.h(), h2 = h * h;
    const double kt = std::acos((1.0 - 5.0 * h2 * L / 12.0) / (1.0 + h2 * L / 12.0)) / h;
    const Eigen::Index n = op.size();
    const auto i0 = static_cast<Eigen::Index>(backend.match_from * n);
    const auto i1 = static_cast<Eigen::Index>(backend.match_to * n);
    Eigen::Matrix2d A = Eigen::Matrix2d::Zero();
    Eigen::Vector2d b = Eigen::Vector2d::Zero();
    for (Eigen::Index i = i0; i < i1; ++i) {
      const double r = op.grid.r(i);
      const Eigen::Vector2d row(std::sin(kt * r), std::cos(kt * r));
      A += row * row.transpose();
      b += row * w[i];
    }
    const Eigen::Vector2d ab = A.ldlt().solve(b);
    const double amp = ab.norm();
    psi_ = w / (amp * std::sqrt(std::numbers::pi * k));
  } else {
    DiscreteOperator box = box_operator(op, backend.box_factor);
    const double spacing = 2.0 * std::numbers::pi * k / box.grid.r_max;
    for (double m : backend.width_multiples) sigma_.push_back(m * spacing);
    const double smax = *std::max_element(sigma_.begin(), sigma_.end());
    box_e_ = band_eigenvalues(box.H, L - 8.0 * smax, L + 8.0 * smax);
    const double sh = std::sqrt(box.h());
    for (Eigen::Index m = 0; m < box_e_.size(); ++m) {
      Vec v = inverse_iteration(box.H, box_e_[m], 3);
      v /= v.norm() * sh;
      box_v_.push_back(v.head(op.size()));
    }
  }
}

cplx SpectralDensity::pairing(const CVec& F, const CVec& G) const {
  if (backend_.kind == MeasureKind::generalized_eigenfunction) {
    const cplx a = h_ * (psi_.cast<cplx>().cwiseProduct(F)).sum();
    const cplx b = h_ * (psi_.cast<cplx>().cwiseProduct(G)).sum();
    return a * std::conj(b);
  }
  return pairing_eigensum(F, G);
}

cplx SpectralDensity::pairing_eigensum(const CVec& F, const CVec& G) const {
  const Eigen::Index m = box_e_.size();
  std::vector<cplx> c(static_cast<size_t>(m));
  double scale = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    const cplx a = h_ * (box_v_[i].cast<cplx>().cwiseProduct(F)).sum();
    const cplx b = h_ * (box_v_[i].cast<cplx>().cwiseProduct(G)).sum();
    c[static_cast<size_t>(i)] = a * std::conj(b);
    scale = std::max(scale, std::abs(a) * std::abs(b));
  }
  trace_ = Trace{};
  std::vector<double> s2;
  for (double s : sigma_) {
    cplx acc = 0.0;
    for (Eigen::Index i = 0; i < m; ++i) {
      const double x = (box_e_[i] - L_) / s;
      acc += c[static_cast<size_t>(i)] * std::exp(-0.5 * x * x);
    }
    acc /= s * std::sqrt(2.0 * std::numbers::pi);
    trace_.widths.push_back(s);
    trace_.values.push_back(acc);
    s2.push_back(s * s);
  }
  trace_.quadratic = extrapolate_to_zero(s2, trace_.values);
  std::vector<double> s2a(s2.begin(), s2.begin() + 2);
  std::vector<cplx> va(trace_.values.begin(), trace_.values.begin() + 2);
  trace_.linear = extrapolate_to_zero(s2a, va);
  const double ref = std::max(std::abs(trace_.quadratic), 1e-12 * scale / sigma_.front());
  if (std::abs(trace_.quadratic - trace_.linear) > backend_.extrap_tol * ref && ref > 0.0) {
    std::ostringstream os;
    os << "smoothed eigensum extrapolation unstable at L = " << L_ << ": widths";
    for (size_t i = 0; i < trace_.widths.size(); ++i)
      os << " " << trace_.widths[i] << "->" << trace_.values[i];
    os << ", linear " << trace_.linear << ", quadratic " << trace_.quadratic;
    fail(ErrorKind::convergence, os.str());
  }
  return trace_.quadratic;
}

cplx delta_pairing(const DiscreteOperator& op, double L, const CVec& F, const CVec& G,
                   const SpectralMeasureBackend& backend) {
  return SpectralDensity(op, L, backend).pairing(F, G);
}

Vec absorber_profile(const RadialGrid& grid, double fraction, double W0) {
  Vec w = Vec::Zero(grid.n_points);
  if (fraction <= 0.0 || W0 <= 0.0) return w;
  const double rc = (1.0 - fraction) * grid.r_max;
  for (int k = 0; k < grid.n_points; ++k) {
    const double r = grid.r(k);
    if (r > rc) {
      const double x = (r - rc) / (grid.r_max - rc);
      w[k] = W0 * x * x * x * x;
    }
  }
  return w;
}

LimitingResolvent::LimitingResolvent(const DiscreteOperator& op, const EigenBasis& basis,
                                     double L, int sign, const LimitingOptions& opt)
    : op_(&op), basis_(&basis), opt_(opt), L_(L), sign_(sign >= 0 ? 1 : -1) {
  if (!(L > 0.0)) {
    std::ostringstream os;
    os << "limiting resolvent needs L > 0, got " << L;
    fail(ErrorKind::domain, os.str());
  }
  if (opt.mode == LimitMode::absorbing) {
    Vec W = absorber_profile(op.grid, opt.cap_fraction, opt.cap_strength * L);
    CVec shift = CVec::Constant(op.size(), cplx(-L, 0.0)) - I * double(sign_) * W.cast<cplx>();
    cap_lu_ = CBandLU(op.H, shift);
    interior_end_ = 0;
    while (interior_end_ < W.size() && W[interior_end_] == 0.0) ++interior_end_;
    interior_end_ = std::max<Eigen::Index>(0, interior_end_ - 2);
  } else {
    DiscreteOperator box = box_operator(op, opt.box_factor);
    box_n_ = box.size();
    for (double e : opt.eps) {
      CVec shift = CVec::Constant(box_n_, cplx(-L, -double(sign_) * e));
      eps_lu_.emplace_back(box.H, shift);
    }
  }
}

CVec LimitingResolvent::apply(const CVec& f) const {
  const CVec g = project_continuous(*basis_, f);
  const Eigen::Index n = op_->size();
  if (g.norm() == 0.0) return CVec::Zero(n);
  if (opt_.mode == LimitMode::absorbing) {
    CVec x = cap_lu_.solve(g);
    CVec r = op_->apply(x) - L_ * x - g;
    const double res = r.head(interior_end_).norm() / g.norm();
    interior_residual_ = res;
    if (res > opt_.interior_tol) {
      std::ostringstream os;
      os << "absorbing-layer resolvent interior residual " << res << " at L = " << L_;
      fail(ErrorKind::convergence, os.str());
    }
    return x;
  }
  CVec gb = CVec::Zero(box_n_);
  gb.head(n) = g;
  std::vector<CVec> xs;
  for (const auto& lu : eps_lu_) xs.push_back(lu.solve(gb).head(n));
  std::vector<double> s(opt_.eps.begin(), opt_.eps.end());
  CVec x3 = extrapolate_to_zero(s, xs);
  // Linear extrapolant through the two smallest eps for the consistency check.
  std::vector<size_t> idx(s.size());
  for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) { return s[a] < s[b]; });
  CVec x2 = extrapolate_to_zero({s[idx[0]], s[idx[1]]}, std::vector<CVec>{xs[idx[0]], xs[idx[1]]});
  const double dev = (x3 - x2).norm() / std::max(x3.norm(), 1e-300);
  CVec r = op_->apply(x3) - L_ * x3 - g;
  interior_residual_ = r.head(n - 2).norm() / g.norm();
  if (dev > opt_.eps_tol) {
    std::ostringstream os;
    os << "epsilon extrapolation did not settle at L = " << L_ << ": eps sequence";
    for (size_t i = 0; i < s.size(); ++i) os << " " << s[i] << " (|x| = " << xs[i].norm() << ")";
    os << ", relative change " << dev;
    fail(ErrorKind::convergence, os.str());
  }
  return x3;
}

CVec limiting_resolvent(const DiscreteOperator& op, const EigenBasis& basis, double L,
                        const CVec& f, int sign, const LimitingOptions& opt) {
  return LimitingResolvent(op, basis, L, sign, opt).apply(f);
}

CVec principal_value(const DiscreteOperator& op, const EigenBasis& basis, double L,
                     const CVec& f, const LimitingOptions& opt) {
  LimitingResolvent rp(op, basis, L, +1, opt);
  const CVec a = rp.apply(f);
  const CVec b = rp.apply(f.conjugate()).conjugate();
  return 0.5 * (a + b);
}

}  // namespace nls
