#include <algorithm>
#include <cmath>

#include "nls/dynamics.hpp"
#include "nls/error.hpp"
#include "nls/kernels.hpp"

namespace nls {

double TrajectoryRecord::max_mass_drift() const {
  double d = 0;
  for (double q : mass) d = std::max(d, std::abs(q - mass.front()) / mass.front());
  return d;
}

double TrajectoryRecord::max_energy_drift() const {
  double d = 0;
  for (double e : energy) d = std::max(d, std::abs(e - energy.front()) / std::abs(energy.front()));
  return d;
}

StrangStepper::StrangStepper(const DiscreteOperator& op, double dt, const Vec& W)
    : op_(&op), dt_(dt) {
  const CVec shift = -I * W.cast<cplx>();
  diag_ = op.H.diag.cast<cplx>() + shift;
  lhs_ = CBandLU::affine(op.H, shift, 1.0, 0.5 * I * dt);
}

void StrangStepper::step(CVec& u) const {
  kern::nonlinear_phase(u, op_->kappa, 0.5 * dt_);
  kern::penta_affine(diag_, -0.5 * I * dt_, op_->H.o1, op_->H.o2, u, rhs_);
  u = lhs_.solve(rhs_);
  kern::nonlinear_phase(u, op_->kappa, 0.5 * dt_);
}

TrajectoryRecord integrate_pde(const Model& m, const CVec& u0, double T, const PdeOptions& opt,
                               const ReducedModel* reduced) {
  if (!(opt.dt > 0) || !(T >= 0) || opt.sample_every < 1)
    fail(ErrorKind::config, "integrate_pde needs dt > 0, T >= 0 and sample_every >= 1");
  const auto& op = m.op;
  Vec W = Vec::Zero(op.size());
  if (opt.absorber) {
    const double L = opt.L_ref > 0 ? opt.L_ref : std::abs(m.basis.e[0]);
    W = absorber_profile(op.grid, opt.cap_fraction, opt.cap_strength * L);
  }
  StrangStepper stepper(op, opt.dt, W);
  const long steps = std::lround(T / opt.dt);

  TrajectoryRecord rec;
  CVec u = u0;
  auto sample = [&](double t) {
    ModulationState s;
    try {
      s = decompose(m, u, opt.chart);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::chart && e.kind() != ErrorKind::convergence) throw;
      rec.truncated = true;
      rec.note = std::string("left the modulation chart at t = ") + std::to_string(t) + ": " + e.what();
      return false;
    }
    rec.t.push_back(t);
    rec.z.push_back(s.z);
    const CVec zeta = reduced ? zeta_transform(*reduced, s.z) : s.z;
    rec.zeta.push_back(zeta);
    rec.mass.push_back(op.mass(u));
    rec.energy.push_back(op.energy(u));
    double V = 0;
    for (Eigen::Index j = 0; j < zeta.size(); ++j) V += std::abs(m.basis.e[j]) * std::norm(zeta[j]);
    rec.V.push_back(V);
    rec.eta_norm.push_back(std::sqrt(op.mass(s.eta)));
    if (opt.snapshots) rec.snapshots.push_back(u);
    return true;
  };
  if (!sample(0.0)) return rec;
  for (long k = 1; k <= steps; ++k) {
    stepper.step(u);
    if (k % opt.sample_every == 0 || k == steps)
      if (!sample(static_cast<double>(k) * opt.dt)) break;
  }
  return rec;
}

namespace {

// Least-squares slope of y against x.
double slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double d = n * sxx - sx * sx;
  return d == 0 ? 0.0 : (n * sxy - sx * sy) / d;
}

}  // namespace

Verdict selection_verdict(const TrajectoryRecord& traj, double window_fraction, double tol,
                          double min_trend) {
  if (!(window_fraction > 0 && window_fraction <= 1))
    fail(ErrorKind::config, "window_fraction must lie in (0, 1]");
  Verdict v;
  const int n = traj.modes();
  if (traj.size() < 2 || n == 0) {
    v.kind = "inconclusive";
    return v;
  }
  const double t0 = traj.t.front(), T = traj.t.back() - t0;
  const int nw = std::max(1, static_cast<int>(std::lround(1.0 / window_fraction)));
  const double scale = std::sqrt(traj.mass.front());
  v.window.assign(static_cast<size_t>(n), {});
  std::vector<double> centers;
  for (int w = 0; w < nw; ++w) {
    const double a = t0 + T * w / nw, b = t0 + T * (w + 1) / nw;
    centers.push_back(0.5 * (a + b));
    for (int j = 0; j < n; ++j) {
      double s = 0;
      int c = 0;
      for (size_t i = 0; i < traj.size(); ++i)
        if (traj.t[i] >= a && (traj.t[i] < b || (w == nw - 1 && traj.t[i] <= b))) {
          s += std::abs(traj.z[i][j]);
          ++c;
        }
      v.window[static_cast<size_t>(j)].push_back(c ? s / c : 0.0);
    }
  }
  std::vector<int> survivors;
  for (int j = 0; j < n; ++j) {
    const auto& w = v.window[static_cast<size_t>(j)];
    const double first = w.front(), last = w.back();
    v.rho_plus.push_back(last);
    v.final_change.push_back(nw > 1 && w[w.size() - 2] > 0 ? std::abs(last - w[w.size() - 2]) / w[w.size() - 2] : 0.0);
    bool strictly = nw >= 2;
    for (size_t i = 1; i < w.size(); ++i) strictly = strictly && w[i] < w[i - 1];
    const bool absent = last < 1e-3 * scale;
    const bool dec = absent || last < tol * first || (strictly && (first - last) >= min_trend * first);
    v.decaying.push_back(dec);
    std::vector<double> lg;
    for (double x : w) lg.push_back(std::log(std::max(x, 1e-300)));
    v.decay_rate.push_back(-slope(centers, lg));
    if (!dec) survivors.push_back(j);
  }
  if (survivors.empty()) {
    v.kind = "none";
  } else if (survivors.size() == 1) {
    v.kind = "selected";
    v.j0 = survivors[0];
  } else {
    v.kind = "inconclusive";
  }
  return v;
}

DispersiveReport dispersive_decay(const Model& m, double L, const CVec& v, double T, double dt,
                                  double sigma) {
  const auto& op = m.op;
  LimitingOptions lo;
  CVec f = LimitingResolvent(op, m.basis, L, +1, lo).apply(project_continuous(m.basis, v));
  // Linear evolution: the stepper on an operator copy without the cubic term.
  DiscreteOperator lin = op;
  lin.kappa.setZero();
  const Vec W = absorber_profile(op.grid, lo.cap_fraction, lo.cap_strength * L);
  StrangStepper stepper(lin, dt, W);
  DispersiveReport r;
  const long steps = std::lround(T / dt);
  double next = 1.0;
  for (long k = 1; k <= steps; ++k) {
    stepper.step(f);
    const double t = static_cast<double>(k) * dt;
    if (t + 0.5 * dt >= next) {
      r.t.push_back(t);
      r.norm.push_back(op.weighted_norm(f, -sigma));
      next *= 1.25;
    }
  }
  // Fit on the late half of the log-spaced samples.
  std::vector<double> lx, ly;
  for (size_t i = r.t.size() / 2; i < r.t.size(); ++i) {
    lx.push_back(std::log(r.t[i]));
    ly.push_back(std::log(r.norm[i]));
  }
  r.exponent = lx.size() >= 2 ? slope(lx, ly) : 0.0;
  return r;
}

}  // namespace nls
