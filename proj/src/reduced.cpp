#include <cmath>
#include <numbers>

#include "nls/dynamics.hpp"
#include "nls/error.hpp"

namespace nls {

namespace {

double dot_e(const std::vector<int>& m, const Vec& e) {
  double s = 0;
  for (size_t i = 0; i < m.size(); ++i) s += m[i] * e[static_cast<Eigen::Index>(i)];
  return s;
}

// z^(a+b) zbar^(c+d-e_j); zero when the coefficient k vanishes.
cplx divided(int k, const std::vector<int>& a, const std::vector<int>& b, const std::vector<int>& c,
             const std::vector<int>& d, int j, const CVec& z) {
  if (k == 0) return 0.0;
  Monomial p{a, c};
  for (size_t i = 0; i < a.size(); ++i) {
    p.mu[i] += b[i];
    p.nu[i] += d[i];
  }
  if (--p.nu[static_cast<size_t>(j)] < 0)
    fail(ErrorKind::domain, "uncancelled 1/zbar_j pole in the resonant couplings");
  return double(k) * monomial_value(p, z);
}

}  // namespace

ReducedModel build_reduced(const EffectiveHamiltonian& H, const FgrTable& fgr, const ReducedOptions& opt) {
  ReducedModel rm;
  rm.H = &H;
  rm.fgr = &fgr;
  rm.opt = opt;
  const Model& m = *H.model;
  std::vector<const CVec*> G;
  for (const auto& c : H.channels)
    if (c.G.norm() > 0) {
      rm.monos.push_back(c.mono);
      rm.L.push_back(c.L);
      G.push_back(&c.G);
    }
  const Eigen::Index k = static_cast<Eigen::Index>(G.size());
  rm.K = CMat::Zero(k, k);
  // R+ = PV + i pi delta: the principal value from the limiting resolvent, the
  // delta part from the same spectral density as the FGR table.
  for (Eigen::Index d = 0; d < k; ++d) {
    const double L = rm.L[static_cast<size_t>(d)];
    const CVec gb = G[static_cast<size_t>(d)]->conjugate();
    LimitingResolvent rp(m.op, m.basis, L, +1, opt.resolvent);
    const CVec pv = 0.5 * (rp.apply(gb) + rp.apply(CVec(gb.conjugate())).conjugate());
    SpectralDensity rho(m.op, L, fgr.backend);
    for (Eigen::Index c = 0; c < k; ++c) {
      const CVec& Gc = *G[static_cast<size_t>(c)];
      rm.K(d, c) = m.op.dot(pv, Gc);
      if (opt.damping) rm.K(d, c) += I * std::numbers::pi * rho.pairing(Gc, *G[static_cast<size_t>(d)]);
    }
  }
  return rm;
}

Vec ReducedModel::omega(const CVec& z) const {
  const Model& m = *H->model;
  const int n = modes();
  Vec w(n);
  for (int j = 0; j < n; ++j) {
    const double t = std::norm(z[j]);
    double c = m.basis.e[j] + m.fam[static_cast<size_t>(j)].dlambda(t);
    for (int l = 0; l < n; ++l)
      if (l != j) c += H->a(j, l) * std::norm(z[l]);
    w[j] = opt.varpi ? (1.0 + m.fam[static_cast<size_t>(j)].varpi(t)) * c : c;
  }
  return w;
}

CVec ReducedModel::coupling(const CVec& z) const {
  const int n = modes();
  CVec dz = CVec::Zero(n);
  const Eigen::Index k = K.rows();
  for (Eigen::Index c = 0; c < k; ++c)
    for (Eigen::Index d = 0; d < k; ++d) {
      const auto& [mu, nu] = monos[static_cast<size_t>(c)];
      const auto& [al, be] = monos[static_cast<size_t>(d)];
      const cplx Kdc = K(d, c);
      for (int j = 0; j < n; ++j) {
        const size_t js = static_cast<size_t>(j);
        dz[j] += divided(nu[js], mu, be, nu, al, j, z) * Kdc +
                 divided(mu[js], nu, al, mu, be, j, z) * std::conj(Kdc);
      }
    }
  return I * dz;
}

CVec ReducedModel::rhs(const CVec& z) const {
  const Vec w = omega(z);
  return CVec(-I * w.cast<cplx>().cwiseProduct(z)) + coupling(z);
}

double ReducedModel::lyapunov(const CVec& zeta) const {
  double v = 0;
  for (Eigen::Index j = 0; j < zeta.size(); ++j) v += std::abs(H->model->basis.e[j]) * std::norm(zeta[j]);
  return v;
}

CVec zeta_transform(const ReducedModel& rm, const CVec& z) {
  CVec zeta = z;
  const Vec& e = rm.H->model->basis.e;
  const double tau = default_tau(e);
  const Eigen::Index k = rm.K.rows();
  const int n = rm.modes();
  for (Eigen::Index c = 0; c < k; ++c)
    for (Eigen::Index d = 0; d < k; ++d) {
      if (std::abs(rm.L[static_cast<size_t>(c)] - rm.L[static_cast<size_t>(d)]) <= tau) continue;
      const auto& [mu, nu] = rm.monos[static_cast<size_t>(c)];
      const auto& [al, be] = rm.monos[static_cast<size_t>(d)];
      // (mu - nu).e - (alpha - beta).e
      const double D = dot_e(mu, e) - dot_e(nu, e) - dot_e(al, e) + dot_e(be, e);
      const cplx Kdc = rm.K(d, c);
      for (int j = 0; j < n; ++j) {
        const size_t js = static_cast<size_t>(j);
        zeta[j] += divided(nu[js], mu, be, nu, al, j, z) * Kdc / D -
                   divided(mu[js], nu, al, mu, be, j, z) * std::conj(Kdc) / D;
      }
    }
  return zeta;
}

TrajectoryRecord integrate_reduced(const ReducedModel& rm, const CVec& z0, double T, double dt,
                                   int sample_every) {
  if (!(dt > 0) || !(T >= 0) || sample_every < 1)
    fail(ErrorKind::config, "integrate_reduced needs dt > 0, T >= 0 and sample_every >= 1");
  const Model& m = *rm.H->model;
  TrajectoryRecord rec;
  CVec z = z0;
  auto sample = [&](double t) {
    rec.t.push_back(t);
    rec.z.push_back(z);
    const CVec zeta = zeta_transform(rm, z);
    rec.zeta.push_back(zeta);
    double mass = 0, energy = rm.H->Z0(z);
    for (Eigen::Index j = 0; j < z.size(); ++j) {
      mass += std::norm(z[j]);
      energy += m.basis.e[j] * std::norm(z[j]);
    }
    rec.mass.push_back(mass);
    rec.energy.push_back(energy);
    rec.V.push_back(rm.lyapunov(zeta));
    rec.eta_norm.push_back(0.0);
  };
  auto rk4 = [&](auto&& f, CVec& x, double h) {
    const CVec k1 = f(x);
    const CVec k2 = f(CVec(x + 0.5 * h * k1));
    const CVec k3 = f(CVec(x + 0.5 * h * k2));
    const CVec k4 = f(CVec(x + h * k3));
    x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  };
  // The integrable flow keeps every |z_j|, so its rates are frozen over a substep.
  auto phase = [&](CVec& x, double h) {
    const Vec w = rm.omega(x);
    for (Eigen::Index j = 0; j < x.size(); ++j) x[j] *= std::polar(1.0, -w[j] * h);
  };
  sample(0.0);
  const long steps = std::lround(T / dt);
  for (long s = 1; s <= steps; ++s) {
    if (rm.opt.integrator == ReducedIntegrator::rk4) {
      rk4([&](const CVec& x) { return rm.rhs(x); }, z, dt);
    } else {
      phase(z, 0.5 * dt);
      rk4([&](const CVec& x) { return rm.coupling(x); }, z, dt);
      phase(z, 0.5 * dt);
    }
    if (s % sample_every == 0 || s == steps) sample(static_cast<double>(s) * dt);
  }
  return rec;
}

LyapunovSeries lyapunov_series(const TrajectoryRecord& traj, const FgrTable& fgr) {
  LyapunovSeries out;
  out.V = traj.V;
  for (const auto& zeta : traj.zeta) out.rate.push_back(2.0 * gamma_total(fgr, zeta));
  for (size_t i = 1; i < traj.size(); ++i) {
    out.dissipation += 0.5 * (traj.t[i] - traj.t[i - 1]) * (out.rate[i] + out.rate[i - 1]);
    out.max_decrease = std::max(out.max_decrease, traj.V[i - 1] - traj.V[i]);
  }
  if (!traj.V.empty()) out.delta_V = traj.V.back() - traj.V.front();
  out.closure = std::abs(out.delta_V - out.dissipation);
  return out;
}

}  // namespace nls
