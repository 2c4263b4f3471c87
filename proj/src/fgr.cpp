#include "nls/fgr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "nls/error.hpp"

namespace nls {

int FgrTable::level_index(double L) const {
  for (size_t i = 0; i < levels.size(); ++i)
    if (std::abs(levels[i].L - L) <= tau) return static_cast<int>(i);
  std::ostringstream os;
  os << "L = " << L << " is not a radiating frequency of the table";
  fail(ErrorKind::domain, os.str());
}

double FgrTable::gram_defect() const {
  double worst = 0;
  for (const auto& lv : levels) {
    const double scale = lv.P.cwiseAbs().maxCoeff();
    if (scale == 0) continue;
    worst = std::max(worst, (lv.P - lv.P.adjoint()).cwiseAbs().maxCoeff() / scale);
    if (lv.gram_eigenvalues.size() > 0)
      worst = std::max(worst, -lv.gram_eigenvalues.minCoeff() / scale);
  }
  return worst;
}

FgrTable build_fgr_table(const DiscreteOperator& op, const EigenBasis& basis,
                         const std::vector<Channel>& channels,
                         const SpectralMeasureBackend& backend) {
  FgrTable t;
  t.op = &op;
  t.basis = &basis;
  t.e = basis.e;
  t.tau = default_tau(basis.e);
  t.backend = backend;
  for (const auto& c : channels) {
    if (!(c.L > 0)) fail(ErrorKind::domain, "channel " + c.mono.str() + " does not radiate");
    FgrLevel* lv = nullptr;
    for (auto& l : t.levels)
      if (std::abs(l.L - c.L) <= t.tau) lv = &l;
    if (!lv) {
      t.levels.push_back({});
      lv = &t.levels.back();
      lv->L = c.L;
    }
    lv->monos.push_back(c.mono);
    lv->G.push_back(c.G);
  }
  std::sort(t.levels.begin(), t.levels.end(),
            [](const FgrLevel& a, const FgrLevel& b) { return a.L < b.L; });

  // One density per level; levels are independent.
  const int nl = static_cast<int>(t.levels.size());
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < nl; ++i) {
    FgrLevel& lv = t.levels[static_cast<size_t>(i)];
    const Eigen::Index k = static_cast<Eigen::Index>(lv.G.size());
    lv.P = CMat::Zero(k, k);
    bool any = false;
    for (const auto& g : lv.G) any = any || g.norm() > 0;
    if (any) {
      SpectralDensity rho(op, lv.L, backend);
      for (Eigen::Index a = 0; a < k; ++a)
        for (Eigen::Index c = 0; c < k; ++c) {
          const auto& Ga = lv.G[static_cast<size_t>(a)];
          const auto& Gc = lv.G[static_cast<size_t>(c)];
          if (Ga.norm() == 0 || Gc.norm() == 0) continue;
          // <delta conj G_a, G_c> = <G_c, delta conj G_a>
          lv.P(a, c) = rho.pairing(Gc, Ga);
        }
    }
    Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (lv.P + lv.P.adjoint()), Eigen::EigenvaluesOnly);
    lv.gram_eigenvalues = es.eigenvalues();
  }
  return t;
}

FgrTable build_fgr_table(const EffectiveHamiltonian& H, const SpectralMeasureBackend& backend) {
  return build_fgr_table(H.model->op, H.model->basis, H.channels, backend);
}

namespace {

CVec monomial_values(const FgrLevel& lv, const CVec& zeta) {
  CVec p(static_cast<Eigen::Index>(lv.monos.size()));
  for (size_t i = 0; i < lv.monos.size(); ++i) p[static_cast<Eigen::Index>(i)] = monomial_value(lv.monos[i], zeta);
  return p;
}

double dot_e(const std::vector<int>& m, const Vec& e) {
  double s = 0;
  for (size_t i = 0; i < m.size(); ++i) s += m[i] * e[static_cast<Eigen::Index>(i)];
  return s;
}

Monomial sum_of(const std::vector<int>& a, const std::vector<int>& b, const std::vector<int>& c,
                const std::vector<int>& d) {
  Monomial p{a, c};
  for (size_t i = 0; i < a.size(); ++i) {
    p.mu[i] += b[i];
    p.nu[i] += d[i];
  }
  return p;
}

}  // namespace

CVec g_l(const FgrTable& t, double L, const CVec& zeta) {
  const FgrLevel& lv = t.level(L);
  CVec g = CVec::Zero(t.op->size());
  for (size_t i = 0; i < lv.monos.size(); ++i) g += monomial_value(lv.monos[i], zeta) * lv.G[i];
  return std::sqrt(std::numbers::pi) * g;
}

double gamma_l(const FgrTable& t, double L, const CVec& zeta) {
  const FgrLevel& lv = t.level(L);
  const CVec p = monomial_values(lv, zeta);
  // sum conj(p_a) P(a, c) p_c; Eigen's dot conjugates its first argument.
  const cplx s = p.dot(lv.P * p);
  return lv.L * std::numbers::pi * s.real();
}

double gamma_total(const FgrTable& t, const CVec& zeta) {
  double s = 0;
  for (const auto& lv : t.levels) s += gamma_l(t, lv.L, zeta);
  return s;
}

H4Report check_h4(const FgrTable& t, const std::vector<CVec>& samples, double threshold) {
  H4Report r;
  r.c_low = std::numeric_limits<double>::infinity();
  r.c_high = 0;
  for (const auto& z : samples) {
    double num = 0, den = 0;
    for (const auto& lv : t.levels) {
      num += gamma_l(t, lv.L, z) / lv.L;
      for (const auto& m : lv.monos) {
        const std::vector<int> zero(m.mu.size(), 0);
        den += std::norm(monomial_value(sum_of(m.mu, m.nu, zero, zero), z));
      }
    }
    const double ratio = den > 0 ? num / den : 0.0;
    r.c_low = std::min(r.c_low, ratio);
    r.c_high = std::max(r.c_high, ratio);
    ++r.samples;
  }
  if (samples.empty()) r.c_low = 0;
  r.holds = r.c_low > threshold;
  return r;
}

std::vector<CVec> sphere_samples(int n, const std::vector<double>& radii, int per_radius, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d;
  std::vector<CVec> out;
  for (double r : radii)
    for (int i = 0; i < per_radius; ++i) {
      CVec z(n);
      for (int j = 0; j < n; ++j) z[j] = cplx(d(rng), d(rng));
      out.push_back(z * (r / z.norm()));
    }
  return out;
}

PvCheck pv_cancellation_check(const FgrTable& t, double L, const CVec& zeta, const LimitingOptions& opt) {
  const FgrLevel& lv = t.level(L);
  const size_t k = lv.monos.size();
  PvCheck out;
  if (zeta.norm() == 0) return out;
  LimitingResolvent rp(*t.op, *t.basis, lv.L, +1, opt);
  auto pv = [&](const CVec& f) -> CVec {
    if (f.norm() == 0) return CVec::Zero(f.size());
    return 0.5 * (rp.apply(f) + rp.apply(CVec(f.conjugate())).conjugate());
  };
  std::vector<CVec> pv_g(k), pv_gbar(k);
  for (size_t a = 0; a < k; ++a) {
    pv_g[a] = pv(lv.G[a]);
    pv_gbar[a] = pv(CVec(lv.G[a].conjugate()));
  }
  const Vec& e = t.e;
  cplx total = 0;
  for (size_t c = 0; c < k; ++c)
    for (size_t d = 0; d < k; ++d) {
      const auto& [mu, nu] = lv.monos[c];
      const auto& [al, be] = lv.monos[d];
      // nu.e zeta^(mu+beta) zetabar^(nu+alpha) <PV conj G_ab, G_mn>
      const cplx t1 = dot_e(nu, e) * monomial_value(sum_of(mu, be, nu, al), zeta) *
                      t.op->dot(pv_gbar[d], lv.G[c]);
      // mu'.e zeta^(nu'+alpha') zetabar^(mu'+beta') <PV G_a'b', conj G_m'n'>
      const cplx t2 = dot_e(mu, e) * monomial_value(sum_of(nu, al, mu, be), zeta) *
                      t.op->dot(pv_g[d], CVec(lv.G[c].conjugate()));
      total += t1 + t2;
      out.scale += std::abs(t1) + std::abs(t2);
    }
  out.residual = std::abs(total.imag());
  return out;
}

}  // namespace nls
