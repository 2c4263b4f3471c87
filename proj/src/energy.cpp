#include "nls/energy.hpp"

#include <cmath>
#include <map>

#include "nls/error.hpp"

namespace nls {

cplx monomial_value(const Monomial& p, const CVec& z) {
  cplx v = 1.0;
  for (size_t i = 0; i < p.mu.size(); ++i) {
    const cplx zi = z[static_cast<Eigen::Index>(i)];
    for (int k = 0; k < p.mu[i]; ++k) v *= zi;
    for (int k = 0; k < p.nu[i]; ++k) v *= std::conj(zi);
  }
  return v;
}

namespace {

Monomial unit_monomial(int n) {
  Monomial p;
  p.mu.assign(static_cast<size_t>(n), 0);
  p.nu.assign(static_cast<size_t>(n), 0);
  return p;
}

Monomial conj_monomial(const Monomial& p) { return Monomial{p.nu, p.mu}; }

}  // namespace

HamiltonianExpansion expand_energy(const Model& m, int truncation_order) {
  if (truncation_order != 2 && truncation_order != 4) {
    fail(ErrorKind::config, "energy truncation order must be 2 or 4, got " +
                                std::to_string(truncation_order));
  }
  HamiltonianExpansion ex;
  ex.model = &m;
  ex.order = truncation_order;
  if (truncation_order == 2) return ex;

  const int n = m.modes();
  const double h = m.h();
  const auto& phi = m.basis.phi;
  const Vec& kap = m.op.kappa;

  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = j; k < n; ++k) {
        if (i == j && j == k) continue;
        VectorTerm t;
        t.mono = unit_monomial(n);
        t.mono.mu[static_cast<size_t>(i)] += 1;
        t.mono.nu[static_cast<size_t>(j)] += 1;
        t.mono.nu[static_cast<size_t>(k)] += 1;
        const double mult = j == k ? 1.0 : 2.0;
        Vec g = mult * kap.cwiseProduct(phi[static_cast<size_t>(i)])
                           .cwiseProduct(phi[static_cast<size_t>(j)])
                           .cwiseProduct(phi[static_cast<size_t>(k)]);
        t.G = project_continuous(m.basis, g).cast<cplx>();
        ex.vector.push_back(std::move(t));
      }

  std::map<Monomial, cplx> acc;
  for (int i1 = 0; i1 < n; ++i1)
    for (int i2 = 0; i2 < n; ++i2)
      for (int j1 = 0; j1 < n; ++j1)
        for (int j2 = 0; j2 < n; ++j2) {
          if (i1 == i2 && i2 == j1 && j1 == j2) continue;
          Monomial p = unit_monomial(n);
          p.mu[static_cast<size_t>(i1)]++;
          p.mu[static_cast<size_t>(i2)]++;
          p.nu[static_cast<size_t>(j1)]++;
          p.nu[static_cast<size_t>(j2)]++;
          const double c = 0.5 * h *
                           (kap.array() * phi[static_cast<size_t>(i1)].array() *
                            phi[static_cast<size_t>(i2)].array() *
                            phi[static_cast<size_t>(j1)].array() *
                            phi[static_cast<size_t>(j2)].array())
                               .sum();
          acc[p] += c;
        }
  // 2 Re e_j z_j zbar_k |z_k|^2 <phi_j, psi_k(0)> from <H Q_j, conj Q_k>.
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) {
      if (j == k) continue;
      const double c = m.basis.e[j] * h *
                       phi[static_cast<size_t>(j)].dot(m.fam[static_cast<size_t>(k)].samples[0].psi);
      Monomial p = unit_monomial(n);
      p.mu[static_cast<size_t>(j)]++;
      p.mu[static_cast<size_t>(k)]++;
      p.nu[static_cast<size_t>(k)] += 2;
      acc[p] += c;
      acc[conj_monomial(p)] += c;
    }
  for (const auto& [p, c] : acc) ex.scalar.push_back({p, c});
  return ex;
}

cplx HamiltonianExpansion::scalar_part(const CVec& z) const {
  const Model& m = *model;
  cplx s = 0.0;
  for (int j = 0; j < m.modes(); ++j) {
    const double t = std::norm(z[j]);
    s += m.basis.e[j] * t + m.fam[static_cast<size_t>(j)].lambda(t);
  }
  for (const auto& term : scalar) s += term.coef * monomial_value(term.mono, z);
  return s;
}

cplx HamiltonianExpansion::vector_part(const CVec& z, const CVec& eta) const {
  const Model& m = *model;
  cplx s = 0.0;
  const CVec etab = eta.conjugate();
  for (const auto& term : vector) {
    const cplx p = monomial_value(term.mono, z);
    s += p * m.op.dot(term.G, eta) + std::conj(p) * m.op.dot(CVec(term.G.conjugate()), etab);
  }
  return s;
}

QuadraticProfiles HamiltonianExpansion::quadratic_profiles(const CVec& z) const {
  const Model& m = *model;
  CVec a = CVec::Zero(m.op.size());
  for (int j = 0; j < m.modes(); ++j) a += z[j] * m.basis.phi[static_cast<size_t>(j)].cast<cplx>();
  QuadraticProfiles q;
  q.A = 2.0 * m.op.kappa.cwiseProduct(a.cwiseAbs2());
  q.B = 0.5 * m.op.kappa.cast<cplx>().cwiseProduct(a.cwiseProduct(a));
  q.C = m.op.kappa.cast<cplx>().cwiseProduct(a);
  return q;
}

cplx HamiltonianExpansion::eta_part(const CVec& z, const CVec& eta) const {
  const Model& m = *model;
  const double h = m.h();
  const CVec etab = eta.conjugate();
  cplx s = m.op.dot(m.op.apply(eta), etab);
  if (order < 4) return s;
  const QuadraticProfiles q = quadratic_profiles(z);
  const Vec e2 = eta.cwiseAbs2();
  s += h * q.A.dot(e2);
  s += h * (q.B.cwiseProduct(etab.cwiseProduct(etab)).sum() +
            q.B.conjugate().cwiseProduct(eta.cwiseProduct(eta)).sum());
  s += h * (q.C.cwiseProduct(etab).cwiseProduct(e2.cast<cplx>()).sum() +
            q.C.conjugate().cwiseProduct(eta).cwiseProduct(e2.cast<cplx>()).sum());
  s += 0.5 * h * m.op.kappa.dot(e2.cwiseProduct(e2));
  return s;
}

cplx HamiltonianExpansion::evaluate(const CVec& z, const CVec& eta) const {
  return scalar_part(z) + vector_part(z, eta) + eta_part(z, eta);
}

SymplecticCoefficients symplectic_coefficients(const Model& m, const Vec& rho) {
  SymplecticCoefficients s;
  for (int j = 0; j < m.modes(); ++j) {
    const auto& f = m.fam[static_cast<size_t>(j)];
    Vec g(rho.size()), w(rho.size());
    for (Eigen::Index i = 0; i < rho.size(); ++i) {
      g[i] = f.gamma(rho[i] * rho[i]);
      if (!(1.0 + g[i] > 0.0))
        fail(ErrorKind::chart, "1 + gamma_" + std::to_string(j + 1) + " <= 0 at rho = " +
                                   std::to_string(rho[i]));
      w[i] = 1.0 / (1.0 + g[i]) - 1.0;
    }
    s.rho.push_back(rho);
    s.gamma.push_back(g);
    s.varpi.push_back(w);
  }
  return s;
}

GaugeReport verify_gauge_structure(const HamiltonianExpansion& ex,
                                   const std::vector<std::pair<CVec, CVec>>& states,
                                   const std::vector<double>& angles) {
  GaugeReport r;
  for (const auto& [z, eta] : states) {
    const cplx e0 = ex.evaluate(z, eta);
    const double scale = std::max(std::abs(e0), 1e-300);
    r.max_imaginary = std::max(r.max_imaginary, std::abs(e0.imag()) / scale);
    for (double th : angles) {
      const cplx g = std::polar(1.0, th);
      const cplx e1 = ex.evaluate(CVec(g * z), CVec(g * eta));
      r.max_relative_change = std::max(r.max_relative_change, std::abs(e1.real() - e0.real()) / scale);
    }
  }
  return r;
}

}  // namespace nls
