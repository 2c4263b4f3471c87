#include "nls/normal_form.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>

#include "nls/error.hpp"
#include "nls/modulation.hpp"

namespace nls {

namespace {

// nu_j z^mu zbar^(nu - e_j), i.e. d/dzbar_j of z^mu zbar^nu.
cplx dzbar_monomial(const Monomial& p, int j, const CVec& z) {
  const int k = p.nu[static_cast<size_t>(j)];
  if (k == 0) return 0.0;
  Monomial q = p;
  q.nu[static_cast<size_t>(j)] -= 1;
  return double(k) * monomial_value(q, z);
}

// d/dzbar_j of conj(z^mu zbar^nu) = zbar^mu z^nu.
cplx dzbar_conj_monomial(const Monomial& p, int j, const CVec& z) {
  return dzbar_monomial(Monomial{p.nu, p.mu}, j, z);
}

bool in_M(const ResonanceTable& t, const Monomial& p) {
  return std::binary_search(t.M.begin(), t.M.end(), p);
}

std::vector<int> phase_of(const Monomial& p) {
  std::vector<int> k(p.mu.size());
  for (size_t i = 0; i < k.size(); ++i) k[i] = p.mu[i] - p.nu[i];
  return k;
}

}  // namespace

cplx GeneratingFunction::value(const CVec& z, const CVec& eta, double h) const {
  cplx s = 0.0;
  for (const auto& g : scalar) s += g.b * monomial_value(g.mono, z);
  for (const auto& g : vector) {
    const cplx p = monomial_value(g.mono, z);
    const cplx pair = h * g.B.cwiseProduct(eta).sum();
    s += p * pair + std::conj(p * pair);
  }
  return s;
}

void GeneratingFunction::field(const Model& m, const CVec& z, const CVec& eta, CVec& dz,
                               CVec& deta) const {
  const int n = m.modes();
  dz = CVec::Zero(n);
  deta = CVec::Zero(eta.size());
  for (const auto& g : scalar)
    for (int j = 0; j < n; ++j) dz[j] += g.b * dzbar_monomial(g.mono, j, z);
  for (const auto& g : vector) {
    const cplx pair = m.h() * g.B.cwiseProduct(eta).sum();
    for (int j = 0; j < n; ++j)
      dz[j] += dzbar_monomial(g.mono, j, z) * pair +
               dzbar_conj_monomial(g.mono, j, z) * std::conj(pair);
    deta += std::conj(monomial_value(g.mono, z)) * g.B.conjugate();
  }
  for (int j = 0; j < n; ++j)
    dz[j] *= -I * (1.0 + m.fam[static_cast<size_t>(j)].varpi(std::norm(z[j])));
  deta *= -I;
}

GeneratingFunction solve_homological(const HamiltonianExpansion& ex, const ResonanceTable& table,
                                     int level) {
  if (level != 1 && level != 2) fail(ErrorKind::config, "normal form level must be 1 or 2");
  const Model& m = *ex.model;
  const Vec& e = m.basis.e;
  GeneratingFunction chi;
  chi.level = level;
  auto small = [&](const Monomial& p, double d) {
    std::ostringstream os;
    os << "small divisor " << d << " for monomial " << p.str() << " (tau = " << table.tau << ")";
    fail(ErrorKind::small_divisor, os.str());
  };
  if (level == 1) {
    for (const auto& t : ex.vector) {
      const double L = t.mono.frequency(e);
      if (in_M(table, t.mono)) continue;
      if (L > table.tau) {
        fail(ErrorKind::domain, "positive-frequency coupling " + t.mono.str() +
                                    " missing from the resonant set");
      }
      if (std::abs(L) <= table.tau) small(t.mono, L);
      VectorGenerator g;
      g.mono = t.mono;
      g.L = L;
      g.B = I * continuous_resolvent(m.op, m.basis, L, t.G);
      chi.vector.push_back(std::move(g));
    }
  } else {
    for (const auto& t : ex.scalar) {
      if (t.mono.mu == t.mono.nu) continue;
      double d = 0;
      for (size_t i = 0; i < t.mono.mu.size(); ++i)
        d += (t.mono.mu[i] - t.mono.nu[i]) * e[static_cast<Eigen::Index>(i)];
      if (std::abs(d) <= table.tau) small(t.mono, d);
      chi.scalar.push_back({t.mono, I * t.coef / d, d});
    }
  }
  return chi;
}

double homological_residual(const HamiltonianExpansion& ex, const GeneratingFunction& chi) {
  const Model& m = *ex.model;
  double worst = 0;
  for (const auto& g : chi.vector) {
    for (const auto& t : ex.vector) {
      if (!(t.mono == g.mono)) continue;
      const CVec r = project_continuous(m.basis, CVec(m.op.apply(g.B) - g.L * g.B)) -
                     I * project_continuous(m.basis, t.G);
      worst = std::max(worst, r.norm() / t.G.norm());
    }
  }
  return worst;
}

void flow(const Model& m, const GeneratingFunction& chi, CVec& z, CVec& eta, int steps) {
  if (chi.empty()) return;
  const double dt = 1.0 / steps;
  CVec k1z, k1e, k2z, k2e, k3z, k3e, k4z, k4e;
  for (int s = 0; s < steps; ++s) {
    chi.field(m, z, eta, k1z, k1e);
    chi.field(m, CVec(z + 0.5 * dt * k1z), CVec(eta + 0.5 * dt * k1e), k2z, k2e);
    chi.field(m, CVec(z + 0.5 * dt * k2z), CVec(eta + 0.5 * dt * k2e), k3z, k3e);
    chi.field(m, CVec(z + dt * k3z), CVec(eta + dt * k3e), k4z, k4e);
    z += dt / 6.0 * (k1z + 2.0 * k2z + 2.0 * k3z + k4z);
    eta += dt / 6.0 * (k1e + 2.0 * k2e + 2.0 * k3e + k4e);
  }
}

EnergyFn exact_energy_fn(const Model& m) {
  return [&m](const CVec& z, const CVec& eta) { return m.op.energy(synthesize(m, {z, eta})); };
}

EnergyFn transformed_energy_fn(const Model& m, const GeneratingFunction& chi, int steps) {
  return [&m, &chi, steps](const CVec& z0, const CVec& eta0) {
    CVec z = z0, eta = eta0;
    flow(m, chi, z, eta, steps);
    return m.op.energy(synthesize(m, {z, eta}));
  };
}

namespace {

// Torus average of f(z) e^{-i k.theta} at |z_j| = s a_j.
cplx torus_mode(const std::function<double(const CVec&)>& f, const std::vector<int>& k,
                const Vec& a, double s, int K) {
  const int n = static_cast<int>(k.size());
  std::vector<int> idx(static_cast<size_t>(n), 0);
  cplx acc = 0.0;
  int count = 0;
  while (true) {
    CVec z(n);
    double phase = 0;
    for (int j = 0; j < n; ++j) {
      const double th = 2.0 * std::numbers::pi * idx[static_cast<size_t>(j)] / K;
      z[j] = std::polar(s * a[j], th);
      phase += k[static_cast<size_t>(j)] * th;
    }
    acc += f(z) * std::polar(1.0, -phase);
    ++count;
    int j = 0;
    while (j < n && ++idx[static_cast<size_t>(j)] == K) idx[static_cast<size_t>(j++)] = 0;
    if (j == n) break;
  }
  return acc / double(count);
}

// Least-squares fit of y(s) = sum_q c_q s^{d0 + 2q}; returns c for power `want`.
cplx fit_power(const std::vector<double>& s, const std::vector<cplx>& y, int d0, int want) {
  const Eigen::Index q = static_cast<Eigen::Index>(s.size());
  Mat A(q, q);
  CVec b(q);
  for (Eigen::Index i = 0; i < q; ++i) {
    for (Eigen::Index c = 0; c < q; ++c) A(i, c) = std::pow(s[static_cast<size_t>(i)], d0 + 2 * c);
    b[i] = y[static_cast<size_t>(i)];
  }
  const CVec c = A.cast<cplx>().colPivHouseholderQr().solve(b);
  const int col = (want - d0) / 2;
  if (col < 0 || col >= q) fail(ErrorKind::domain, "requested power outside the fit");
  return c[col];
}

}  // namespace

cplx probe_vector(const EnergyFn& E, int n, const Monomial& mono, const CVec& v,
                  const ProbeOptions& opt) {
  const std::vector<int> k = phase_of(mono);
  const Vec a = Vec::Ones(n);
  std::vector<cplx> y;
  for (double s : opt.amplitudes) {
    auto f = [&](const CVec& z) {
      return (E(z, CVec(opt.eps * v)) - E(z, CVec(-opt.eps * v))) / (2.0 * opt.eps);
    };
    y.push_back(torus_mode(f, k, a, s, opt.torus));
  }
  int d0 = 0;
  for (int x : k) d0 += std::abs(x);
  return fit_power(opt.amplitudes, y, d0, mono.degree());
}

std::vector<cplx> probe_scalar(const EnergyFn& E, const std::vector<Monomial>& monos,
                               Eigen::Index eta_size, const ProbeOptions& opt) {
  if (monos.empty()) return {};
  const int n = static_cast<int>(monos[0].mu.size());
  const std::vector<int> k = phase_of(monos[0]);
  const int deg = monos[0].degree();
  for (const auto& p : monos)
    if (phase_of(p) != k || p.degree() != deg)
      fail(ErrorKind::domain, "probe_scalar needs monomials of one phase and degree");
  int d0 = 0;
  for (int x : k) d0 += std::abs(x);
  d0 = std::max(d0, 2);
  const CVec zero = CVec::Zero(eta_size);
  auto f = [&](const CVec& z) { return E(z, zero); };
  const size_t Q = monos.size();
  Mat W(static_cast<Eigen::Index>(Q), static_cast<Eigen::Index>(Q));
  CVec rhs(static_cast<Eigen::Index>(Q));
  for (size_t q = 0; q < Q; ++q) {
    Vec a(n);
    for (int j = 0; j < n; ++j) a[j] = 1.0 / (1.0 + 0.6 * double(q) * j);
    std::vector<cplx> y;
    for (double s : opt.amplitudes) y.push_back(torus_mode(f, k, a, s, opt.torus));
    rhs[static_cast<Eigen::Index>(q)] = fit_power(opt.amplitudes, y, d0, deg);
    for (size_t c = 0; c < Q; ++c) {
      double w = 1.0;
      for (int j = 0; j < n; ++j)
        w *= std::pow(a[j], monos[c].mu[static_cast<size_t>(j)] + monos[c].nu[static_cast<size_t>(j)]);
      W(static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(c)) = w;
    }
  }
  const CVec c = W.cast<cplx>().colPivHouseholderQr().solve(rhs);
  return std::vector<cplx>(c.data(), c.data() + c.size());
}

HamiltonianExpansion apply_transform(const HamiltonianExpansion& ex, const GeneratingFunction& chi,
                                     const ResonanceTable& table, TransformReport* report,
                                     const CVec* probe_direction, const ProbeOptions& opt) {
  HamiltonianExpansion out = ex;
  auto targeted_vec = [&](const Monomial& p) {
    for (const auto& g : chi.vector)
      if (g.mono == p) return true;
    return false;
  };
  auto targeted_sca = [&](const Monomial& p) {
    for (const auto& g : chi.scalar)
      if (g.mono == p) return true;
    return false;
  };
  std::erase_if(out.vector, [&](const VectorTerm& t) { return targeted_vec(t.mono); });
  std::erase_if(out.scalar, [&](const ScalarTerm& t) { return targeted_sca(t.mono); });
  if (!report) return out;

  const Model& m = *ex.model;
  const int n = m.modes();
  TransformReport& rep = *report;
  rep = {};
  rep.min_divisor = std::numeric_limits<double>::infinity();
  for (const auto& g : chi.vector) rep.min_divisor = std::min(rep.min_divisor, std::abs(g.L));
  for (const auto& g : chi.scalar) rep.min_divisor = std::min(rep.min_divisor, std::abs(g.divisor));
  (void)table;

  const EnergyFn before = exact_energy_fn(m);
  const EnergyFn after = transformed_energy_fn(m, chi);
  CVec v;
  if (probe_direction) {
    v = *probe_direction;
  } else {
    Vec w(m.op.size());
    for (Eigen::Index k = 0; k < w.size(); ++k) {
      const double r = m.op.grid.r(k);
      w[k] = r * std::exp(-0.5 * r * r) * (1.0 + 0.3 * r);
    }
    v = project_continuous(m.basis, w).cast<cplx>();
  }

  auto vec_check = [&](const Monomial& p, std::vector<ChannelCheck>& into) {
    ChannelCheck c{p, true, std::abs(probe_vector(before, n, p, v, opt)),
                   std::abs(probe_vector(after, n, p, v, opt))};
    into.push_back(c);
  };
  // Scalar monomials grouped by phase and degree.
  auto scalar_checks = [&](const std::vector<Monomial>& monos, std::vector<ChannelCheck>& into) {
    std::map<std::pair<std::vector<int>, int>, std::vector<Monomial>> groups;
    for (const auto& p : monos) groups[{phase_of(p), p.degree()}].push_back(p);
    for (const auto& [key, g] : groups) {
      auto b = probe_scalar(before, g, m.op.size(), opt);
      auto a = probe_scalar(after, g, m.op.size(), opt);
      for (size_t i = 0; i < g.size(); ++i) into.push_back({g[i], false, std::abs(b[i]), std::abs(a[i])});
    }
  };

  for (const auto& g : chi.vector) vec_check(g.mono, rep.targeted);
  std::vector<Monomial> ts;
  for (const auto& g : chi.scalar) ts.push_back(g.mono);
  scalar_checks(ts, rep.targeted);

  for (const auto& t : ex.vector)
    if (!targeted_vec(t.mono)) vec_check(t.mono, rep.preserved);
  std::vector<Monomial> ps;
  for (int j = 0; j < n; ++j) {
    Monomial q{std::vector<int>(static_cast<size_t>(n), 0), std::vector<int>(static_cast<size_t>(n), 0)};
    q.mu[static_cast<size_t>(j)] = q.nu[static_cast<size_t>(j)] = 1;
    ps.push_back(q);
  }
  for (const auto& t : ex.scalar)
    if (!targeted_sca(t.mono) && t.mono.mu == t.mono.nu) ps.push_back(t.mono);
  for (int j = 0; j < n; ++j) {
    Monomial q{std::vector<int>(static_cast<size_t>(n), 0), std::vector<int>(static_cast<size_t>(n), 0)};
    q.mu[static_cast<size_t>(j)] = q.nu[static_cast<size_t>(j)] = 2;
    ps.push_back(q);
  }
  scalar_checks(ps, rep.preserved);

  rep.min_annihilation = std::numeric_limits<double>::infinity();
  for (const auto& c : rep.targeted)
    rep.min_annihilation = std::min(rep.min_annihilation, c.after > 0 ? c.before / c.after : 1e300);
  for (const auto& c : rep.preserved)
    rep.max_preserved_change =
        std::max(rep.max_preserved_change, std::abs(c.after - c.before) / std::max(c.before, 1e-300));
  return out;
}

double EffectiveHamiltonian::Z0(const CVec& z) const {
  double s = 0;
  const int n = static_cast<int>(z.size());
  for (int j = 0; j < n; ++j) s += model->fam[static_cast<size_t>(j)].lambda(std::norm(z[j]));
  for (int j = 0; j < n; ++j)
    for (int k = j + 1; k < n; ++k) s += a(j, k) * std::norm(z[j]) * std::norm(z[k]);
  return s;
}

CVec EffectiveHamiltonian::dZ0(const CVec& z) const {
  const int n = static_cast<int>(z.size());
  CVec d(n);
  for (int j = 0; j < n; ++j) {
    double c = model->fam[static_cast<size_t>(j)].dlambda(std::norm(z[j]));
    for (int k = 0; k < n; ++k)
      if (k != j) c += a(j, k) * std::norm(z[k]);
    d[j] = c * z[j];
  }
  return d;
}

int EffectiveHamiltonian::frequency_index(double L) const {
  const double tau = model ? default_tau(model->basis.e) : 1e-9;
  for (size_t i = 0; i < Lambda.size(); ++i)
    if (std::abs(Lambda[i] - L) <= tau) return static_cast<int>(i);
  return -1;
}

EffectiveHamiltonian effective_hamiltonian(const HamiltonianExpansion& ex, const ResonanceTable& table) {
  const Model& m = *ex.model;
  const int n = m.modes();
  EffectiveHamiltonian H;
  H.model = &m;
  H.a = Mat::Zero(n, n);
  for (const auto& t : ex.scalar) {
    if (!(t.mono.mu == t.mono.nu)) continue;
    std::vector<int> idx;
    for (int j = 0; j < n; ++j)
      for (int r = 0; r < t.mono.mu[static_cast<size_t>(j)]; ++r) idx.push_back(j);
    if (idx.size() == 2 && idx[0] != idx[1]) {
      H.a(idx[0], idx[1]) += t.coef.real();
      H.a(idx[1], idx[0]) += t.coef.real();
    }
  }
  for (const auto& p : table.M) {
    Channel c;
    c.mono = p;
    c.L = p.frequency(m.basis.e);
    c.G = CVec::Zero(m.op.size());
    c.source = "beyond truncation";
    for (const auto& t : ex.vector)
      if (t.mono == p) {
        c.G = t.G;
        c.source = "expansion";
      }
    c.norm = std::sqrt(m.op.mass(c.G));
    H.channels.push_back(std::move(c));
  }
  H.Lambda = table.Lambda;
  H.ML.assign(H.Lambda.size(), {});
  for (size_t i = 0; i < H.channels.size(); ++i) {
    const int f = table.frequency_index(H.channels[i].L);
    if (f < 0) fail(ErrorKind::domain, "channel frequency missing from the table");
    H.ML[static_cast<size_t>(f)].push_back(static_cast<int>(i));
  }
  return H;
}

}  // namespace nls
