#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "nls/energy.hpp"
#include "nls/error.hpp"
#include "nls/modulation.hpp"

using namespace nls;

namespace {

const Model& model() {
  static Model m = build_model(fx::two_well_op(1200));
  return m;
}

CVec zvec(cplx a, cplx b) {
  CVec z(2);
  z << a, b;
  return z;
}

CVec random_eta(std::mt19937_64& rng, double size) {
  const auto& m = model();
  CVec f = project_continuous(m.basis, fx::random_localized(rng, m.op.grid));
  return f * (size / std::sqrt(m.op.mass(f)));
}

double exact_energy(const CVec& z, const CVec& eta) {
  const auto& m = model();
  return m.op.energy(synthesize(m, {z, eta}));
}

}  // namespace

TEST_CASE("zero amplitude reduces to the radiation energy") {
  const auto& m = model();
  auto ex = expand_energy(m);
  std::mt19937_64 rng(1);
  CVec eta = random_eta(rng, 0.1);
  const double a = ex.energy(zvec(0, 0), eta), b = m.op.energy(eta);
  CHECK(std::abs(a - b) <= 1e-13 * std::abs(b));
}

TEST_CASE("truncation residual scales past the quartic order") {
  const auto& m = model();
  auto ex = expand_energy(m);
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 3; ++trial) {
    const CVec z = zvec(std::polar(0.16, 0.3 + trial), std::polar(0.14, -0.7 * trial));
    const CVec eta = random_eta(rng, 0.05);
    std::vector<double> s{1.0, 0.5, 0.25}, res;
    for (double f : s) {
      const CVec zs = f * z, es = f * eta;
      res.push_back(std::abs(ex.energy(zs, es) - exact_energy(zs, es)));
    }
    const double p = std::log(res[0] / res[2]) / std::log(4.0);
    CHECK(p >= 4.8);
    // The quadratic truncation is visibly worse.
    auto ex2 = expand_energy(m, 2);
    CHECK(std::abs(ex2.energy(z, eta) - exact_energy(z, eta)) > 10 * res[0]);
  }
}

TEST_CASE("leading radiation coupling matches mixed derivatives of the exact energy") {
  const auto& m = model();
  auto ex = expand_energy(m);
  const Monomial lead{{1, 0}, {0, 2}};
  const VectorTerm* term = nullptr;
  for (const auto& t : ex.vector)
    if (t.mono == lead) term = &t;
  REQUIRE(term != nullptr);
  // Stored profile equals P_c kappa phi_1 phi_2^2.
  Vec g = m.op.kappa.cwiseProduct(m.basis.phi[0]).cwiseProduct(m.basis.phi[1].cwiseAbs2());
  CHECK((term->G - project_continuous(m.basis, g).cast<cplx>()).norm() < 1e-14 * g.norm());

  // Oracle: torus DFT in the phases, central difference in a real eta direction,
  // polynomial fit in r^2.
  std::mt19937_64 rng(3);
  CVec v = project_continuous(m.basis, fx::random_localized(rng, m.op.grid, 4, false));
  v /= std::sqrt(m.op.mass(v));
  const double eps = 1e-4;
  const int K = 8;
  std::vector<double> rs{0.02, 0.04, 0.08}, cs;
  for (double r : rs) {
    cplx acc = 0;
    for (int a = 0; a < K; ++a)
      for (int b = 0; b < K; ++b) {
        const double t1 = 2 * std::numbers::pi * a / K, t2 = 2 * std::numbers::pi * b / K;
        const CVec z = zvec(std::polar(r, t1), std::polar(r, t2));
        const double d = (exact_energy(z, CVec(eps * v)) - exact_energy(z, CVec(-eps * v))) / (2 * eps);
        acc += d * std::polar(1.0, -(t1 - 2 * t2));
      }
    cs.push_back((acc / double(K * K)).real() / (r * r * r));
  }
  // Quadratic in r^2 through three points, value at r = 0.
  const double x0 = rs[0] * rs[0], x1 = rs[1] * rs[1], x2 = rs[2] * rs[2];
  const double c0 = cs[0] * x1 * x2 / ((x0 - x1) * (x0 - x2)) +
                    cs[1] * x0 * x2 / ((x1 - x0) * (x1 - x2)) +
                    cs[2] * x0 * x1 / ((x2 - x0) * (x2 - x1));
  const double expected = m.op.dot(term->G, v.eval()).real();
  CHECK(std::abs(c0 - expected) <= 1e-4 * std::abs(expected));
}

TEST_CASE("quadratic radiation term for a single mode") {
  const auto& m = model();
  auto ex = expand_energy(m);
  std::mt19937_64 rng(4);
  const CVec eta = random_eta(rng, 1.0);
  std::vector<double> rel;
  for (double r : {0.1, 0.05}) {
    const CVec z = zvec(std::polar(r, 0.4), 0.0);
    // Bilinear part of eta_part with the cubic and quartic pieces removed by symmetry.
    const double eps = 1e-3;
    const cplx qp = ex.eta_part(z, CVec(eps * eta)), qm = ex.eta_part(z, CVec(-eps * eta));
    const double quad = 0.5 * (qp + qm).real() / (eps * eps) -
                        m.op.dot(m.op.apply(eta), CVec(eta.conjugate())).real() -
                        0.5 * eps * eps * m.h() * m.op.kappa.dot(eta.cwiseAbs2().cwiseAbs2());
    // Direct assembly with a = z_1 phi_1.
    const CVec a = z[0] * m.basis.phi[0].cast<cplx>();
    cplx direct = 0;
    for (Eigen::Index k = 0; k < a.size(); ++k) {
      const cplx w = a[k] * std::conj(eta[k]);
      direct += m.op.kappa[k] * (std::norm(a[k]) * std::norm(eta[k]) + 2.0 * a[k] * std::conj(eta[k]) * w.real());
    }
    direct *= m.h();
    CHECK(std::abs(quad - direct.real()) <= 1e-9 * std::abs(direct));
    // Same form with the full Q differs only at higher order in |z|.
    const CVec Q = m.fam[0].evaluate(z[0]);
    cplx full = 0;
    for (Eigen::Index k = 0; k < Q.size(); ++k) {
      const cplx w = Q[k] * std::conj(eta[k]);
      full += m.op.kappa[k] * (std::norm(Q[k]) * std::norm(eta[k]) + 2.0 * Q[k] * std::conj(eta[k]) * w.real());
    }
    full *= m.h();
    rel.push_back(std::abs(full.real() - direct.real()) / std::abs(direct));
  }
  CHECK(rel[1] < 0.3 * rel[0]);
}

TEST_CASE("gauge invariance and reality") {
  const auto& m = model();
  auto ex = expand_energy(m);
  std::mt19937_64 rng(5);
  std::vector<std::pair<CVec, CVec>> states;
  for (int i = 0; i < 5; ++i)
    states.push_back({zvec(std::polar(0.1, 0.3 * i), std::polar(0.12, -0.5 * i)), random_eta(rng, 0.05)});
  auto r0 = verify_gauge_structure(ex, states, {0.0});
  CHECK(r0.max_relative_change == 0.0);
  auto r = verify_gauge_structure(ex, states, {std::numbers::pi / 3, std::numbers::pi, 2.1});
  CHECK(r.max_relative_change < 1e-10);
  CHECK(r.max_imaginary < 1e-12);
  for (const auto& t : ex.scalar) {
    // Every scalar monomial is balanced, hence gauge invariant.
    int mu = 0, nu = 0;
    for (int x : t.mono.mu) mu += x;
    for (int x : t.mono.nu) nu += x;
    CHECK(mu == nu);
  }
}

TEST_CASE("symplectic coefficients") {
  const auto& m = model();
  Vec rho(4);
  rho << 0.0, 0.01, 0.02, 0.2;
  auto s = symplectic_coefficients(m, rho);
  for (int j = 0; j < 2; ++j) {
    CHECK(s.gamma[j][0] == 0.0);
    CHECK(s.varpi[j][0] == 0.0);
    for (int i = 0; i < 4; ++i) CHECK(std::abs((1 + s.varpi[j][i]) * (1 + s.gamma[j][i]) - 1) < 1e-12);
    // Direct quadrature of <q, q> + 2 t <q, q'> from the sampled profiles.
    const auto& f = m.fam[j];
    const double t = 1e-4;
    const Vec q = f.qhat(t), qp = f.qhat_prime(t);
    const double direct = m.h() * (q.squaredNorm() + 2 * t * q.dot(qp));
    CHECK(s.gamma[j][1] == doctest::Approx(direct).epsilon(1e-10));
    CHECK(s.gamma[j][1] > 0);
    // Leading order is three times <q, q>.
    CHECK(s.gamma[j][1] == doctest::Approx(3.0 * m.h() * q.squaredNorm()).epsilon(1e-3));
    const double p = std::log(s.gamma[j][2] / s.gamma[j][1]) / std::log(2.0);
    CHECK(p >= 3.8);
  }
}

TEST_CASE("truncation order beyond quartic is rejected") {
  CHECK_THROWS_AS(expand_energy(model(), 6), Error);
}
