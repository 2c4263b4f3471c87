#include <numbers>
#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "nls/continuum.hpp"
#include "nls/error.hpp"

using namespace nls;

namespace {

SpectralMeasureBackend ge() { return {}; }
SpectralMeasureBackend se() {
  SpectralMeasureBackend b;
  b.kind = MeasureKind::smoothed_eigensum;
  return b;
}

// w = r exp(-a r^2) on the grid.
CVec gaussian_w(const RadialGrid& g, double a) {
  CVec f(g.n_points);
  for (int k = 0; k < g.n_points; ++k) f[k] = g.r(k) * std::exp(-a * g.r(k) * g.r(k));
  return f;
}

// Lorentzian oracle on a long free box: (1/pi) Im <(H - L - i eps)^{-1} F, F>,
// extrapolated quadratically in eps.
double lorentzian_oracle(double a, double L) {
  const double h = 30.0 / 1201.0;
  const int n = 32 * 1201 - 1;
  auto op = build_operator(RadialGrid::make(h * (n + 1), n), make_potential("zero", {}));
  CVec F = gaussian_w(op.grid, a);
  std::vector<double> eps{0.1, 0.05, 0.025};
  std::vector<cplx> vals;
  for (double e : eps) {
    CBandLU lu(op.H, CVec::Constant(n, cplx(-L, -e)));
    CVec x = lu.solve(F);
    vals.push_back(op.dot(x, F).imag() / std::numbers::pi);
  }
  return extrapolate_to_zero(eps, vals).real();
}

}  // namespace

TEST_CASE("zero functions pair to zero") {
  auto op = fx::two_well_op(600);
  CVec z = CVec::Zero(op.size());
  CHECK(delta_pairing(op, 2.0, z, z, ge()) == cplx(0.0));
  CHECK(std::abs(delta_pairing(op, 2.0, z, z, se())) == 0.0);
}

TEST_CASE("non-positive energy is a domain error") {
  auto op = fx::free_op(200);
  CVec f = CVec::Ones(op.size());
  CHECK_THROWS_AS(delta_pairing(op, 0.0, f, f), Error);
  CHECK_THROWS_AS(delta_pairing(op, -1.0, f, f), Error);
}

TEST_CASE("free gaussian: analytic transform, Lorentzian oracle, both backends") {
  const double a = 0.5, L = 1.0, k = 1.0;
  auto op = fx::free_op(1200, 30.0);
  CVec F = gaussian_w(op.grid, a);
  // int_0^inf r exp(-a r^2) sin(k r) dr
  const double I = std::sqrt(std::numbers::pi) * k * std::exp(-k * k / (4 * a)) /
                   (4 * std::pow(a, 1.5));
  const double analytic = I * I / (std::numbers::pi * k);
  const double oracle = lorentzian_oracle(a, L);
  CHECK(oracle == doctest::Approx(analytic).epsilon(1e-3));
  const double dge = delta_pairing(op, L, F, F, ge()).real();
  CHECK(dge == doctest::Approx(analytic).epsilon(1e-4));
  // Low L needs a longer box for the level spacing; the default factor is enough.
  const double dse = delta_pairing(op, L, F, F, se()).real();
  CHECK(dse == doctest::Approx(analytic).epsilon(1e-3));
}

TEST_CASE("positivity and conjugate symmetry") {
  auto op = fx::two_well_op(1200);
  std::mt19937_64 rng(5);
  SpectralDensity dens(op, 15.07, ge());
  for (int t = 0; t < 5; ++t) {
    CVec F = fx::random_localized(rng, op.grid), G = fx::random_localized(rng, op.grid);
    const cplx ff = dens.pairing(F, F);
    CHECK(ff.real() >= -1e-12);
    CHECK(std::abs(ff.imag()) <= 1e-12 * std::abs(ff) + 1e-300);
    const cplx fg = dens.pairing(F, G), gf = dens.pairing(G, F);
    CHECK(std::abs(fg - std::conj(gf)) <= 1e-12 * std::abs(fg));
  }
}

TEST_CASE("backends agree on the two-well potential") {
  auto op = fx::two_well_op(1200);
  SpectralDensity a(op, 15.07, ge()), b(op, 15.07, se());
  std::mt19937_64 rng(21);
  for (int t = 0; t < 4; ++t) {
    CVec F = fx::random_localized(rng, op.grid);
    const double x = a.pairing(F, F).real(), y = b.pairing(F, F).real();
    CHECK(std::abs(x - y) <= 0.01 * std::abs(x));
  }
}

TEST_CASE("eigensum reports an unresolved width schedule") {
  auto op = fx::two_well_op(600);
  auto b = se();
  b.width_multiples = {0.05, 0.1, 0.15};
  std::mt19937_64 rng(2);
  CVec F = fx::random_localized(rng, op.grid);
  CHECK_THROWS_AS(SpectralDensity(op, 15.0 + 0.031, b).pairing(F, F), Error);
}

TEST_CASE("limiting resolvent") {
  auto op = fx::two_well_op(1200);
  auto basis = eigenbasis(op);
  const double L = 2.0 * basis.e[1] - basis.e[0];
  std::mt19937_64 rng(8);
  CVec f = fx::random_localized(rng, op.grid, 4, false);
  SUBCASE("zero input") {
    CHECK(limiting_resolvent(op, basis, L, CVec::Zero(op.size()), +1).norm() == 0.0);
  }
  SUBCASE("Sokhotski-Plemelj split against the spectral density") {
    CVec x = limiting_resolvent(op, basis, L, f, +1);
    CVec pf = project_continuous(basis, f);
    const double lhs = op.dot(x, pf.conjugate()).imag();
    const double d = delta_pairing(op, L, pf, pf).real();
    CHECK(std::abs(lhs - std::numbers::pi * d) <= 0.02 * std::numbers::pi * d);
  }
  SUBCASE("sign flip conjugates for real f") {
    CVec xp = limiting_resolvent(op, basis, L, f, +1);
    CVec xm = limiting_resolvent(op, basis, L, f, -1);
    CHECK((xm - xp.conjugate()).norm() <= 1e-8 * xp.norm());
  }
  SUBCASE("interior residual") {
    LimitingResolvent R(op, basis, L, +1);
    R.apply(f);
    CHECK(R.last_interior_residual() < 1e-6);
  }
  SUBCASE("epsilon fallback agrees with the absorbing layer in the interior") {
    LimitingOptions eo;
    eo.mode = LimitMode::epsilon;
    CVec xa = limiting_resolvent(op, basis, L, f, +1);
    CVec xe = limiting_resolvent(op, basis, L, f, +1, eo);
    CVec pf = project_continuous(basis, f);
    const cplx pa = op.dot(xa, pf.conjugate()), pe = op.dot(xe, pf.conjugate());
    CHECK(std::abs(pa - pe) <= 0.05 * std::abs(pa));
  }
  SUBCASE("principal value is real for real input") {
    CVec pv = principal_value(op, basis, L, f);
    CHECK(pv.imag().norm() <= 1e-12 * pv.norm());
  }
}
