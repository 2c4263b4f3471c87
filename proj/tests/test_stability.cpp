#include <cmath>

#include "doctest.h"
#include "fixtures.hpp"
#include "nls/error.hpp"
#include "nls/stability.hpp"

using namespace nls;

namespace {

const Model& model() {
  static Model m = build_model(fx::two_well_op(1200));
  return m;
}

}  // namespace

TEST_CASE("curve keeps the mass") {
  const auto& m = model();
  const auto s = stationary_profile(m, 1, 0.05);
  CHECK(s.residual < 1e-9);
  auto c0 = curve_psi(m.op, m.basis.phi[0], s.Q, 0.0);
  CHECK(c0.beta == 1.0);
  CHECK((c0.psi - s.Q).norm() == 0.0);
  const double M = m.op.dot(s.Q, s.Q);
  for (double eps : {1e-4, 1e-3, 5e-3, 0.0125}) {
    auto c = curve_psi(m.op, m.basis.phi[0], s.Q, eps);
    CHECK(std::abs(m.op.dot(c.psi, c.psi) - M) <= 1e-12 * M);
  }
  // The radial ground and excited states overlap only through the cubic correction.
  auto c = curve_psi(m.op, m.basis.phi[0], s.Q, 1e-3);
  CHECK(std::abs(c.g2) < 1e-2);
  CHECK(c.g1 == doctest::Approx(1.0 / M).epsilon(1e-3));
  CHECK_THROWS_AS(curve_psi(m.op, m.basis.phi[0], s.Q, 2.0 / std::sqrt(c.g1)), Error);
}

TEST_CASE("orthogonal profile gives g2 = 0") {
  const auto& m = model();
  const Vec Q = 0.05 * m.basis.phi[1];
  Vec q = Q - m.op.dot(Q, m.basis.phi[0]) * m.basis.phi[0];
  auto c = curve_psi(m.op, m.basis.phi[0], q, 1e-3);
  CHECK(std::abs(c.g2) < 1e-14);
}

TEST_CASE("energy decreases along the curve") {
  const auto& m = model();
  std::vector<double> eps;
  for (double e = 1e-3; e <= 1.001e-2; e += 1e-3) eps.push_back(e);
  auto a = instability_certificate(m, 1, 0.05, eps);
  CHECK(a.negative);
  for (double d : a.mass_defect) CHECK(std::abs(d) < 1e-12);
  MESSAGE("slope " << a.slope << " target " << a.target);
  CHECK(a.slope_error() < 0.1);
  // Halving r shrinks the correction to the quadratic slope.
  auto b = instability_certificate(m, 1, 0.025, eps);
  CHECK(b.negative);
  CHECK(b.slope_error() < a.slope_error());

  auto d = instability_certificate(m, 1, 0.04);
  CHECK(d.eps.size() == 8);
  CHECK(d.eps.back() == doctest::Approx(0.01));
  CHECK(d.negative);

  auto z = instability_certificate(m, 1, 0.05, {0.0});
  CHECK(z.gap[0] == 0.0);
  CHECK_THROWS_AS(instability_certificate(m, 0, 0.05), Error);
}

TEST_CASE("ground state positivity") {
  const auto& m = model();
  for (double rho : {1e-3, 0.05, 0.1}) {
    auto p = ground_positivity(m, rho);
    CAPTURE(rho);
    CHECK(std::abs(p.lminus0) < 1e-8);
    CHECK(p.kernel_residual < 1e-9);
    CHECK(p.overlap == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(p.lminus1 > 0);
    CHECK(p.lplus0 > 0);
    CHECK(p.stable);
  }
  auto p = ground_positivity(m, 0.02);
  CHECK(p.lminus1 == doctest::Approx(m.basis.e[1] - m.basis.e[0]).epsilon(0.05));
  CHECK_THROWS_AS(ground_positivity(m, 10.0), Error);
}
