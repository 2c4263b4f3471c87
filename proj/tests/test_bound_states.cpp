#include <cmath>

#include "doctest.h"
#include "fixtures.hpp"
#include "nls/bound_states.hpp"
#include "nls/error.hpp"

using namespace nls;

namespace {

struct Setup {
  DiscreteOperator op = fx::two_well_op(1200);
  EigenBasis basis = eigenbasis(op);
  BoundStateFamily f1 = solve_branch(op, basis, 0);
  BoundStateFamily f2 = solve_branch(op, basis, 1);
};

const Setup& setup() {
  static Setup s;
  return s;
}

// Composite Simpson on the padded grid r_0 = 0, r_{n+1} = r_max (w vanishes at both).
double simpson_phi4(const DiscreteOperator& op, const Vec& phi) {
  const int n = op.size();
  const double h = op.h();
  std::vector<double> g(static_cast<size_t>(n + 2), 0.0);
  for (int k = 0; k < n; ++k) g[static_cast<size_t>(k + 1)] = op.kappa[k] * std::pow(phi[k], 4);
  const int m = (n + 1) % 2 == 0 ? n + 1 : n;  // even number of intervals
  double s = g[0] + g[static_cast<size_t>(m)];
  for (int k = 1; k < m; ++k) s += (k % 2 ? 4.0 : 2.0) * g[static_cast<size_t>(k)];
  return s * h / 3.0;
}

}  // namespace

TEST_CASE("branch endpoint at zero amplitude") {
  const auto& s = setup();
  for (const auto* fam : {&s.f1, &s.f2}) {
    CHECK(fam->samples.front().t == 0.0);
    CHECK(fam->evaluate(0.0).norm() == 0.0);
    CHECK(fam->energy(0.0) == fam->e);
    CHECK(fam->lambda(0.0) == 0.0);
    CHECK(fam->halvings == 0);
    CHECK(fam->rho_max() == doctest::Approx(0.4));
  }
}

TEST_CASE("energy shift is quadratic with the quartic coefficient") {
  const auto& s = setup();
  for (const auto* fam : {&s.f1, &s.f2}) {
    auto c = certify(*fam, s.op);
    const double oracle = simpson_phi4(s.op, fam->phi);
    CHECK(std::abs(c.quad_coefficient - oracle) <= 0.02 * oracle);
    CHECK(c.q_exponent >= 2.9);
    CHECK(c.q_exponent <= 3.1);
    CHECK(c.q_exponent_low >= 2.9);
    CHECK(c.q_exponent_low <= 3.1);
    CHECK(c.max_residual < 1e-10);
    CHECK(c.max_orthogonality < 1e-10);
  }
}

TEST_CASE("gauge covariance") {
  const auto& s = setup();
  const double rho = 0.23;
  CVec a = s.f1.evaluate(cplx(0.0, rho));
  CVec b = s.f1.evaluate(rho);
  CHECK((a - I * b).norm() <= 1e-14 * b.norm());
  const cplx z = std::polar(rho, 0.7);
  CVec c = s.f2.evaluate(rho);
  CHECK((s.f2.evaluate(z) - std::polar(1.0, 0.7) * c).norm() <= 1e-14 * c.norm());
}

TEST_CASE("interpolated states agree with a fresh Newton solve") {
  const auto& s = setup();
  for (const auto* fam : {&s.f1, &s.f2}) {
    for (size_t i = 5; i + 1 < fam->samples.size(); i += 7) {
      const double t = 0.5 * (fam->samples[i].t + fam->samples[i + 1].t);
      Vec guess = fam->psi(t);
      BranchPoint p = solve_point(s.op, s.basis, fam->j, t, &guess, fam->f(t));
      REQUIRE(p.converged);
      double E = 0;
      CVec Q = fam->evaluate(std::sqrt(t), &E);
      CHECK(stationary_residual(s.op, Q, E) < 1e-9);
      CHECK(std::abs(fam->f(t) - p.f) <= 1e-8 * std::abs(p.f));
    }
  }
}

TEST_CASE("derivative profiles against finite differences") {
  const auto& s = setup();
  const cplx z = std::polar(0.2, 0.4);
  auto [DR, DI] = s.f1.dQ(z);
  double prev_err = 0;
  for (double d : {1e-3, 5e-4}) {
    CVec fr = (s.f1.evaluate(z + d) - s.f1.evaluate(z - d)) / (2 * d);
    CVec fi = (s.f1.evaluate(z + I * d) - s.f1.evaluate(z - I * d)) / (2 * d);
    const double err = (fr - DR).norm() + (fi - DI).norm();
    CHECK(err <= 1e-4 * DR.norm());
    if (prev_err > 0) CHECK(err < prev_err);
    prev_err = err;
  }
  // The antiholomorphic part carries z^2.
  auto [dz, dzb] = s.f1.derivative_profiles(z);
  const double t = std::norm(z);
  CHECK((dzb - z * z * s.f1.qhat_prime(t).cast<cplx>()).norm() <= 1e-14 * dzb.norm());
  CHECK((dz - (s.f1.qhat(t) + t * s.f1.qhat_prime(t)).cast<cplx>()).norm() <= 1e-14 * dz.norm());
}

TEST_CASE("lambda and its derivative are consistent") {
  const auto& s = setup();
  for (const auto* fam : {&s.f1, &s.f2}) {
    const double t = 0.02, d = 1e-4;
    const double fd = (fam->lambda(t + d) - fam->lambda(t - d)) / (2 * d);
    CHECK(std::abs(fd - fam->dlambda(t)) <= 1e-5 * std::abs(fam->dlambda(t)));
    // Leading order: lambda ~ t^2 phi4 / 2, gamma ~ 3 t^2 |psi(0)|^2.
    const double phi4 = fam->samples[0].f;
    const double ts = 1e-4;
    CHECK(fam->lambda(ts) == doctest::Approx(0.5 * ts * ts * phi4).epsilon(1e-3));
    const double g0 = 3.0 * ts * ts * fam->h * fam->samples[0].psi.squaredNorm();
    CHECK(fam->gamma(ts) == doctest::Approx(g0).epsilon(1e-3));
    CHECK(fam->varpi(ts) == doctest::Approx(1.0 / (1.0 + fam->gamma(ts)) - 1.0));
  }
}

TEST_CASE("stationary identity between two branches") {
  const auto& s = setup();
  for (double r : {0.05, 0.2, 0.35})
    CHECK(rescaled_residual(s.op, s.basis, s.f1, s.f2, r, std::polar(r, 1.1)) < 1e-9);
}

TEST_CASE("amplitude beyond the certified radius is reported") {
  const auto& s = setup();
  try {
    s.f1.evaluate(0.41);
    FAIL("expected branch radius error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::branch_radius);
  }
}

TEST_CASE("bad mode index") {
  const auto& s = setup();
  CHECK_THROWS_AS(solve_branch(s.op, s.basis, 2), Error);
}
