#include <cmath>
#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "nls/error.hpp"
#include "nls/modulation.hpp"

using namespace nls;

namespace {

const Model& model() {
  static Model m = build_model(fx::two_well_op(1200));
  return m;
}

double norm(const CVec& v) { return std::sqrt(model().op.mass(v)); }

CVec random_eta(std::mt19937_64& rng, double size) {
  const auto& m = model();
  CVec f = project_continuous(m.basis, fx::random_localized(rng, m.op.grid));
  return f * (size / norm(f));
}

CVec zvec(cplx a, cplx b) {
  CVec z(2);
  z << a, b;
  return z;
}

}  // namespace

TEST_CASE("correction operator at the origin") {
  const auto& m = model();
  ROperator R = build_r_operator(m, zvec(0.0, 0.0));
  for (int j = 0; j < 2; ++j) {
    CHECK((R.B[j] + m.basis.phi[j].cast<cplx>()).norm() < 1e-12 * m.basis.phi[j].norm());
    CHECK(R.C[j].norm() < 1e-12);
  }
  std::mt19937_64 rng(1);
  CVec eta = random_eta(rng, 1.0);
  CHECK((R.apply(eta, m.basis, m.h()) - eta).norm() < 1e-12 * eta.norm());
}

TEST_CASE("range condition and quadratic deviation from the identity") {
  const auto& m = model();
  std::mt19937_64 rng(2);
  CVec f = fx::random_localized(rng, m.op.grid);
  CVec eta = random_eta(rng, 1.0);
  std::vector<double> rho{0.02, 0.04, 0.08}, dev;
  for (double r : rho) {
    CVec z = zvec(std::polar(r, 0.3), std::polar(0.7 * r, -1.2));
    ROperator R = build_r_operator(m, z);
    CHECK(range_residual(m, z, R.apply(f, m.basis, m.h())) < 1e-9);
    CHECK(range_residual(m, z, R.apply(eta, m.basis, m.h())) < 1e-9);
    // P_c R[z] = P_c
    CHECK((project_continuous(m.basis, CVec(R.apply(f, m.basis, m.h()))) -
           project_continuous(m.basis, f))
              .norm() < 1e-12 * f.norm());
    dev.push_back(norm(R.apply(eta, m.basis, m.h()) - eta));
  }
  const double slope = std::log(dev[2] / dev[0]) / std::log(rho[2] / rho[0]);
  CHECK(slope >= 1.9);
}

TEST_CASE("gauge covariance of the correction operator") {
  const auto& m = model();
  std::mt19937_64 rng(3);
  CVec eta = random_eta(rng, 1.0);
  const CVec z = zvec(std::polar(0.1, 0.5), std::polar(0.08, 2.0));
  const cplx g = std::polar(1.0, 0.9);
  ROperator R0 = build_r_operator(m, z), R1 = build_r_operator(m, CVec(g * z));
  CVec lhs = R1.apply(eta, m.basis, m.h());
  CVec rhs = g * R0.apply(CVec(std::conj(g) * eta), m.basis, m.h());
  CHECK((lhs - rhs).norm() < 1e-10 * eta.norm());
}

TEST_CASE("dense inverse matches the Neumann series") {
  const auto& m = model();
  const CVec z = zvec(std::polar(0.1, 0.2), std::polar(0.1, 1.0));
  ROperator R = build_r_operator(m, z);
  Mat Wn = neumann_inverse(m, z, 40);
  CHECK((Wn - R.W).norm() < 1e-10 * R.W.norm());
  // Truncation error falls with the number of terms.
  CHECK((neumann_inverse(m, z, 3) - R.W).norm() < (neumann_inverse(m, z, 2) - R.W).norm());
}

TEST_CASE("decomposition basics") {
  const auto& m = model();
  SUBCASE("zero") {
    auto s = decompose(m, CVec::Zero(m.op.size()));
    CHECK(s.z.norm() == 0.0);
    CHECK(s.eta.norm() == 0.0);
  }
  SUBCASE("a single bound state is recovered with zero radiation") {
    const cplx z1 = std::polar(0.15, 0.3);
    CVec u = m.fam[0].evaluate(z1);
    auto s = decompose(m, u);
    CHECK(std::abs(s.z[0] - z1) < 1e-10);
    CHECK(std::abs(s.z[1]) < 1e-10);
    CHECK(norm(s.eta) < 1e-10 * norm(u));
  }
  SUBCASE("gauge") {
    std::mt19937_64 rng(4);
    ModulationState st{zvec(std::polar(0.1, 0.4), std::polar(0.12, -0.3)), random_eta(rng, 0.01)};
    CVec u = synthesize(m, st);
    const cplx g = std::polar(1.0, 1.3);
    auto a = decompose(m, u), b = decompose(m, CVec(g * u));
    CHECK((b.z - g * a.z).norm() < 1e-10);
    CHECK((b.eta - g * a.eta).norm() < 1e-10 * a.eta.norm());
  }
}

TEST_CASE("round trips") {
  const auto& m = model();
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ph(-3.14, 3.14), amp(0.02, 0.18);
  for (int t = 0; t < 4; ++t) {
    ModulationState st{zvec(std::polar(amp(rng), ph(rng)), std::polar(amp(rng), ph(rng))),
                       random_eta(rng, 0.02)};
    CVec u = synthesize(m, st);
    auto back = decompose(m, u);
    CHECK((back.z - st.z).norm() < 1e-8 * st.z.norm());
    CHECK(norm(back.eta - st.eta) < 1e-8 * norm(st.eta));
    for (int j = 0; j < 2; ++j) CHECK(std::abs(m.op.dot(back.eta, m.basis.phi[j].cast<cplx>())) < 1e-10);
    // Independent direction: field -> coordinates -> field.
    CVec u2 = synthesize(m, back);
    CHECK(norm(u2 - u) < 1e-10 * norm(u));
    // |z| + ||eta|| controlled by ||u||.
    CHECK(back.z.norm() + norm(back.eta) <= 3.0 * norm(u));
  }
}

TEST_CASE("smaller fields need no more Newton steps") {
  const auto& m = model();
  std::mt19937_64 rng(6);
  ModulationState st{zvec(std::polar(0.16, 0.4), std::polar(0.14, 2.0)), random_eta(rng, 0.05)};
  CVec u = synthesize(m, st);
  int prev = 1000;
  for (int k = 0; k < 4; ++k) {
    auto s = decompose(m, u);
    CHECK(s.iters <= prev);
    prev = s.iters;
    u *= 0.5;
  }
}

TEST_CASE("chart radius is enforced") {
  const auto& m = model();
  ModulationState st{zvec(0.3, 0.0), CVec::Zero(m.op.size())};
  try {
    synthesize(m, st);
    FAIL("expected chart error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::chart);
  }
}
