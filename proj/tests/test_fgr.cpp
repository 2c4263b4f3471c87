#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "nls/error.hpp"
#include "nls/fgr.hpp"

using namespace nls;

namespace {

const Model& model() {
  static Model m = build_model(fx::two_well_op(1200));
  return m;
}

const EffectiveHamiltonian& effective() {
  static HamiltonianExpansion ex = expand_energy(model());
  static EffectiveHamiltonian H = effective_hamiltonian(ex, build_table(model().basis.e));
  return H;
}

const FgrTable& table() {
  static FgrTable t = build_fgr_table(effective());
  return t;
}

double lead_L() { return 2 * model().basis.e[1] - model().basis.e[0]; }

// Two channels sharing L = 2 e_2 - e_1 with unrelated profiles.
const FgrTable& synthetic() {
  static FgrTable t = [] {
    const auto& m = model();
    std::mt19937_64 rng(21);
    std::vector<Channel> ch(2);
    ch[0].mono = {{1, 0}, {0, 2}};
    ch[1].mono = {{2, 0}, {1, 2}};
    for (auto& c : ch) {
      c.L = c.mono.frequency(m.basis.e);
      c.G = project_continuous(m.basis, fx::random_localized(rng, m.op.grid, 3));
    }
    return build_fgr_table(m.op, m.basis, ch);
  }();
  return t;
}

CVec zvec(cplx a, cplx b) {
  CVec z(2);
  z << a, b;
  return z;
}

}  // namespace

TEST_CASE("table layout and gram structure") {
  const auto& t = table();
  REQUIRE(!t.levels.empty());
  CHECK(t.level_index(lead_L()) >= 0);
  CHECK(t.gram_defect() < 1e-10);
  CHECK(synthetic().gram_defect() < 1e-10);
  CHECK_THROWS_AS(t.level_index(1.2345), Error);
  // The stored pairing equals a fresh density evaluation.
  const auto& lv = t.level(lead_L());
  for (size_t a = 0; a < lv.monos.size(); ++a)
    if (lv.monos[a] == Monomial{{1, 0}, {0, 2}}) {
      const cplx direct = delta_pairing(model().op, lv.L, lv.G[a], lv.G[a]);
      CHECK(std::abs(lv.P(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(a)) - direct) <=
            1e-13 * std::abs(direct));
      CHECK(direct.real() > 0);
    }
}

TEST_CASE("G_L assembly") {
  const auto& t = synthetic();
  const double L = lead_L();
  CHECK(g_l(t, L, zvec(0, 0)).norm() == 0.0);
  const CVec z = zvec(std::polar(0.3, 0.4), std::polar(0.2, -1.3));
  const auto& lv = t.level(L);
  CVec hand = CVec::Zero(model().op.size());
  hand += z[0] * std::pow(std::conj(z[1]), 2) * lv.G[0];
  hand += z[0] * z[0] * std::conj(z[0]) * std::pow(std::conj(z[1]), 2) * lv.G[1];
  hand *= std::sqrt(std::numbers::pi);
  CHECK((g_l(t, L, z) - hand).norm() <= 1e-14 * hand.norm());
  // Single channel along a real ray scales as t^2.
  const auto& f = table();
  const double r1 = g_l(f, L, zvec(1.0, 0.1)).norm(), r2 = g_l(f, L, zvec(1.0, 0.2)).norm();
  CHECK(r2 / r1 == doctest::Approx(4.0).epsilon(1e-12));
  CHECK_THROWS_AS(g_l(f, -3.0, z), Error);
}

TEST_CASE("Gamma_L is a nonnegative quadratic form") {
  const double L = lead_L();
  for (const FgrTable* t : {&table(), &synthetic()}) {
    auto samples = sphere_samples(2, {0.05, 0.2, 1.0}, 334, 7);
    double worst = 0;
    for (const auto& z : samples) worst = std::min(worst, gamma_l(*t, L, z));
    CHECK(worst >= -1e-12);
  }
  CHECK(gamma_l(table(), L, zvec(0, 0)) == 0.0);
  // Equals L times the density pairing of the assembled G_L.
  const CVec z = zvec(std::polar(0.4, 0.1), std::polar(0.7, 2.0));
  const CVec g = g_l(synthetic(), L, z);
  const double direct = L * delta_pairing(model().op, L, g, g).real();
  CHECK(gamma_l(synthetic(), L, z) == doctest::Approx(direct).epsilon(1e-10));
}

TEST_CASE("single channel homogeneity") {
  const double L = lead_L();
  const CVec z = zvec(std::polar(0.3, 0.2), std::polar(0.25, 1.1));
  const double g0 = gamma_l(table(), L, z);
  REQUIRE(g0 > 0);
  for (double s : {0.5, 2.0})
    CHECK(gamma_l(table(), L, CVec(s * z)) == doctest::Approx(std::pow(s, 6) * g0).epsilon(1e-12));
}

TEST_CASE("spectral measure backends agree") {
  SpectralMeasureBackend smooth;
  smooth.kind = MeasureKind::smoothed_eigensum;
  const FgrTable t2 = build_fgr_table(effective(), smooth);
  const CVec z = zvec(0.1, 0.05);
  const double a = gamma_l(table(), lead_L(), z), b = gamma_l(t2, lead_L(), z);
  MESSAGE("generalized eigenfunction " << a << ", smoothed eigensum " << b);
  CHECK(std::abs(a - b) <= 0.01 * a);
}

TEST_CASE("H4 ratio") {
  // Along a ray the single-channel ratio is constant.
  std::vector<CVec> ray;
  for (double s : {0.1, 0.3, 1.0}) ray.push_back(s * zvec(std::polar(0.6, 0.3), std::polar(0.8, -0.2)));
  FgrTable lead = synthetic();
  lead.levels[0].monos.resize(1);
  lead.levels[0].G.resize(1);
  lead.levels[0].P = lead.levels[0].P.topLeftCorner(1, 1).eval();
  auto r = check_h4(lead, ray);
  CHECK(r.c_low == doctest::Approx(r.c_high).epsilon(1e-12));
  CHECK(r.holds);

  auto full = check_h4(table(), sphere_samples(2, {0.1, 0.5, 1.0}, 50, 3));
  CHECK(full.samples == 150);
  CHECK(full.c_low > 0);
  CHECK(full.c_high >= full.c_low);

  FgrTable zero = synthetic();
  for (auto& lv : zero.levels) {
    for (auto& g : lv.G) g.setZero();
    lv.P.setZero();
  }
  auto z = check_h4(zero, sphere_samples(2, {0.5}, 20, 4));
  CHECK(z.c_high == 0.0);
  CHECK_FALSE(z.holds);
}

TEST_CASE("principal value contributions cancel") {
  const double L = lead_L();
  CHECK(pv_cancellation_check(table(), L, zvec(0, 0)).residual == 0.0);
  FgrTable lead = synthetic();
  lead.levels[0].monos.resize(1);
  lead.levels[0].G.resize(1);
  auto one = pv_cancellation_check(lead, L, zvec(std::polar(0.5, 0.3), std::polar(0.4, 1.7)));
  CHECK(one.scale > 0);
  CHECK(one.residual <= 1e-12 * one.scale);
  std::mt19937_64 rng(9);
  std::normal_distribution<double> d;
  for (int i = 0; i < 3; ++i) {
    const CVec z = zvec(cplx(d(rng), d(rng)), cplx(d(rng), d(rng)));
    auto c = pv_cancellation_check(synthetic(), L, z);
    CHECK(c.relative() < 1e-9);
  }
}
