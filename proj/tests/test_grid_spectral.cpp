#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "nls/error.hpp"
#include "nls/spectral.hpp"

using namespace nls;

namespace {

// Dense oracle: full symmetric eigensolver on the assembled matrix.
Vec dense_negative_eigenvalues(const DiscreteOperator& op) {
  Eigen::SelfAdjointEigenSolver<Mat> es(op.H.dense(), Eigen::EigenvaluesOnly);
  std::vector<double> out;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
    if (es.eigenvalues()[i] < 0.0) out.push_back(es.eigenvalues()[i]);
  return Eigen::Map<Vec>(out.data(), static_cast<Eigen::Index>(out.size()));
}

DiscreteOperator gaussian_op(double depth, int n, double r_max = 20.0) {
  return build_operator(RadialGrid::make(r_max, n),
                        make_potential("gaussian", {{"depth", depth}, {"width", 1.0}}));
}

}  // namespace

TEST_CASE("grid invariants") {
  RadialGrid g = RadialGrid::make(10.0, 99);
  CHECK(g.spacing == doctest::Approx(0.1));
  CHECK(g.r(0) == doctest::Approx(0.1));
  CHECK(g.r(98) == doctest::Approx(9.9));
  CHECK_THROWS_AS(RadialGrid::make(10.0, 32), Error);
}

TEST_CASE("operator symmetry on random vectors") {
  std::mt19937_64 rng(7);
  for (auto op : {fx::free_op(400), fx::two_well_op(400)}) {
    Vec f = fx::random_vec(rng, op.size()), g = fx::random_vec(rng, op.size());
    const double a = op.dot(op.apply(f), g), b = op.dot(f, op.apply(g));
    CHECK(std::abs(a - b) <= 1e-12 * std::max(std::abs(a), 1.0) * 10);
    CHECK(std::abs(a - b) / (op.apply(f).norm() * g.norm() * op.h()) < 1e-12);
  }
}

TEST_CASE("potential above floor at r_max is a configuration error") {
  auto wide = make_potential("gaussian", {{"depth", 5.0}, {"width", 6.0}});
  try {
    build_operator(RadialGrid::make(10.0, 200), wide);
    FAIL("expected configuration error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::config);
  }
}

TEST_CASE("free operator has no bound states") {
  auto b = eigenbasis(fx::free_op(600));
  CHECK(b.count() == 0);
}

TEST_CASE("gaussian well with two bound states matches dense oracle") {
  // Depth 25 sits between the second and third binding thresholds.
  auto op = gaussian_op(25.0, 600);
  auto b = eigenbasis(op);
  REQUIRE(b.count() == 2);
  Vec dense = dense_negative_eigenvalues(op);
  REQUIRE(dense.size() == 2);
  for (int j = 0; j < 2; ++j) CHECK(std::abs(b.e[j] - dense[j]) < 1e-9 * std::abs(dense[j]));
  // Resolution independence of the count.
  auto fine = eigenbasis(gaussian_op(25.0, 1200));
  CHECK(fine.count() == 2);
  Vec rich = richardson4(b.e, fine.e);
  CHECK(rich[0] == doctest::Approx(-11.96518827).epsilon(1e-6));
}

TEST_CASE("two-well eigenbasis: values, orthonormality, sign") {
  auto op = fx::two_well_op(800);
  auto b = eigenbasis(op);
  REQUIRE(b.count() == 2);
  Vec dense = dense_negative_eigenvalues(op);
  for (int j = 0; j < 2; ++j) CHECK(std::abs(b.e[j] - dense[j]) < 1e-6 * std::abs(dense[j]));
  CHECK(b.e[0] < b.e[1]);
  CHECK(b.e[1] < 0.0);
  for (int j = 0; j < 2; ++j)
    for (int k = 0; k < 2; ++k)
      CHECK(std::abs(op.dot(b.phi[j], b.phi[k]) - (j == k ? 1.0 : 0.0)) < 1e-10);
  for (int j = 0; j < 2; ++j) CHECK(b.phi[j][0] > 0.0);
  // Eigen-residual.
  for (int j = 0; j < 2; ++j)
    CHECK((op.apply(b.phi[j]) - b.e[j] * b.phi[j]).norm() < 1e-9 * std::abs(b.e[j]) *
                                                                  b.phi[j].norm());
  // The deep well puts the resonant frequency well inside the continuum.
  CHECK(2.0 * b.e[1] - b.e[0] > 10.0);
}

TEST_CASE("deepening a well lowers e_1") {
  auto a = eigenbasis(gaussian_op(10.0, 400));
  auto b = eigenbasis(gaussian_op(12.0, 400));
  Vec da = dense_negative_eigenvalues(gaussian_op(10.0, 400));
  Vec db = dense_negative_eigenvalues(gaussian_op(12.0, 400));
  CHECK(b.e[0] < a.e[0]);
  CHECK(db[0] < da[0]);
}

TEST_CASE("Richardson extrapolation reduces the resolution gap") {
  auto e1 = eigenbasis(fx::two_well_op(300)).e;
  auto e2 = eigenbasis(fx::two_well_op(601)).e;
  auto e4 = eigenbasis(fx::two_well_op(1203)).e;
  Vec r12 = richardson4(e1, e2), r24 = richardson4(e2, e4);
  for (int j = 0; j < 2; ++j) {
    const double raw = std::abs(e2[j] - e4[j]);
    const double rich = std::abs(r12[j] - r24[j]);
    CHECK(rich * 8.0 <= raw);
  }
}

TEST_CASE("degenerate spectrum is reported") {
  auto op = fx::two_well_op(400);
  EigenOptions opt;
  opt.gap_rel_tol = 2.0;  // larger than any gap
  CHECK_THROWS_AS(eigenbasis(op, opt), Error);
}

TEST_CASE("continuous projector") {
  auto op = fx::two_well_op(500);
  auto b = eigenbasis(op);
  std::mt19937_64 rng(3);
  CVec f = fx::random_localized(rng, op.grid);
  CVec g = fx::random_localized(rng, op.grid);
  CVec pf = project_continuous(b, f);
  for (const Vec& p : b.phi) CHECK(std::abs(op.dot(p.cast<cplx>(), pf)) < 1e-12 * f.norm());
  CHECK((project_continuous(b, pf) - pf).norm() < 1e-12 * f.norm());
  CHECK(std::abs(op.dot(pf, g) - op.dot(f, project_continuous(b, g))) <
        1e-12 * f.norm() * g.norm());
  CHECK(project_continuous(b, CVec(b.phi[0].cast<cplx>())).norm() < 1e-12);
  CVec gc = project_continuous(b, g);
  CHECK((project_continuous(b, CVec(b.phi[0].cast<cplx>() + gc)) - gc).norm() < 1e-11 * gc.norm());
}

TEST_CASE("resolvent solves") {
  auto op = fx::two_well_op(500);
  auto b = eigenbasis(op);
  // Eigenvector case.
  const double lam = b.e[0] + 1.0;
  CVec x = resolvent_solve(op, b, lam, b.phi[0].cast<cplx>());
  CHECK((x + b.phi[0].cast<cplx>()).norm() < 1e-9 * b.phi[0].norm());
  // Free operator against a dense solve.
  auto fop = fx::free_op(300);
  auto fb = eigenbasis(fop);
  std::mt19937_64 rng(11);
  CVec f = fx::random_vec(rng, fop.size()).cast<cplx>();
  CVec y = resolvent_solve(fop, fb, -1.0, f);
  Mat A = fop.H.dense() + Mat::Identity(fop.size(), fop.size());
  Vec yd = A.partialPivLu().solve(f.real());
  CHECK((y.real() - yd).norm() < 1e-10 * yd.norm());
  CHECK((fop.apply(y) + y - f).norm() < 1e-10 * f.norm());
  // Collisions.
  CHECK_THROWS_AS(resolvent_solve(op, b, b.e[1], f.head(op.size()).eval()), Error);
  CHECK_THROWS_AS(resolvent_solve(op, b, 0.5, CVec::Ones(op.size()).eval()), Error);
}

TEST_CASE("zero-energy heuristic") {
  auto rep = zero_energy_check(fx::two_well_op(600));
  CHECK_FALSE(rep.flagged);
  CHECK(rep.slope_ratio > 0.05);
}

TEST_CASE("continuous-subspace resolvent, including at an eigenvalue") {
  auto op = fx::two_well_op(500);
  auto b = eigenbasis(op);
  std::mt19937_64 rng(13);
  CVec f = fx::random_localized(rng, op.grid);
  // Dense oracle: spectral sum over the non-bound eigenvectors.
  Eigen::SelfAdjointEigenSolver<Mat> es(op.H.dense());
  for (double lam : {b.e[1], b.e[0], 0.5 * (b.e[0] + b.e[1]), -80.0}) {
    CVec x = continuous_resolvent(op, b, lam, f);
    CVec pf = project_continuous(b, f);
    CVec oracle = CVec::Zero(op.size());
    for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
      if (es.eigenvalues()[k] < 0) continue;
      const Vec v = es.eigenvectors().col(k);
      oracle += (v.cast<cplx>().dot(pf) / (es.eigenvalues()[k] - lam)) * v.cast<cplx>();
    }
    CHECK((x - oracle).norm() < 1e-9 * oracle.norm());
  }
  CHECK_THROWS_AS(continuous_resolvent(op, b, 0.3, f), Error);
}
