#include <omp.h>

#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "nls/banded.hpp"
#include "nls/kernels.hpp"

using namespace nls;

namespace {

// Large enough to take the parallel branch.
constexpr Eigen::Index kN = 20000;

CVec rand_c(std::mt19937_64& rng) {
  return CVec(fx::random_vec(rng, kN).cast<cplx>() + I * fx::random_vec(rng, kN).cast<cplx>());
}

struct Threads {
  int saved = omp_get_max_threads();
  explicit Threads(int n) { omp_set_num_threads(n); }
  ~Threads() { omp_set_num_threads(saved); }
};

}  // namespace

TEST_CASE("parallel kernels match the serial references") {
  Threads guard(4);
  std::mt19937_64 rng(11);
  const Vec diag = fx::random_vec(rng, kN), kappa = fx::random_vec(rng, kN).cwiseAbs();
  const Vec x = fx::random_vec(rng, kN), g = fx::random_vec(rng, kN);
  const CVec u = rand_c(rng), w = rand_c(rng);
  const double o1 = -1.3, o2 = 0.08, h = 0.01;

  Vec y1, y2;
  kern::penta_apply(diag, o1, o2, x, y1);
  kern::serial::penta_apply(diag, o1, o2, x, y2);
  CHECK(y1 == y2);

  CVec c1, c2;
  kern::penta_apply(diag, o1, o2, u, c1);
  kern::serial::penta_apply(diag, o1, o2, u, c2);
  CHECK(c1 == c2);

  const CVec cd = diag.cast<cplx>() - I * kappa.cast<cplx>();
  kern::penta_affine(cd, cplx(0, -0.3), o1, o2, u, c1);
  kern::serial::penta_affine(cd, cplx(0, -0.3), o1, o2, u, c2);
  CHECK(c1 == c2);

  CVec p1 = u, p2 = u;
  kern::nonlinear_phase(p1, kappa, 0.7);
  kern::serial::nonlinear_phase(p2, kappa, 0.7);
  CHECK(p1 == p2);

  // Reductions agree up to summation order.
  const double tol = 1e-12;
  CHECK(kern::dot(x, g, h) == doctest::Approx(kern::serial::dot(x, g, h)).epsilon(tol));
  CHECK(std::abs(kern::dot(u, w, h) - kern::serial::dot(u, w, h)) <= tol * std::abs(kern::serial::dot(u, w, h)));
  CHECK(kern::norm2(u, h) == doctest::Approx(kern::serial::norm2(u, h)).epsilon(tol));
  CHECK(kern::quartic(u, kappa, h) == doctest::Approx(kern::serial::quartic(u, kappa, h)).epsilon(tol));
}

TEST_CASE("pentadiagonal action matches the dense matrix") {
  std::mt19937_64 rng(12);
  Penta a{fx::random_vec(rng, 9), 0.7, -0.2};
  const Vec x = fx::random_vec(rng, 9);
  CHECK((a.apply(x) - a.dense() * x).norm() < 1e-13);
  // Small sizes stay serial.
  Vec y;
  kern::penta_apply(a.diag, a.o1, a.o2, x, y);
  CHECK(y == a.apply(x));
}

TEST_CASE("nonlinear phase keeps moduli") {
  std::mt19937_64 rng(13);
  const Vec kappa = fx::random_vec(rng, kN).cwiseAbs();
  CVec u = rand_c(rng);
  const Vec m0 = u.cwiseAbs();
  kern::nonlinear_phase(u, kappa, 2.5);
  CHECK((u.cwiseAbs() - m0).cwiseAbs().maxCoeff() < 1e-14);
}
