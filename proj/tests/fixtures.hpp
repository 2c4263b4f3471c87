#pragma once

// Shared test fixtures. The two-well potential has two bound states with
// 2 e_2 > e_1, so the channel z_1 conj(z_2)^2 radiates at L = 2 e_2 - e_1.

#include <random>

#include "nls/continuum.hpp"
#include "nls/grid.hpp"
#include "nls/spectral.hpp"

namespace fx {

inline nls::Potential two_well() {
  return nls::make_potential("two_gaussian",
                             {{"depth1", 60.0}, {"width1", 0.8}, {"depth2", 6.0}, {"width2", 1.0}});
}

inline nls::DiscreteOperator two_well_op(int n = 1200, double r_max = 30.0) {
  return nls::build_operator(nls::RadialGrid::make(r_max, n), two_well());
}

inline nls::DiscreteOperator free_op(int n = 1200, double r_max = 30.0) {
  return nls::build_operator(nls::RadialGrid::make(r_max, n), nls::make_potential("zero", {}));
}

inline nls::Vec random_vec(std::mt19937_64& rng, Eigen::Index n) {
  std::normal_distribution<double> d;
  nls::Vec v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = d(rng);
  return v;
}

// Smooth random localized function: random combination of Gaussians times r.
inline nls::CVec random_localized(std::mt19937_64& rng, const nls::RadialGrid& g, int terms = 4,
                                  bool complex_valued = true) {
  std::uniform_real_distribution<double> u(-1.0, 1.0), w(0.6, 2.0);
  nls::CVec f = nls::CVec::Zero(g.n_points);
  for (int t = 0; t < terms; ++t) {
    const nls::cplx c(u(rng), complex_valued ? u(rng) : 0.0);
    const double a = w(rng);
    const double c0 = 2.0 * std::abs(u(rng));
    for (int k = 0; k < g.n_points; ++k) {
      const double r = g.r(k);
      f[k] += c * r * std::exp(-((r - c0) * (r - c0)) / (a * a));
    }
  }
  return f;
}

}  // namespace fx
