#include "nls/grid.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "nls/error.hpp"
#include "nls/kernels.hpp"

namespace nls {

RadialGrid RadialGrid::make(double r_max, int n_points) {
  if (n_points < 64) fail(ErrorKind::config, "radial grid needs at least 64 points");
  if (!(r_max > 0.0)) fail(ErrorKind::config, "radial grid needs r_max > 0");
  RadialGrid g;
  g.r_max = r_max;
  g.n_points = n_points;
  g.spacing = r_max / (n_points + 1);
  return g;
}

Vec RadialGrid::nodes() const {
  Vec r(n_points);
  for (int k = 0; k < n_points; ++k) r[k] = this->r(k);
  return r;
}

namespace {

double param(const std::map<std::string, double>& p, const std::string& key) {
  auto it = p.find(key);
  if (it == p.end()) fail(ErrorKind::config, "potential parameter '" + key + "' missing");
  return it->second;
}

}  // namespace

Potential make_potential(const std::string& name, const std::map<std::string, double>& params) {
  Potential v{name, params, {}};
  if (name == "zero") {
    v.eval = [](double) { return 0.0; };
  } else if (name == "gaussian") {
    const double d = param(params, "depth"), w = param(params, "width");
    if (!(w > 0.0)) fail(ErrorKind::config, "gaussian width must be positive");
    v.eval = [d, w](double r) { return -d * std::exp(-(r / w) * (r / w)); };
  } else if (name == "two_gaussian") {
    const double d1 = param(params, "depth1"), w1 = param(params, "width1");
    const double d2 = param(params, "depth2"), w2 = param(params, "width2");
    if (!(w1 > 0.0 && w2 > 0.0)) fail(ErrorKind::config, "gaussian widths must be positive");
    v.eval = [=](double r) {
      return -d1 * std::exp(-(r / w1) * (r / w1)) - d2 * std::exp(-(r / w2) * (r / w2));
    };
  } else {
    fail(ErrorKind::config, "unknown potential '" + name + "'");
  }
  return v;
}

Stencil::Stencil(double h) {
  const double c = 1.0 / (12.0 * h * h);
  d0 = 30.0 * c;
  d1 = -16.0 * c;
  d2 = 1.0 * c;
  // Odd reflection w(-h) = -w(h) folds the ghost node into the first row.
  edge = 29.0 * c;
}

DiscreteOperator build_operator(const RadialGrid& grid, const Potential& potential,
                                double potential_floor) {
  const double vmax = std::abs(potential(grid.r_max));
  if (vmax > potential_floor) {
    std::ostringstream os;
    os << "potential '" << potential.name << "' has |V(r_max)| = " << vmax
       << " above floor " << potential_floor;
    fail(ErrorKind::config, os.str());
  }
  DiscreteOperator op;
  op.grid = grid;
  op.potential = potential;
  const Eigen::Index n = grid.n_points;
  op.V.resize(n);
  op.kappa.resize(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const double r = grid.r(k);
    op.V[k] = potential(r);
    op.kappa[k] = 1.0 / (4.0 * std::numbers::pi * r * r);
  }
  Stencil s(grid.spacing);
  op.H.diag = op.V.array() + s.d0;
  op.H.diag[0] = op.V[0] + s.edge;
  op.H.diag[n - 1] = op.V[n - 1] + s.edge;
  op.H.o1 = s.d1;
  op.H.o2 = s.d2;
  return op;
}

double DiscreteOperator::dot(const Vec& f, const Vec& g) const { return kern::dot(f, g, h()); }
cplx DiscreteOperator::dot(const CVec& f, const CVec& g) const { return kern::dot(f, g, h()); }
double DiscreteOperator::mass(const CVec& u) const { return kern::norm2(u, h()); }

double DiscreteOperator::energy(const CVec& u) const {
  const CVec hu = apply(u);
  return dot(hu, u.conjugate()).real() + 0.5 * kern::quartic(u, kappa, h());
}

double DiscreteOperator::weighted_norm(const CVec& f, double s) const {
  double acc = 0.0;
  for (Eigen::Index k = 0; k < f.size(); ++k) {
    const double r = grid.r(k);
    acc += std::pow(1.0 + r * r, s) * std::norm(f[k]);
  }
  return std::sqrt(h() * acc);
}

}  // namespace nls
