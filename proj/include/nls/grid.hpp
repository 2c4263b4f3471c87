#pragma once

#include <functional>
#include <map>
#include <string>

#include "nls/banded.hpp"
#include "nls/types.hpp"

namespace nls {

// Uniform radial grid r_k = k h, k = 1..n, h = r_max / (n + 1). The nodes
// r = 0 and r = r_max carry the Dirichlet condition w = 0.
struct RadialGrid {
  double r_max = 0.0;
  int n_points = 0;
  double spacing = 0.0;

  static RadialGrid make(double r_max, int n_points);
  double r(Eigen::Index k) const { return static_cast<double>(k + 1) * spacing; }
  Vec nodes() const;
};

struct Potential {
  std::string name;
  std::map<std::string, double> params;
  std::function<double(double)> eval;
  double operator()(double r) const { return eval(r); }
};

// Known names: zero, gaussian {depth, width}, two_gaussian {depth1, width1,
// depth2, width2}. Wells are negative: V = -depth exp(-(r/width)^2).
Potential make_potential(const std::string& name, const std::map<std::string, double>& params);

// The radial operator -d^2/dr^2 + V on w = sqrt(4 pi) r psi. With this
// scaling h sum |w|^2 is the 3D L^2 mass and the cubic term becomes
// kappa |w|^2 w with kappa = 1 / (4 pi r^2).
class DiscreteOperator {
 public:
  RadialGrid grid;
  Potential potential;
  Vec V;
  Vec kappa;
  Penta H;

  double h() const { return grid.spacing; }
  Eigen::Index size() const { return V.size(); }
  Vec apply(const Vec& x) const { return H.apply(x); }
  CVec apply(const CVec& x) const { return H.apply(x); }

  // Bilinear grid pairing <f, g> = h sum f g; complex conjugation is explicit
  // at call sites.
  double dot(const Vec& f, const Vec& g) const;
  cplx dot(const CVec& f, const CVec& g) const;
  double mass(const CVec& u) const;
  // <Hu, conj u> + (1/2) int kappa |u|^4
  double energy(const CVec& u) const;
  // || <r>^s f ||
  double weighted_norm(const CVec& f, double s) const;
};

DiscreteOperator build_operator(const RadialGrid& grid, const Potential& potential,
                                double potential_floor = 1e-10);

// 4th-order coefficients of -d^2/dr^2 on spacing h.
struct Stencil {
  double d0, d1, d2, edge;
  explicit Stencil(double h);
};

}  // namespace nls
