#pragma once

// Pentadiagonal matrices with a variable diagonal and constant off-diagonals,
// which is the only shape the radial operator produces.

#include <vector>

#include "nls/types.hpp"

namespace nls {

struct Penta {
  Vec diag;
  double o1 = 0.0;
  double o2 = 0.0;
  Eigen::Index size() const { return diag.size(); }
  Vec apply(const Vec& x) const;
  CVec apply(const CVec& x) const;
  Mat dense() const;
};

// LU with partial pivoting (LAPACK gbtrf) of (A + shift I).
class BandLU {
 public:
  BandLU() = default;
  BandLU(const Penta& a, double shift);
  Vec solve(const Vec& b) const;
  CVec solve(const CVec& b) const;
  Eigen::Index size() const { return n_; }

 private:
  Eigen::Index n_ = 0;
  std::vector<double> ab_;
  std::vector<int> ipiv_;
};

// LU of (A + diag_shift) with a complex diagonal shift per row.
class CBandLU {
 public:
  CBandLU() = default;
  CBandLU(const Penta& a, const CVec& diag_shift, cplx scale = 1.0);
  // Factors c0 I + c1 (A + diag_shift).
  static CBandLU affine(const Penta& a, const CVec& diag_shift, cplx c0, cplx c1);
  CVec solve(const CVec& b) const;
  Eigen::Index size() const { return n_; }

 private:
  void factor(const CVec& d, const CVec& off1, const CVec& off2);
  Eigen::Index n_ = 0;
  std::vector<cplx> ab_;
  std::vector<int> ipiv_;
};

// Eigenvalues in (vl, vu], ascending.
Vec band_eigenvalues(const Penta& a, double vl, double vu);
// Eigenvalues with indices il..iu (1-based, inclusive), ascending.
Vec band_eigenvalues_index(const Penta& a, int il, int iu);
// Eigenvector for an isolated eigenvalue lambda, unit Euclidean norm.
Vec inverse_iteration(const Penta& a, double lambda, int iters = 4);

}  // namespace nls
