#include "nls/banded.hpp"

#include <lapacke.h>

#include <cmath>
#include <string>

#include "nls/error.hpp"
#include "nls/kernels.hpp"

namespace nls {

namespace {
constexpr int kl = 2, ku = 2, ldab = 2 * kl + ku + 1;
}

Vec Penta::apply(const Vec& x) const {
  Vec y;
  kern::penta_apply(diag, o1, o2, x, y);
  return y;
}

CVec Penta::apply(const CVec& x) const {
  CVec y;
  kern::penta_apply(diag, o1, o2, x, y);
  return y;
}

Mat Penta::dense() const {
  const Eigen::Index n = size();
  Mat m = Mat::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    m(k, k) = diag[k];
    if (k + 1 < n) m(k, k + 1) = m(k + 1, k) = o1;
    if (k + 2 < n) m(k, k + 2) = m(k + 2, k) = o2;
  }
  return m;
}

BandLU::BandLU(const Penta& a, double shift) : n_(a.size()) {
  ab_.assign(static_cast<size_t>(ldab * n_), 0.0);
  auto at = [&](Eigen::Index i, Eigen::Index j) -> double& {
    return ab_[static_cast<size_t>(j * ldab + kl + ku + i - j)];
  };
  for (Eigen::Index k = 0; k < n_; ++k) {
    at(k, k) = a.diag[k] + shift;
    if (k + 1 < n_) at(k, k + 1) = at(k + 1, k) = a.o1;
    if (k + 2 < n_) at(k, k + 2) = at(k + 2, k) = a.o2;
  }
  ipiv_.resize(static_cast<size_t>(n_));
  const int info = LAPACKE_dgbtrf(LAPACK_COL_MAJOR, static_cast<int>(n_), static_cast<int>(n_),
                                  kl, ku, ab_.data(), ldab, ipiv_.data());
  if (info != 0)
    fail(ErrorKind::spectrum_collision, "singular banded factorization (dgbtrf info " +
                                            std::to_string(info) + ")");
}

Vec BandLU::solve(const Vec& b) const {
  Vec x = b;
  LAPACKE_dgbtrs(LAPACK_COL_MAJOR, 'N', static_cast<int>(n_), kl, ku, 1, ab_.data(), ldab,
                 ipiv_.data(), x.data(), static_cast<int>(n_));
  return x;
}

CVec BandLU::solve(const CVec& b) const {
  Eigen::Matrix<double, Eigen::Dynamic, 2> rhs(n_, 2);
  rhs.col(0) = b.real();
  rhs.col(1) = b.imag();
  LAPACKE_dgbtrs(LAPACK_COL_MAJOR, 'N', static_cast<int>(n_), kl, ku, 2, ab_.data(), ldab,
                 ipiv_.data(), rhs.data(), static_cast<int>(n_));
  CVec x(n_);
  x.real() = rhs.col(0);
  x.imag() = rhs.col(1);
  return x;
}

CBandLU::CBandLU(const Penta& a, const CVec& diag_shift, cplx scale) : n_(a.size()) {
  CVec d = scale * (a.diag.cast<cplx>() + diag_shift);
  CVec off1 = CVec::Constant(n_, scale * a.o1);
  CVec off2 = CVec::Constant(n_, scale * a.o2);
  factor(d, off1, off2);
}

CBandLU CBandLU::affine(const Penta& a, const CVec& diag_shift, cplx c0, cplx c1) {
  CBandLU lu;
  lu.n_ = a.size();
  CVec d = CVec::Constant(lu.n_, c0) + c1 * (a.diag.cast<cplx>() + diag_shift);
  lu.factor(d, CVec::Constant(lu.n_, c1 * a.o1), CVec::Constant(lu.n_, c1 * a.o2));
  return lu;
}

void CBandLU::factor(const CVec& d, const CVec& off1, const CVec& off2) {
  ab_.assign(static_cast<size_t>(ldab * n_), cplx(0.0));
  auto at = [&](Eigen::Index i, Eigen::Index j) -> cplx& {
    return ab_[static_cast<size_t>(j * ldab + kl + ku + i - j)];
  };
  for (Eigen::Index k = 0; k < n_; ++k) {
    at(k, k) = d[k];
    if (k + 1 < n_) at(k, k + 1) = at(k + 1, k) = off1[k];
    if (k + 2 < n_) at(k, k + 2) = at(k + 2, k) = off2[k];
  }
  ipiv_.resize(static_cast<size_t>(n_));
  const int info = LAPACKE_zgbtrf(LAPACK_COL_MAJOR, static_cast<int>(n_), static_cast<int>(n_),
                                  kl, ku, reinterpret_cast<lapack_complex_double*>(ab_.data()),
                                  ldab, ipiv_.data());
  if (info != 0)
    fail(ErrorKind::spectrum_collision, "singular complex banded factorization (zgbtrf info " +
                                            std::to_string(info) + ")");
}

CVec CBandLU::solve(const CVec& b) const {
  CVec x = b;
  LAPACKE_zgbtrs(LAPACK_COL_MAJOR, 'N', static_cast<int>(n_), kl, ku, 1,
                 reinterpret_cast<const lapack_complex_double*>(ab_.data()), ldab, ipiv_.data(),
                 reinterpret_cast<lapack_complex_double*>(x.data()), static_cast<int>(n_));
  return x;
}

namespace {

std::vector<double> sym_band(const Penta& a) {
  const int kd = 2, ld = kd + 1;
  const Eigen::Index n = a.size();
  std::vector<double> ab(static_cast<size_t>(ld * n), 0.0);
  for (Eigen::Index j = 0; j < n; ++j) {
    ab[static_cast<size_t>(j * ld + kd)] = a.diag[j];
    if (j >= 1) ab[static_cast<size_t>(j * ld + kd - 1)] = a.o1;
    if (j >= 2) ab[static_cast<size_t>(j * ld + kd - 2)] = a.o2;
  }
  return ab;
}

Vec run_sbevx(const Penta& a, char range, double vl, double vu, int il, int iu) {
  const int n = static_cast<int>(a.size());
  auto ab = sym_band(a);
  double qdummy = 0.0, zdummy = 0.0;
  std::vector<double> w(static_cast<size_t>(n));
  std::vector<int> ifail(static_cast<size_t>(n));
  int m = 0;
  const double abstol = 2.0 * LAPACKE_dlamch('S');
  const int info = LAPACKE_dsbevx(LAPACK_COL_MAJOR, 'N', range, 'U', n, 2, ab.data(), 3,
                                  &qdummy, 1, vl, vu, il, iu, abstol, &m, w.data(), &zdummy, 1,
                                  ifail.data());
  if (info != 0)
    fail(ErrorKind::convergence, "dsbevx failed (info " + std::to_string(info) + ")");
  Vec out(m);
  for (int i = 0; i < m; ++i) out[i] = w[static_cast<size_t>(i)];
  return out;
}

}  // namespace

Vec band_eigenvalues(const Penta& a, double vl, double vu) {
  return run_sbevx(a, 'V', vl, vu, 0, 0);
}

Vec band_eigenvalues_index(const Penta& a, int il, int iu) {
  return run_sbevx(a, 'I', 0.0, 0.0, il, iu);
}

Vec inverse_iteration(const Penta& a, double lambda, int iters) {
  const Eigen::Index n = a.size();
  // Offset keeps the shifted matrix numerically nonsingular; the iteration
  // still converges at rate |offset / gap|.
  const double offset = 1e-10 * std::max(1.0, std::abs(lambda));
  BandLU lu(a, -(lambda + offset));
  Vec x = Vec::Ones(n);
  for (Eigen::Index k = 0; k < n; ++k) x[k] += 0.1 * std::sin(0.7 * static_cast<double>(k));
  x.normalize();
  for (int it = 0; it < iters; ++it) {
    x = lu.solve(x);
    x.normalize();
  }
  return x;
}

}  // namespace nls
