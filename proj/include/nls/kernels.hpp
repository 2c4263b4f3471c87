#pragma once

// Grid kernels used in the hot loops. Each has an OpenMP version and a serial
// reference with identical arithmetic per element; the reductions differ only
// in summation order.

#include "nls/types.hpp"

namespace nls::kern {

// y = A x for the symmetric pentadiagonal A with constant off-diagonals o1, o2.
void penta_apply(const Vec& diag, double o1, double o2, const Vec& x, Vec& y);
void penta_apply(const Vec& diag, double o1, double o2, const CVec& x, CVec& y);
// y = (c0 + c1 A) x, the Crank-Nicolson right-hand side with a complex diagonal.
void penta_affine(const CVec& diag, cplx c1, double o1, double o2, const CVec& x, CVec& y);

// u_k <- u_k exp(-i kappa_k |u_k|^2 tau)
void nonlinear_phase(CVec& u, const Vec& kappa, double tau);

// h sum f_k g_k (no conjugation)
double dot(const Vec& f, const Vec& g, double h);
cplx dot(const CVec& f, const CVec& g, double h);
// h sum |f_k|^2
double norm2(const CVec& f, double h);
// h sum kappa_k |u_k|^4
double quartic(const CVec& u, const Vec& kappa, double h);

int max_threads();

namespace serial {
void penta_apply(const Vec& diag, double o1, double o2, const Vec& x, Vec& y);
void penta_apply(const Vec& diag, double o1, double o2, const CVec& x, CVec& y);
void penta_affine(const CVec& diag, cplx c1, double o1, double o2, const CVec& x, CVec& y);
void nonlinear_phase(CVec& u, const Vec& kappa, double tau);
double dot(const Vec& f, const Vec& g, double h);
cplx dot(const CVec& f, const CVec& g, double h);
double norm2(const CVec& f, double h);
double quartic(const CVec& u, const Vec& kappa, double h);
}  // namespace serial

}  // namespace nls::kern
