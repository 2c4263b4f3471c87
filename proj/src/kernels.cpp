#include "nls/kernels.hpp"

#include <omp.h>

namespace nls::kern {

namespace {

// Below this size thread start-up costs more than the loop.
constexpr Eigen::Index kParallelMin = 2048;

template <class V>
inline auto stencil(const Vec& diag, double o1, double o2, const V& x, Eigen::Index k,
                    Eigen::Index n) {
  auto s = diag[k] * x[k];
  if (k >= 1) s += o1 * x[k - 1];
  if (k + 1 < n) s += o1 * x[k + 1];
  if (k >= 2) s += o2 * x[k - 2];
  if (k + 2 < n) s += o2 * x[k + 2];
  return s;
}

inline cplx affine_at(const CVec& diag, cplx c1, double o1, double o2, const CVec& x,
                      Eigen::Index k, Eigen::Index n) {
  cplx off = 0.0;
  if (k >= 1) off += o1 * x[k - 1];
  if (k + 1 < n) off += o1 * x[k + 1];
  if (k >= 2) off += o2 * x[k - 2];
  if (k + 2 < n) off += o2 * x[k + 2];
  return x[k] + c1 * (diag[k] * x[k] + off);
}

}  // namespace

int max_threads() { return omp_get_max_threads(); }

void penta_apply(const Vec& diag, double o1, double o2, const Vec& x, Vec& y) {
  const Eigen::Index n = x.size();
  y.resize(n);
#pragma omp parallel for schedule(static) if (n >= kParallelMin)
  for (Eigen::Index k = 0; k < n; ++k) y[k] = stencil(diag, o1, o2, x, k, n);
}

void penta_apply(const Vec& diag, double o1, double o2, const CVec& x, CVec& y) {
  const Eigen::Index n = x.size();
  y.resize(n);
#pragma omp parallel for schedule(static) if (n >= kParallelMin)
  for (Eigen::Index k = 0; k < n; ++k) y[k] = stencil(diag, o1, o2, x, k, n);
}

void penta_affine(const CVec& diag, cplx c1, double o1, double o2, const CVec& x, CVec& y) {
  const Eigen::Index n = x.size();
  y.resize(n);
#pragma omp parallel for schedule(static) if (n >= kParallelMin)
  for (Eigen::Index k = 0; k < n; ++k) y[k] = affine_at(diag, c1, o1, o2, x, k, n);
}

void nonlinear_phase(CVec& u, const Vec& kappa, double tau) {
  const Eigen::Index n = u.size();
#pragma omp parallel for schedule(static) if (n >= kParallelMin)
  for (Eigen::Index k = 0; k < n; ++k) {
    const double th = -kappa[k] * std::norm(u[k]) * tau;
    u[k] *= cplx(std::cos(th), std::sin(th));
  }
}

double dot(const Vec& f, const Vec& g, double h) {
  const Eigen::Index n = f.size();
  double s = 0.0;
#pragma omp parallel for schedule(static) reduction(+ : s) if (n >= kParallelMin)
  for (Eigen::Index k = 0; k < n; ++k) s += f[k] * g[k];
  return h * s;
}

cplx dot(const CVec& f, const CVec& g, double h) {
  const Eigen::Index n = f.size();
  double re = 0.0, im = 0.0;
#pragma omp parallel for schedule(static) reduction(+ : re, im) if (n >= kParallelMin)
  for (Eigen::Index k = 0; k < n; ++k) {
    const cplx p = f[k] * g[k];
    re += p.real();
    im += p.imag();
  }
  return h * cplx(re, im);
}

double norm2(const CVec& f, double h) {
  const Eigen::Index n = f.size();
  double s = 0.0;
#pragma omp parallel for schedule(static) reduction(+ : s) if (n >= kParallelMin)
  for (Eigen::Index k = 0; k < n; ++k) s += std::norm(f[k]);
  return h * s;
}

double quartic(const CVec& u, const Vec& kappa, double h) {
  const Eigen::Index n = u.size();
  double s = 0.0;
#pragma omp parallel for schedule(static) reduction(+ : s) if (n >= kParallelMin)
  for (Eigen::Index k = 0; k < n; ++k) {
    const double a = std::norm(u[k]);
    s += kappa[k] * a * a;
  }
  return h * s;
}

namespace serial {

void penta_apply(const Vec& diag, double o1, double o2, const Vec& x, Vec& y) {
  const Eigen::Index n = x.size();
  y.resize(n);
  for (Eigen::Index k = 0; k < n; ++k) y[k] = stencil(diag, o1, o2, x, k, n);
}

void penta_apply(const Vec& diag, double o1, double o2, const CVec& x, CVec& y) {
  const Eigen::Index n = x.size();
  y.resize(n);
  for (Eigen::Index k = 0; k < n; ++k) y[k] = stencil(diag, o1, o2, x, k, n);
}

void penta_affine(const CVec& diag, cplx c1, double o1, double o2, const CVec& x, CVec& y) {
  const Eigen::Index n = x.size();
  y.resize(n);
  for (Eigen::Index k = 0; k < n; ++k) y[k] = affine_at(diag, c1, o1, o2, x, k, n);
}

void nonlinear_phase(CVec& u, const Vec& kappa, double tau) {
  for (Eigen::Index k = 0; k < u.size(); ++k) {
    const double th = -kappa[k] * std::norm(u[k]) * tau;
    u[k] *= cplx(std::cos(th), std::sin(th));
  }
}

double dot(const Vec& f, const Vec& g, double h) {
  double s = 0.0;
  for (Eigen::Index k = 0; k < f.size(); ++k) s += f[k] * g[k];
  return h * s;
}

cplx dot(const CVec& f, const CVec& g, double h) {
  double re = 0.0, im = 0.0;
  for (Eigen::Index k = 0; k < f.size(); ++k) {
    const cplx p = f[k] * g[k];
    re += p.real();
    im += p.imag();
  }
  return h * cplx(re, im);
}

double norm2(const CVec& f, double h) {
  double s = 0.0;
  for (Eigen::Index k = 0; k < f.size(); ++k) s += std::norm(f[k]);
  return h * s;
}

double quartic(const CVec& u, const Vec& kappa, double h) {
  double s = 0.0;
  for (Eigen::Index k = 0; k < u.size(); ++k) {
    const double a = std::norm(u[k]);
    s += kappa[k] * a * a;
  }
  return h * s;
}

}  // namespace serial

}  // namespace nls::kern
