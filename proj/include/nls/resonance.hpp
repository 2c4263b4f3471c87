#pragma once

// Multi-indices over Z = (z_i zbar_j)_{i != j}, the resonant sets built from
// them and the nonresonance scan. Modes are 0-based; e must be increasing.

#include <string>
#include <vector>

#include "nls/types.hpp"

namespace nls {

class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(int n) : n_(n), m_(static_cast<size_t>(n * n), 0) {}

  int n() const { return n_; }
  int operator()(int i, int j) const { return m_[static_cast<size_t>(i * n_ + j)]; }
  int& operator()(int i, int j) { return m_[static_cast<size_t>(i * n_ + j)]; }
  int degree() const;
  // sum_{i<j} m_ij
  int upper_degree() const;
  // sum m_ij (e_i - e_j)
  double beat(const Vec& e) const;
  std::string str() const;

  bool operator==(const MultiIndex& o) const { return n_ == o.n_ && m_ == o.m_; }
  // Degree first, then lexicographic over the ordered pairs (i, j), i != j.
  bool operator<(const MultiIndex& o) const;

 private:
  int n_ = 0;
  std::vector<int> m_;  // row-major, diagonal unused
};

// z^mu zbar^nu
struct Monomial {
  std::vector<int> mu, nu;

  int degree() const;
  // (nu - mu) . e
  double frequency(const Vec& e) const;
  std::string str() const;
  bool operator==(const Monomial& o) const { return mu == o.mu && nu == o.nu; }
  bool operator<(const Monomial& o) const;
};

// z^mu zbar^nu = zbar_k Z^m; k < 0 gives Z^m alone.
Monomial monomial_of(const MultiIndex& m, int k);

struct Classification {
  bool in_M0 = false;
  std::vector<int> ks;       // m in M_k
  std::vector<int> near_ks;  // |beat - e_k| <= tau but nonzero
  bool near_M0 = false;      // mu != nu yet |beat| <= tau
};
Classification classify(const MultiIndex& m, const Vec& e, double tau);

double default_tau(const Vec& e);
// Smallest N with N > |e_1| / min gap.
int default_N(const Vec& e);

struct H3Report {
  double min_value = 0;
  std::vector<int> argmin;
  int bound = 0;  // 4N + 8
};
H3Report h3_scan(const Vec& e, int N);
// Throws a nonresonance error when the scan minimum falls below tau.
H3Report check_h3(const Vec& e, int N, double tau = -1);

// All multi-indices with degree <= r in table order.
std::vector<MultiIndex> enumerate_multi_indices(int n, int r);

struct ResonanceTable {
  Vec e;
  int N = 0;
  int cutoff = 0;  // 2N + 4
  double tau = 0;
  std::vector<std::vector<MultiIndex>> Mk;  // per mode
  std::vector<MultiIndex> M0;
  std::vector<Monomial> M;  // sorted, unique
  std::vector<double> Lambda;
  std::vector<std::vector<Monomial>> ML;  // aligned with Lambda
  std::vector<std::string> warnings;

  // Index into Lambda within tau, or -1.
  int frequency_index(double L) const;
};

struct TableOptions {
  int N = -1;         // default_N when negative
  double tau = -1;    // default_tau when negative
  bool enforce_h3 = true;
};
ResonanceTable build_table(const Vec& e, const TableOptions& opt = {});

struct Factorization {
  int k = 0, l = 0;
  MultiIndex a, b;
};
// Splits z_j Z^m with |m| >= 2N+3 into z_j (z_k Z^a)(z_l Z^b) with a in M_k,
// b in M_l and a, b supported on i < j.
Factorization comb1_factorize(const MultiIndex& m, int j, const Vec& e, int N);
// Coordinatewise exponent domination |z_j Z^m| <= |z_j||z_k Z^a||z_l Z^b| on |z| <= 1.
bool dominates(const MultiIndex& m, int j, const Factorization& f);

}  // namespace nls
