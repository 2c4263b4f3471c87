#include "nls/resonance.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "nls/error.hpp"

namespace nls {

namespace {

std::vector<int> pair_values(const MultiIndex& m) {
  std::vector<int> v;
  for (int i = 0; i < m.n(); ++i)
    for (int j = 0; j < m.n(); ++j)
      if (i != j) v.push_back(m(i, j));
  return v;
}

std::string vec_str(const std::vector<int>& v) {
  std::ostringstream os;
  os << "(";
  for (size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  os << ")";
  return os.str();
}

void check_sorted(const Vec& e) {
  for (Eigen::Index i = 1; i < e.size(); ++i)
    if (!(e[i] > e[i - 1])) fail(ErrorKind::config, "eigenvalues must be strictly increasing");
  if (e.size() > 0 && !(e[e.size() - 1] < 0.0))
    fail(ErrorKind::config, "eigenvalues must be negative");
}

}  // namespace

int MultiIndex::degree() const { return std::accumulate(m_.begin(), m_.end(), 0); }

int MultiIndex::upper_degree() const {
  int s = 0;
  for (int i = 0; i < n_; ++i)
    for (int j = i + 1; j < n_; ++j) s += (*this)(i, j);
  return s;
}

double MultiIndex::beat(const Vec& e) const {
  double s = 0;
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j)
      if (i != j && (*this)(i, j)) s += (*this)(i, j) * (e[i] - e[j]);
  return s;
}

std::string MultiIndex::str() const {
  std::ostringstream os;
  os << "{";
  bool first = true;
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j)
      if (i != j && (*this)(i, j)) {
        os << (first ? "" : ",") << "m" << i + 1 << j + 1 << "=" << (*this)(i, j);
        first = false;
      }
  os << "}";
  return os.str();
}

bool MultiIndex::operator<(const MultiIndex& o) const {
  const int a = degree(), b = o.degree();
  if (a != b) return a < b;
  return pair_values(*this) < pair_values(o);
}

int Monomial::degree() const {
  return std::accumulate(mu.begin(), mu.end(), 0) + std::accumulate(nu.begin(), nu.end(), 0);
}

double Monomial::frequency(const Vec& e) const {
  double s = 0;
  for (size_t i = 0; i < mu.size(); ++i) s += (nu[i] - mu[i]) * e[static_cast<Eigen::Index>(i)];
  return s;
}

std::string Monomial::str() const { return "mu=" + vec_str(mu) + " nu=" + vec_str(nu); }

bool Monomial::operator<(const Monomial& o) const {
  const int a = degree(), b = o.degree();
  if (a != b) return a < b;
  if (mu != o.mu) return mu < o.mu;
  return nu < o.nu;
}

Monomial monomial_of(const MultiIndex& m, int k) {
  const int n = m.n();
  Monomial p;
  p.mu.assign(static_cast<size_t>(n), 0);
  p.nu.assign(static_cast<size_t>(n), 0);
  for (int i = 0; i < n; ++i)
    for (int l = 0; l < n; ++l) {
      if (i == l) continue;
      p.mu[static_cast<size_t>(i)] += m(i, l);
      p.nu[static_cast<size_t>(i)] += m(l, i);
    }
  if (k >= 0) p.nu[static_cast<size_t>(k)] += 1;
  return p;
}

Classification classify(const MultiIndex& m, const Vec& e, double tau) {
  Classification c;
  const double b = m.beat(e);
  const Monomial z = monomial_of(m, -1);
  if (z.mu == z.nu) {
    c.in_M0 = true;  // the beat vanishes identically
  } else if (std::abs(b) <= tau) {
    c.in_M0 = true;
    c.near_M0 = true;
  }
  for (int k = 0; k < m.n(); ++k) {
    const double v = b - e[k];
    if (v < -tau)
      c.ks.push_back(k);
    else if (std::abs(v) <= tau)
      c.near_ks.push_back(k);
  }
  return c;
}

double default_tau(const Vec& e) { return e.size() ? 1e-9 * std::abs(e[0]) : 1e-9; }

int default_N(const Vec& e) {
  if (e.size() < 2) return 1;
  double gap = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 1; i < e.size(); ++i) gap = std::min(gap, e[i] - e[i - 1]);
  return static_cast<int>(std::floor(std::abs(e[0]) / gap)) + 1;
}

H3Report h3_scan(const Vec& e, int N) {
  const int n = static_cast<int>(e.size());
  H3Report rep;
  rep.bound = 4 * N + 8;
  rep.min_value = std::numeric_limits<double>::infinity();
  if (n == 0) return rep;
  std::vector<int> mu(static_cast<size_t>(n), 0);
  // Depth-first over signed vectors with |mu|_1 <= bound.
  auto rec = [&](auto&& self, int i, int left) -> void {
    if (i == n) {
      bool zero = std::all_of(mu.begin(), mu.end(), [](int x) { return x == 0; });
      if (zero) return;
      double s = 0;
      for (int q = 0; q < n; ++q) s += mu[static_cast<size_t>(q)] * e[q];
      if (std::abs(s) < rep.min_value) {
        rep.min_value = std::abs(s);
        rep.argmin = mu;
      }
      return;
    }
    for (int v = -left; v <= left; ++v) {
      mu[static_cast<size_t>(i)] = v;
      self(self, i + 1, left - std::abs(v));
    }
    mu[static_cast<size_t>(i)] = 0;
  };
  rec(rec, 0, rep.bound);
  return rep;
}

H3Report check_h3(const Vec& e, int N, double tau) {
  if (tau < 0) tau = default_tau(e);
  H3Report rep = h3_scan(e, N);
  if (rep.min_value < tau) {
    std::ostringstream os;
    os << "nonresonance violated: mu = " << vec_str(rep.argmin) << " gives |mu.e| = "
       << rep.min_value << " over |mu| <= " << rep.bound;
    fail(ErrorKind::nonresonance, os.str());
  }
  return rep;
}

std::vector<MultiIndex> enumerate_multi_indices(int n, int r) {
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) pairs.emplace_back(i, j);
  std::vector<MultiIndex> out;
  MultiIndex m(n);
  auto rec = [&](auto&& self, size_t p, int left) -> void {
    if (p == pairs.size()) {
      out.push_back(m);
      return;
    }
    for (int v = 0; v <= left; ++v) {
      m(pairs[p].first, pairs[p].second) = v;
      self(self, p + 1, left - v);
    }
    m(pairs[p].first, pairs[p].second) = 0;
  };
  rec(rec, 0, r);
  std::sort(out.begin(), out.end());
  return out;
}

int ResonanceTable::frequency_index(double L) const {
  for (size_t i = 0; i < Lambda.size(); ++i)
    if (std::abs(Lambda[i] - L) <= tau) return static_cast<int>(i);
  return -1;
}

ResonanceTable build_table(const Vec& e, const TableOptions& opt) {
  check_sorted(e);
  ResonanceTable t;
  t.e = e;
  t.N = opt.N > 0 ? opt.N : default_N(e);
  t.tau = opt.tau >= 0 ? opt.tau : default_tau(e);
  t.cutoff = 2 * t.N + 4;
  const int n = static_cast<int>(e.size());
  if (opt.enforce_h3) check_h3(e, t.N, t.tau);
  t.Mk.assign(static_cast<size_t>(n), {});
  for (const MultiIndex& m : enumerate_multi_indices(n, t.cutoff)) {
    const Classification c = classify(m, e, t.tau);
    if (c.in_M0) t.M0.push_back(m);
    if (c.near_M0) t.warnings.push_back("near-resonant beat for " + m.str());
    for (int k : c.near_ks)
      t.warnings.push_back("near-resonant frequency for " + m.str() + " with mode " +
                           std::to_string(k + 1));
    for (int k : c.ks) {
      t.Mk[static_cast<size_t>(k)].push_back(m);
      t.M.push_back(monomial_of(m, k));
    }
  }
  std::sort(t.M.begin(), t.M.end());
  t.M.erase(std::unique(t.M.begin(), t.M.end()), t.M.end());

  // Cluster frequencies within tau.
  std::vector<std::pair<double, size_t>> f;
  for (size_t i = 0; i < t.M.size(); ++i) f.emplace_back(t.M[i].frequency(e), i);
  std::sort(f.begin(), f.end());
  for (const auto& [L, i] : f) {
    if (!(L > 0)) fail(ErrorKind::domain, "non-positive frequency in the resonant set");
    if (t.Lambda.empty() || L - t.Lambda.back() > t.tau) {
      t.Lambda.push_back(L);
      t.ML.emplace_back();
    }
    t.ML.back().push_back(t.M[i]);
  }
  for (auto& g : t.ML) std::sort(g.begin(), g.end());
  size_t total = 0;
  for (const auto& g : t.ML) total += g.size();
  if (total != t.M.size()) fail(ErrorKind::domain, "frequency partition does not cover M");
  return t;
}

Factorization comb1_factorize(const MultiIndex& m, int j, const Vec& e, int N) {
  const int n = m.n();
  if (m.degree() < 2 * N + 3) fail(ErrorKind::domain, "factorization needs |m| >= 2N+3");
  if (j < 0 || j >= n) fail(ErrorKind::domain, "mode index out of range");
  // Split m = c + d + rest with |c| = |d| = N+1, greedily in table order.
  MultiIndex c(n), d(n), rest = m;
  auto take = [&](MultiIndex& into) {
    int need = N + 1;
    for (int i = 0; i < n && need; ++i)
      for (int l = 0; l < n && need; ++l) {
        if (i == l) continue;
        const int q = std::min(need, rest(i, l));
        into(i, l) += q;
        rest(i, l) -= q;
        need -= q;
      }
  };
  take(c);
  take(d);
  Factorization f;
  f.a = MultiIndex(n);
  f.b = MultiIndex(n);
  for (int i = 0; i < n; ++i)
    for (int l = i + 1; l < n; ++l) {
      f.a(i, l) = c(i, l) + c(l, i);
      f.b(i, l) = d(i, l) + d(l, i);
    }
  // rest has degree >= 1: z_k from its holomorphic part, zbar_l from the other.
  bool found = false;
  for (int i = 0; i < n && !found; ++i)
    for (int l = 0; l < n && !found; ++l)
      if (i != l && rest(i, l) > 0) {
        f.k = i;
        f.l = l;
        found = true;
      }
  const bool ok = found && f.a.beat(e) - e[f.k] < 0 && f.b.beat(e) - e[f.l] < 0 &&
                  dominates(m, j, f);
  if (!ok) {
    std::ostringstream os;
    os << "factorization of " << m.str() << " failed; N = " << N
       << " may be below the nonresonance bound " << default_N(e);
    fail(ErrorKind::domain, os.str());
  }
  return f;
}

bool dominates(const MultiIndex& m, int j, const Factorization& f) {
  const int n = m.n();
  auto absexp = [n](const MultiIndex& x) {
    std::vector<int> v(static_cast<size_t>(n), 0);
    for (int i = 0; i < n; ++i)
      for (int l = 0; l < n; ++l)
        if (i != l) {
          v[static_cast<size_t>(i)] += x(i, l);
          v[static_cast<size_t>(l)] += x(i, l);
        }
    return v;
  };
  std::vector<int> lhs = absexp(m), ra = absexp(f.a), rb = absexp(f.b);
  lhs[static_cast<size_t>(j)] += 1;
  for (int i = 0; i < n; ++i) {
    int r = ra[static_cast<size_t>(i)] + rb[static_cast<size_t>(i)] + (i == j) + (i == f.k) +
            (i == f.l);
    if (lhs[static_cast<size_t>(i)] < r) return false;
  }
  return true;
}

}  // namespace nls
