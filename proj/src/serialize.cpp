#include <cstdio>
#include <filesystem>

#include "nls/error.hpp"
#include "nls/serialize.hpp"

namespace nls {

namespace {
constexpr std::int64_t kFormat = 1;
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

BinWriter::BinWriter(const std::string& path, std::string_view tag)
    : path_(path), tmp_(path + ".tmp"), out_(tmp_, std::ios::binary) {
  if (!out_) fail(ErrorKind::io, "cannot write " + tmp_);
  str(std::string(tag));
  i64(kFormat);
}

void BinWriter::i64(std::int64_t v) { out_.write(reinterpret_cast<const char*>(&v), sizeof v); }
void BinWriter::f64(double v) { out_.write(reinterpret_cast<const char*>(&v), sizeof v); }

void BinWriter::str(const std::string& s) {
  i64(static_cast<std::int64_t>(s.size()));
  out_.write(s.data(), static_cast<std::streamsize>(s.size()));
}

void BinWriter::vec(const Vec& v) {
  i64(v.size());
  out_.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
}

void BinWriter::cvec(const CVec& v) {
  i64(v.size());
  out_.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(cplx)));
}

void BinWriter::ints(const std::vector<int>& v) {
  i64(static_cast<std::int64_t>(v.size()));
  for (int x : v) i64(x);
}

void BinWriter::commit() {
  out_.close();
  if (!out_) fail(ErrorKind::io, "write failed for " + tmp_);
  std::filesystem::rename(tmp_, path_);
}

BinReader::BinReader(const std::string& path, std::string_view tag) : path_(path), in_(path, std::ios::binary) {
  if (!in_) fail(ErrorKind::io, "cannot open " + path);
  if (str() != tag) fail(ErrorKind::io, path + ": wrong file tag");
  if (i64() != kFormat) fail(ErrorKind::io, path + ": unsupported format version");
}

void BinReader::raw(void* p, size_t n) {
  in_.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
  if (!in_) fail(ErrorKind::io, path_ + ": truncated file");
}

std::int64_t BinReader::i64() {
  std::int64_t v;
  raw(&v, sizeof v);
  return v;
}

double BinReader::f64() {
  double v;
  raw(&v, sizeof v);
  return v;
}

std::string BinReader::str() {
  const auto n = i64();
  if (n < 0 || n > (1 << 20)) fail(ErrorKind::io, path_ + ": corrupt string length");
  std::string s(static_cast<size_t>(n), '\0');
  raw(s.data(), s.size());
  return s;
}

Vec BinReader::vec() {
  const auto n = i64();
  if (n < 0 || n > (1ll << 32)) fail(ErrorKind::io, path_ + ": corrupt vector length");
  Vec v(n);
  raw(v.data(), static_cast<size_t>(n) * sizeof(double));
  return v;
}

CVec BinReader::cvec() {
  const auto n = i64();
  if (n < 0 || n > (1ll << 32)) fail(ErrorKind::io, path_ + ": corrupt vector length");
  CVec v(n);
  raw(v.data(), static_cast<size_t>(n) * sizeof(cplx));
  return v;
}

std::vector<int> BinReader::ints() {
  const auto n = i64();
  if (n < 0 || n > (1 << 20)) fail(ErrorKind::io, path_ + ": corrupt list length");
  std::vector<int> v;
  for (std::int64_t i = 0; i < n; ++i) v.push_back(static_cast<int>(i64()));
  return v;
}

void save_model(const std::string& path, const Model& m) {
  BinWriter w(path, "nls-model");
  w.i64(m.op.size());
  w.vec(m.basis.e);
  w.f64(m.basis.gap_tolerance);
  w.f64(m.basis.h);
  for (const auto& p : m.basis.phi) w.vec(p);
  for (const auto& f : m.fam) {
    w.i64(f.j);
    w.f64(f.e);
    w.i64(f.halvings);
    w.i64(static_cast<std::int64_t>(f.samples.size()));
    for (const auto& s : f.samples) {
      w.f64(s.rho);
      w.f64(s.t);
      w.vec(s.psi);
      w.vec(s.dpsi);
      w.f64(s.f);
      w.f64(s.df);
      w.f64(s.residual);
      w.i64(s.newton_iters);
    }
  }
  w.commit();
}

Model load_model(const std::string& path, const DiscreteOperator& op) {
  BinReader r(path, "nls-model");
  if (r.i64() != op.size()) fail(ErrorKind::io, path + ": grid size mismatch");
  Model m;
  m.op = op;
  m.basis.e = r.vec();
  m.basis.gap_tolerance = r.f64();
  m.basis.h = r.f64();
  for (int j = 0; j < m.basis.count(); ++j) m.basis.phi.push_back(r.vec());
  for (int j = 0; j < m.basis.count(); ++j) {
    BoundStateFamily f;
    f.j = static_cast<int>(r.i64());
    f.e = r.f64();
    f.halvings = static_cast<int>(r.i64());
    f.h = op.h();
    f.phi = m.basis.phi[static_cast<size_t>(j)];
    f.kappa = op.kappa;
    const auto ns = r.i64();
    for (std::int64_t k = 0; k < ns; ++k) {
      BranchSample s;
      s.rho = r.f64();
      s.t = r.f64();
      s.psi = r.vec();
      s.dpsi = r.vec();
      s.f = r.f64();
      s.df = r.f64();
      s.residual = r.f64();
      s.newton_iters = static_cast<int>(r.i64());
      f.samples.push_back(std::move(s));
    }
    m.fam.push_back(std::move(f));
  }
  return m;
}

void save_effective(const std::string& path, const EffectiveHamiltonian& H) {
  BinWriter w(path, "nls-effective");
  const int n = static_cast<int>(H.a.rows());
  w.i64(n);
  w.vec(Eigen::Map<const Vec>(H.a.data(), H.a.size()));
  w.i64(static_cast<std::int64_t>(H.channels.size()));
  for (const auto& c : H.channels) {
    w.ints(c.mono.mu);
    w.ints(c.mono.nu);
    w.f64(c.L);
    w.str(c.source);
    w.f64(c.norm);
    w.cvec(c.G);
  }
  w.vec(Eigen::Map<const Vec>(H.Lambda.data(), static_cast<Eigen::Index>(H.Lambda.size())));
  for (const auto& ml : H.ML) w.ints(ml);
  w.commit();
}

EffectiveHamiltonian load_effective(const std::string& path, const Model& m) {
  BinReader r(path, "nls-effective");
  EffectiveHamiltonian H;
  H.model = &m;
  const auto n = r.i64();
  if (n != m.modes()) fail(ErrorKind::io, path + ": mode count mismatch");
  const Vec a = r.vec();
  H.a = Eigen::Map<const Mat>(a.data(), n, n);
  const auto nc = r.i64();
  for (std::int64_t k = 0; k < nc; ++k) {
    Channel c;
    c.mono.mu = r.ints();
    c.mono.nu = r.ints();
    c.L = r.f64();
    c.source = r.str();
    c.norm = r.f64();
    c.G = r.cvec();
    H.channels.push_back(std::move(c));
  }
  const Vec L = r.vec();
  H.Lambda.assign(L.data(), L.data() + L.size());
  for (size_t i = 0; i < H.Lambda.size(); ++i) H.ML.push_back(r.ints());
  return H;
}

}  // namespace nls
