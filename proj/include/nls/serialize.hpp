#pragma once

// Binary cache files: a magic tag, a format version, then little-endian raw
// doubles and int64 lengths. Readers verify the tag and version and throw io
// errors on any mismatch or short read.

#include <cstdint>
#include <fstream>
#include <string>
#include <string_view>

#include "nls/normal_form.hpp"

namespace nls {

std::uint64_t fnv1a(std::string_view s);
std::string hex64(std::uint64_t v);

class BinWriter {
 public:
  BinWriter(const std::string& path, std::string_view tag);
  void i64(std::int64_t v);
  void f64(double v);
  void str(const std::string& s);
  void vec(const Vec& v);
  void cvec(const CVec& v);
  void ints(const std::vector<int>& v);
  // Flushes and renames into place so readers never see a partial file.
  void commit();

 private:
  std::string path_, tmp_;
  std::ofstream out_;
};

class BinReader {
 public:
  BinReader(const std::string& path, std::string_view tag);
  std::int64_t i64();
  double f64();
  std::string str();
  Vec vec();
  CVec cvec();
  std::vector<int> ints();

 private:
  void raw(void* p, size_t n);
  std::string path_;
  std::ifstream in_;
};

// Eigenbasis and branches; the operator is rebuilt from the config.
void save_model(const std::string& path, const Model& m);
Model load_model(const std::string& path, const DiscreteOperator& op);

// Channels and the Z_0 coefficients of an effective Hamiltonian.
void save_effective(const std::string& path, const EffectiveHamiltonian& H);
EffectiveHamiltonian load_effective(const std::string& path, const Model& m);

}  // namespace nls
