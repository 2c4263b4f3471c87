#pragma once

#include <stdexcept>
#include <string>

namespace nls {

enum class ErrorKind {
  config,
  domain,
  degenerate,
  spectrum_collision,
  convergence,
  chart,
  small_divisor,
  nonresonance,
  branch_radius,
  io,
  fgr_degenerate,  // the FGR lower bound fails on the sampled sphere
  invariant,       // a proven identity failed numerically
};

const char* to_string(ErrorKind k);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& msg);
  ErrorKind kind() const { return kind_; }
  // Scientific findings exit with 1 in the CLI, everything else with 2.
  bool scientific() const {
    return kind_ == ErrorKind::nonresonance || kind_ == ErrorKind::fgr_degenerate;
  }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& msg);

}  // namespace nls
