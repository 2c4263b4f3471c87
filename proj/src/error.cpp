#include "nls/error.hpp"

namespace nls {

const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::config: return "config";
    case ErrorKind::domain: return "domain";
    case ErrorKind::degenerate: return "degenerate";
    case ErrorKind::spectrum_collision: return "spectrum-collision";
    case ErrorKind::convergence: return "convergence";
    case ErrorKind::chart: return "chart";
    case ErrorKind::small_divisor: return "small-divisor";
    case ErrorKind::nonresonance: return "nonresonance";
    case ErrorKind::branch_radius: return "branch-radius";
    case ErrorKind::io: return "io";
    case ErrorKind::fgr_degenerate: return "fgr-degenerate";
    case ErrorKind::invariant: return "invariant";
  }
  return "unknown";
}

Error::Error(ErrorKind kind, const std::string& msg)
    : std::runtime_error(std::string(to_string(kind)) + " error: " + msg), kind_(kind) {}

void fail(ErrorKind kind, const std::string& msg) { throw Error(kind, msg); }

}  // namespace nls
