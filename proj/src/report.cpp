#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "nls/error.hpp"
#include "nls/pipeline.hpp"
#include "nls/report.hpp"

namespace fs = std::filesystem;

namespace nls {

int CsvTable::column(const std::string& name) const {
  for (size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return static_cast<int>(i);
  return -1;
}

void write_csv(const std::string& path, const CsvTable& t) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::io, "cannot write " + path);
  for (size_t i = 0; i < t.header.size(); ++i) out << (i ? "," : "") << t.header[i];
  out << "\r\n";
  char buf[40];
  for (const auto& row : t.rows) {
    for (size_t i = 0; i < row.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17e", row[i]);
      out << (i ? "," : "") << buf;
    }
    out << "\r\n";
  }
  if (!out) fail(ErrorKind::io, "write failed for " + path);
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::io, "cannot open " + path);
  CsvTable t;
  std::string line;
  auto cells = [](std::string l) {
    if (!l.empty() && l.back() == '\r') l.pop_back();
    std::vector<std::string> c;
    std::stringstream ss(l);
    std::string x;
    while (std::getline(ss, x, ',')) c.push_back(x);
    return c;
  };
  if (!std::getline(in, line)) fail(ErrorKind::io, path + ": empty file");
  t.header = cells(line);
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    std::vector<double> row;
    for (const auto& c : cells(line)) row.push_back(std::strtod(c.c_str(), nullptr));
    if (row.size() != t.header.size()) fail(ErrorKind::io, path + ": ragged row");
    t.rows.push_back(std::move(row));
  }
  return t;
}

namespace {

const char* kTrajectoryScript = R"(# Time series of |z_j|, |zeta_j| and V from a trajectory CSV.
# Usage: python3 plot_trajectory.py <run_dir>/simulate/trajectory.csv [out.png]
import sys
import matplotlib.pyplot as plt
import pandas as pd

df = pd.read_csv(sys.argv[1])
modes = sorted(int(c[5:]) for c in df.columns if c.startswith("abs_z") and not c.startswith("abs_zeta"))
fig, ax = plt.subplots(2, 1, sharex=True, figsize=(8, 6))
for j in modes:
    ax[0].plot(df.t, df[f"abs_z{j}"], label=f"|z_{j + 1}|")
    ax[0].plot(df.t, df[f"abs_zeta{j}"], "--", label=f"|zeta_{j + 1}|")
ax[0].set_yscale("log")
ax[0].legend()
ax[1].plot(df.t, df.V)
ax[1].set_ylabel("V")
ax[1].set_xlabel("t")
fig.tight_layout()
fig.savefig(sys.argv[2] if len(sys.argv) > 2 else "trajectory.png", dpi=150)
)";

const char* kBranchScript = R"(# Log-log scaling of ||q_j|| and E_j - e_j along the branches.
# Usage: python3 plot_branches.py <run_dir>/bound_states [out.png]
import glob
import os
import sys
import matplotlib.pyplot as plt
import pandas as pd

fig, ax = plt.subplots(1, 2, figsize=(10, 4))
for path in sorted(glob.glob(os.path.join(sys.argv[1], "branch_*.csv"))):
    df = pd.read_csv(path).iloc[1:]
    j = os.path.basename(path)[7:-4]
    ax[0].loglog(df.rho, df.q_norm, "o-", label=f"mode {j}")
    ax[1].loglog(df.rho, abs(df.E - pd.read_csv(path).E[0]), "o-", label=f"mode {j}")
ax[0].set_xlabel("rho")
ax[0].set_ylabel("||q||")
ax[1].set_xlabel("rho")
ax[1].set_ylabel("|E - e|")
ax[0].legend()
fig.tight_layout()
fig.savefig(sys.argv[2] if len(sys.argv) > 2 else "branches.png", dpi=150)
)";

std::string fmt(double x) {
  char b[32];
  std::snprintf(b, sizeof b, "%.6g", x);
  return b;
}

std::string num(const json& j) { return j.is_number() ? fmt(j.get<double>()) : j.dump(); }

}  // namespace

ReportSummary report(const std::string& run_dir) {
  const fs::path dir(run_dir);
  const fs::path mpath = dir / "manifest.json";
  if (!fs::exists(mpath)) fail(ErrorKind::io, "missing manifest.json in " + run_dir);
  json j;
  {
    std::ifstream in(mpath);
    try {
      j = json::parse(in);
    } catch (const json::exception& ex) {
      fail(ErrorKind::io, std::string("unreadable manifest: ") + ex.what());
    }
  }
  const RunManifest man = RunManifest::from_json(j);
  ReportSummary rep;
  std::ostringstream os;

  if (man.status != "ok") {
    std::string flag = "FAILED in stage " + man.failed_stage + " (" + man.error_kind + "): " + man.error;
    rep.scientific_failure = man.error_kind == "nonresonance" || man.error_kind == "fgr-degenerate";
    if (man.error_kind == "nonresonance") flag = "NONRESONANCE FAILURE: " + flag;
    if (man.error_kind == "fgr-degenerate") flag = "FGR NONDEGENERACY FAILURE: " + flag;
    rep.flags.push_back(flag);
  }
  os << "nlsselect " << man.version << " run, config " << man.config_hash << ", created " << man.created << "\n";
  for (const auto& f : rep.flags) os << "!! " << f << "\n";
  os << "\n";

  for (const auto& s : man.stages) {
    for (const auto& a : s.artifacts)
      if (!fs::exists(dir / a)) rep.missing.push_back(a);
    const json& m = s.summary;
    os << "[" << s.name << "]" << (s.cache_hit ? " (cached)" : "") << "\n";
    if (s.name == "spectrum") {
      os << "  modes " << m["modes"] << "\n";
      for (size_t k = 0; k < m["e"].size(); ++k) os << "  e_" << k + 1 << " = " << num(m["e"][k]) << "\n";
      if (m["zero_energy"]["flagged"].get<bool>()) rep.flags.push_back("possible zero-energy resonance");
    } else if (s.name == "bound_states") {
      os << "  mode  rho_max  q_exponent  quad_coefficient  phi4\n";
      for (const auto& b : m["branches"])
        os << "  " << b["j"].get<int>() + 1 << "  " << num(b["rho_max"]) << "  " << num(b["q_exponent"]) << "  "
           << num(b["quad_coefficient"]) << "  " << num(b["phi4"]) << "\n";
    } else if (s.name == "decompose") {
      os << "  eta_norm " << num(m["eta_norm"]) << ", round trip " << num(m["round_trip"]) << "\n";
    } else if (s.name == "resonances") {
      os << "  N " << m["N"] << ", tau " << num(m["tau"]) << ", |M| " << m["M_size"] << ", H3 min "
         << num(m["h3_min"]) << "\n  Lambda " << m["Lambda"].dump() << "\n";
    } else if (s.name == "expansion") {
      os << "  channels " << m["channels"] << " (" << m["radiating"] << " with profile), generators "
         << m["generators"] << ", homological residual " << num(m["homological_residual"]) << "\n";
    } else if (s.name == "fgr") {
      os << "  Lambda " << m["Lambda"].dump() << "\n";
      if (m["h4"].is_object())
        os << "  c_low " << num(m["h4"]["c_low"]) << ", c_high " << num(m["h4"]["c_high"]) << "\n";
      else
        os << "  no radiating frequencies\n";
    } else if (s.name == "simulate" || s.name == "reduced") {
      os << "  verdict " << m["verdict"].get<std::string>();
      if (m["j0"].get<int>() >= 0) os << ", j0 = " << m["j0"].get<int>() + 1;
      os << "\n  rho_plus " << m["rho_plus"].dump() << "\n  decay rates " << m["decay_rate"].dump() << "\n";
      if (s.name == "simulate" && m["truncated"].get<bool>()) rep.flags.push_back("simulation truncated: " + m["note"].get<std::string>());
      if (s.name == "reduced")
        os << "  Lyapunov delta_V " << num(m["lyapunov"]["delta_V"]) << ", closure " << num(m["lyapunov"]["closure"]) << "\n";
    } else if (s.name == "instability") {
      os << "  mode " << m["j"].get<int>() + 1 << ", r " << num(m["r"]) << ": slope " << num(m["slope"]) << " vs "
         << num(m["target"]) << ", gap negative " << m["negative"] << "\n";
    } else if (s.name == "positivity") {
      os << "  L- lowest " << m["lminus"].dump() << ", L+ lowest " << num(m["lplus0"]) << ", overlap "
         << num(m["overlap"]) << "\n";
      if (!m["stable"].get<bool>()) rep.flags.push_back("ground state positivity violated");
    }
  }
  if (!rep.missing.empty()) {
    os << "\nmissing artifacts:\n";
    for (const auto& a : rep.missing) os << "  " << a << "\n";
  }
  rep.text = os.str();

  std::ofstream(dir / "summary.txt") << rep.text;
  for (const auto& [name, body] : {std::pair{"plot_trajectory.py", kTrajectoryScript}, std::pair{"plot_branches.py", kBranchScript}}) {
    std::ofstream(dir / name) << body;
    rep.scripts.push_back(name);
  }
  return rep;
}

}  // namespace nls
