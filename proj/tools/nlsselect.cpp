// Command-line front end. Each analysis subcommand runs the matching pipeline
// stage (plus whatever it needs) on a scenario file and prints its summary as
// JSON. Exit codes: 0 success, 1 scientific finding, 2 configuration or
// numerical error.

#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "nls/error.hpp"
#include "nls/pipeline.hpp"
#include "nls/report.hpp"

using namespace nls;

namespace {

struct Common {
  std::string config;
  std::string output;
  std::string cache;
  bool no_cache = false;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("config", c.config, "scenario JSON file")->required()->check(CLI::ExistingFile);
  sub->add_option("-o,--output", c.output, "run directory (overrides the scenario)");
  sub->add_option("--cache-dir", c.cache, "cache directory (overrides NLSSEL_CACHE_DIR)");
  sub->add_flag("--no-cache", c.no_cache, "recompute everything and write no cache");
}

int run(const Common& c, const std::vector<std::string>& stages) {
  ScenarioConfig cfg = load_config(c.config);
  if (!c.output.empty()) cfg.output = c.output;
  if (!stages.empty()) cfg.stages = stages;
  const RunManifest m = run_scenario(cfg, RunOptions{c.cache, !c.no_cache});
  if (stages.empty()) {
    std::cout << report(cfg.output).text;
  } else {
    json out = json::object();
    for (const auto& s : m.stages) out[s.name] = s.summary;
    std::cout << out.dump(2) << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mode selection for small solutions of NLS with a trapping potential"};
  app.set_version_flag("--version", std::string("nlsselect ") + kToolVersion);
  app.require_subcommand(1);

  Common common;
  const std::vector<std::pair<std::string, std::vector<std::string>>> analyses{
      {"spectrum", {"spectrum"}},
      {"bound-states", {"bound_states"}},
      {"decompose", {"decompose"}},
      {"resonances", {"resonances"}},
      {"fgr", {"fgr"}},
      {"simulate", {"simulate"}},
      {"reduced", {"reduced"}},
      {"instability", {"instability", "positivity"}},
  };
  const std::map<std::string, std::string> help{
      {"spectrum", "linear eigenvalues, Richardson check, zero-energy heuristic"},
      {"bound-states", "nonlinear branches and their scaling certificates"},
      {"decompose", "modulation coordinates of the scenario's initial state"},
      {"resonances", "resonant multi-index sets and radiating frequencies"},
      {"fgr", "Fermi golden rule table and its nondegeneracy bounds"},
      {"simulate", "full PDE run with selection verdict"},
      {"reduced", "reduced modulation system with Lyapunov closure"},
      {"instability", "excited-state energy curve and ground-state positivity"},
  };
  std::vector<std::pair<CLI::App*, std::vector<std::string>>> subs;
  for (const auto& [name, stages] : analyses) {
    CLI::App* s = app.add_subcommand(name, help.at(name));
    add_common(s, common);
    subs.emplace_back(s, stages);
  }
  CLI::App* run_cmd = app.add_subcommand("run", "every stage listed in the scenario, then the report");
  add_common(run_cmd, common);
  std::string run_dir;
  CLI::App* rep_cmd = app.add_subcommand("report", "summary and plot scripts for a finished run");
  rep_cmd->add_option("run_dir", run_dir, "run directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*rep_cmd) {
      const ReportSummary r = report(run_dir);
      std::cout << r.text;
      return r.scientific_failure ? 1 : 0;
    }
    if (*run_cmd) return run(common, {});
    for (const auto& [s, stages] : subs)
      if (*s) return run(common, stages);
  } catch (const Error& e) {
    std::cerr << "nlsselect: " << e.what() << "\n";
    return e.scientific() ? 1 : 2;
  } catch (const std::exception& e) {
    std::cerr << "nlsselect: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
