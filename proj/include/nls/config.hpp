#pragma once

// Scenario files are JSON. Every section is optional and unknown keys are
// rejected; absent or null tolerances select the built-in defaults. Mode
// indices are 0-based. Schema (defaults shown):
//
//   {
//     "name": "scenario",
//     "potential": {"name": "two_gaussian", "params": {"depth1": 60, ...}},
//     "grid":      {"r_max": 30, "n": 1200},
//     "eigen":     {"max_states": 16},
//     "branch":    {"rho_max": 0.4, "n_samples": 33, "newton_tol": 1e-10},
//     "resonance": {"N": null, "tau": null},
//     "expansion": {"truncation_order": 4},
//     "fgr":       {"measure": "generalized_eigenfunction", "h4_samples": 200},
//     "simulate":  {"z0": [[0.05, 0], [0.05, 0]], "eta": 0, "T": 500, "dt": 0.0025,
//                   "sample_every": 200, "absorber": true},
//     "reduced":   {"T": 500, "dt": 0.01, "sample_every": 100, "damping": true, "varpi": true},
//     "stability": {"j": 1, "r": 0.05, "eps": [], "rho": 0.05},
//     "stages":    ["spectrum", ...],
//     "output":    "run",
//     "seed":      1
//   }

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "nls/types.hpp"

namespace nls {

using json = nlohmann::json;

// In execution order.
const std::vector<std::string>& all_stages();

struct ScenarioConfig {
  std::string name = "scenario";
  std::string potential = "two_gaussian";
  std::map<std::string, double> potential_params{
      {"depth1", 60.0}, {"width1", 0.8}, {"depth2", 6.0}, {"width2", 1.0}};
  double r_max = 30.0;
  int n = 1200;
  int max_states = 16;
  double rho_max = 0.4;
  int n_samples = 33;
  double newton_tol = 1e-10;
  std::optional<int> N;
  std::optional<double> tau;
  int truncation_order = 4;
  std::string measure = "generalized_eigenfunction";
  int h4_samples = 200;

  struct Simulate {
    std::vector<cplx> z0{0.05, 0.05};
    double eta = 0.0;  // L^2 size of the random radiation part
    double T = 500.0;
    double dt = 0.0025;
    int sample_every = 200;
    bool absorber = true;
  } simulate;

  struct Reduced {
    double T = 500.0;
    double dt = 0.01;
    int sample_every = 100;
    bool damping = true;
    bool varpi = true;
  } reduced;

  struct Stability {
    int j = 1;
    double r = 0.05;
    std::vector<double> eps;  // empty: default grid
    double rho = 0.05;
  } stability;

  std::vector<std::string> stages = all_stages();
  std::string output = "run";
  std::uint64_t seed = 1;

  static ScenarioConfig from_json(const json& j);
  json to_json() const;
  // Throws config errors.
  void validate() const;
  // Hash over the sections named, in the order given.
  std::string section_hash(const std::vector<std::string>& sections) const;
  // Hash of everything that affects numbers.
  std::string hash() const;
};

ScenarioConfig load_config(const std::string& path);

}  // namespace nls
