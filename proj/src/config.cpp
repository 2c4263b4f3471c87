#include <algorithm>
#include <fstream>
#include <set>

#include "nls/config.hpp"
#include "nls/error.hpp"
#include "nls/serialize.hpp"

namespace nls {

const std::vector<std::string>& all_stages() {
  static const std::vector<std::string> s{"spectrum", "bound_states", "decompose", "resonances", "expansion",
                                          "fgr",      "simulate",     "reduced",   "instability", "positivity"};
  return s;
}

namespace {

void only_keys(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
  if (!j.is_object()) fail(ErrorKind::config, where + " must be an object");
  const std::set<std::string> ok(keys.begin(), keys.end());
  for (const auto& [k, v] : j.items())
    if (!ok.count(k)) fail(ErrorKind::config, "unknown key '" + k + "' in " + where);
}

template <class T>
void get(const json& j, const char* key, T& out) {
  if (j.contains(key) && !j.at(key).is_null()) out = j.at(key).get<T>();
}

template <class T>
void get_opt(const json& j, const char* key, std::optional<T>& out) {
  if (j.contains(key) && !j.at(key).is_null()) out = j.at(key).get<T>();
}

template <class T>
json opt_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

const json& section(const json& j, const char* key) {
  static const json empty = json::object();
  return j.contains(key) ? j.at(key) : empty;
}

}  // namespace

ScenarioConfig ScenarioConfig::from_json(const json& j) {
  ScenarioConfig c;
  try {
    only_keys(j, "scenario", {"name", "potential", "grid", "eigen", "branch", "resonance", "expansion", "fgr",
                              "simulate", "reduced", "stability", "stages", "output", "seed"});
    get(j, "name", c.name);
    get(j, "output", c.output);
    get(j, "seed", c.seed);
    get(j, "stages", c.stages);

    const json& p = section(j, "potential");
    only_keys(p, "potential", {"name", "params"});
    if (p.contains("name")) {
      c.potential = p.at("name").get<std::string>();
      c.potential_params.clear();
    }
    get(p, "params", c.potential_params);

    const json& g = section(j, "grid");
    only_keys(g, "grid", {"r_max", "n"});
    get(g, "r_max", c.r_max);
    get(g, "n", c.n);

    const json& e = section(j, "eigen");
    only_keys(e, "eigen", {"max_states"});
    get(e, "max_states", c.max_states);

    const json& b = section(j, "branch");
    only_keys(b, "branch", {"rho_max", "n_samples", "newton_tol"});
    get(b, "rho_max", c.rho_max);
    get(b, "n_samples", c.n_samples);
    get(b, "newton_tol", c.newton_tol);

    const json& r = section(j, "resonance");
    only_keys(r, "resonance", {"N", "tau"});
    get_opt(r, "N", c.N);
    get_opt(r, "tau", c.tau);

    const json& x = section(j, "expansion");
    only_keys(x, "expansion", {"truncation_order"});
    get(x, "truncation_order", c.truncation_order);

    const json& f = section(j, "fgr");
    only_keys(f, "fgr", {"measure", "h4_samples"});
    get(f, "measure", c.measure);
    get(f, "h4_samples", c.h4_samples);

    const json& s = section(j, "simulate");
    only_keys(s, "simulate", {"z0", "eta", "T", "dt", "sample_every", "absorber"});
    if (s.contains("z0")) {
      c.simulate.z0.clear();
      for (const auto& z : s.at("z0")) {
        if (z.is_number()) {
          c.simulate.z0.emplace_back(z.get<double>(), 0.0);
        } else {
          if (!z.is_array() || z.size() != 2) fail(ErrorKind::config, "simulate.z0 entries are numbers or [re, im]");
          c.simulate.z0.emplace_back(z[0].get<double>(), z[1].get<double>());
        }
      }
    }
    get(s, "eta", c.simulate.eta);
    get(s, "T", c.simulate.T);
    get(s, "dt", c.simulate.dt);
    get(s, "sample_every", c.simulate.sample_every);
    get(s, "absorber", c.simulate.absorber);

    const json& d = section(j, "reduced");
    only_keys(d, "reduced", {"T", "dt", "sample_every", "damping", "varpi"});
    get(d, "T", c.reduced.T);
    get(d, "dt", c.reduced.dt);
    get(d, "sample_every", c.reduced.sample_every);
    get(d, "damping", c.reduced.damping);
    get(d, "varpi", c.reduced.varpi);

    const json& t = section(j, "stability");
    only_keys(t, "stability", {"j", "r", "eps", "rho"});
    get(t, "j", c.stability.j);
    get(t, "r", c.stability.r);
    get(t, "eps", c.stability.eps);
    get(t, "rho", c.stability.rho);
  } catch (const json::exception& ex) {
    fail(ErrorKind::config, std::string("malformed scenario: ") + ex.what());
  }
  c.validate();
  return c;
}

json ScenarioConfig::to_json() const {
  json z0 = json::array();
  for (cplx z : simulate.z0) z0.push_back({z.real(), z.imag()});
  return {
      {"name", name},
      {"potential", {{"name", potential}, {"params", potential_params}}},
      {"grid", {{"r_max", r_max}, {"n", n}}},
      {"eigen", {{"max_states", max_states}}},
      {"branch", {{"rho_max", rho_max}, {"n_samples", n_samples}, {"newton_tol", newton_tol}}},
      {"resonance", {{"N", opt_json(N)}, {"tau", opt_json(tau)}}},
      {"expansion", {{"truncation_order", truncation_order}}},
      {"fgr", {{"measure", measure}, {"h4_samples", h4_samples}}},
      {"simulate",
       {{"z0", z0},
        {"eta", simulate.eta},
        {"T", simulate.T},
        {"dt", simulate.dt},
        {"sample_every", simulate.sample_every},
        {"absorber", simulate.absorber}}},
      {"reduced",
       {{"T", reduced.T},
        {"dt", reduced.dt},
        {"sample_every", reduced.sample_every},
        {"damping", reduced.damping},
        {"varpi", reduced.varpi}}},
      {"stability", {{"j", stability.j}, {"r", stability.r}, {"eps", stability.eps}, {"rho", stability.rho}}},
      {"stages", stages},
      {"output", output},
      {"seed", seed},
  };
}

void ScenarioConfig::validate() const {
  auto need = [](bool ok, const std::string& msg) {
    if (!ok) fail(ErrorKind::config, msg);
  };
  need(r_max > 0, "grid.r_max must be positive");
  need(n >= 16, "grid.n must be at least 16");
  need(max_states >= 1, "eigen.max_states must be at least 1");
  need(rho_max > 0, "branch.rho_max must be positive");
  need(n_samples >= 4, "branch.n_samples must be at least 4");
  need(newton_tol > 0, "branch.newton_tol must be positive");
  need(!N || *N >= 1, "resonance.N must be at least 1");
  need(!tau || *tau > 0, "resonance.tau must be positive");
  need(truncation_order == 2 || truncation_order == 4, "expansion.truncation_order must be 2 or 4");
  need(measure == "generalized_eigenfunction" || measure == "smoothed_eigensum",
       "fgr.measure must be generalized_eigenfunction or smoothed_eigensum");
  need(h4_samples >= 1, "fgr.h4_samples must be at least 1");
  need(!simulate.z0.empty(), "simulate.z0 must list at least one amplitude");
  need(simulate.eta >= 0, "simulate.eta must be nonnegative");
  need(simulate.T >= 0 && simulate.dt > 0 && simulate.sample_every >= 1,
       "simulate needs T >= 0, dt > 0, sample_every >= 1");
  need(reduced.T >= 0 && reduced.dt > 0 && reduced.sample_every >= 1,
       "reduced needs T >= 0, dt > 0, sample_every >= 1");
  need(stability.j >= 1, "stability.j must name an excited mode (>= 1)");
  need(stability.r > 0 && stability.rho > 0, "stability.r and stability.rho must be positive");
  for (double e : stability.eps) need(e >= 0, "stability.eps entries must be nonnegative");
  need(!output.empty(), "output must be a directory name");
  const auto& known = all_stages();
  for (const auto& s : stages)
    need(std::find(known.begin(), known.end(), s) != known.end(), "unknown stage '" + s + "'");
}

std::string ScenarioConfig::section_hash(const std::vector<std::string>& sections) const {
  const json j = to_json();
  json sub = json::object();
  for (const auto& s : sections) sub[s] = j.at(s);
  return hex64(fnv1a(sub.dump()));
}

std::string ScenarioConfig::hash() const {
  std::vector<std::string> s;
  const json j = to_json();
  for (const auto& [k, v] : j.items())
    if (k != "name" && k != "output" && k != "stages") s.push_back(k);
  return section_hash(s);
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::io, "cannot open " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& ex) {
    fail(ErrorKind::config, path + ": " + ex.what());
  }
  return ScenarioConfig::from_json(j);
}

}  // namespace nls
