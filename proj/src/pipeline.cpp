#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <optional>
#include <random>

#include "nls/dynamics.hpp"
#include "nls/error.hpp"
#include "nls/pipeline.hpp"
#include "nls/report.hpp"
#include "nls/serialize.hpp"
#include "nls/stability.hpp"

namespace fs = std::filesystem;

namespace nls {

json RunManifest::to_json() const {
  json st = json::array();
  for (const auto& s : stages)
    st.push_back({{"name", s.name},
                  {"key", s.key},
                  {"summary", s.summary},
                  {"artifacts", s.artifacts},
                  {"run", {{"cache_hit", s.cache_hit}, {"seconds", s.seconds}}}});
  json j = {{"tool", "nlsselect"},  {"version", version}, {"config_hash", config_hash},
            {"config", config},     {"status", status},   {"stages", st},
            {"run", {{"created", created}}}};
  if (status != "ok") j["error"] = {{"stage", failed_stage}, {"kind", error_kind}, {"message", error}};
  return j;
}

RunManifest RunManifest::from_json(const json& j) {
  RunManifest m;
  try {
    m.version = j.at("version").get<std::string>();
    m.config_hash = j.at("config_hash").get<std::string>();
    m.config = j.at("config");
    m.status = j.at("status").get<std::string>();
    m.created = j.at("run").at("created").get<std::string>();
    if (j.contains("error")) {
      m.failed_stage = j["error"].at("stage").get<std::string>();
      m.error_kind = j["error"].at("kind").get<std::string>();
      m.error = j["error"].at("message").get<std::string>();
    }
    for (const auto& s : j.at("stages")) {
      StageRecord r;
      r.name = s.at("name").get<std::string>();
      r.key = s.at("key").get<std::string>();
      r.summary = s.at("summary");
      r.artifacts = s.at("artifacts").get<std::vector<std::string>>();
      r.cache_hit = s.at("run").at("cache_hit").get<bool>();
      r.seconds = s.at("run").at("seconds").get<double>();
      m.stages.push_back(std::move(r));
    }
  } catch (const json::exception& ex) {
    fail(ErrorKind::io, std::string("malformed manifest: ") + ex.what());
  }
  return m;
}

const StageRecord* RunManifest::stage(const std::string& name) const {
  for (const auto& s : stages)
    if (s.name == name) return &s;
  return nullptr;
}

std::string resolve_cache_dir(const ScenarioConfig& cfg, const RunOptions& opt) {
  if (!opt.cache_dir.empty()) return opt.cache_dir;
  if (const char* env = std::getenv("NLSSEL_CACHE_DIR"); env && *env) return env;
  return (fs::path(cfg.output) / ".cache").string();
}

namespace {

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json vec_json(const Vec& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

json cvec_json(const CVec& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back({v[i].real(), v[i].imag()});
  return a;
}

json verdict_json(const Verdict& v) {
  return {{"kind", v.kind},
          {"j0", v.j0},
          {"rho_plus", v.rho_plus},
          {"decay_rate", v.decay_rate},
          {"decaying", v.decaying},
          {"final_change", v.final_change},
          {"window_means", v.window}};
}

CsvTable trajectory_csv(const TrajectoryRecord& r) {
  CsvTable t;
  t.header = {"t"};
  const int n = r.modes();
  for (int j = 0; j < n; ++j)
    for (const char* c : {"re_z", "im_z", "abs_z", "abs_zeta"}) t.header.push_back(std::string(c) + std::to_string(j));
  for (const char* c : {"mass", "energy", "V", "eta_norm"}) t.header.push_back(c);
  for (size_t i = 0; i < r.size(); ++i) {
    std::vector<double> row{r.t[i]};
    for (int j = 0; j < n; ++j) {
      row.push_back(r.z[i][j].real());
      row.push_back(r.z[i][j].imag());
      row.push_back(std::abs(r.z[i][j]));
      row.push_back(std::abs(r.zeta[i][j]));
    }
    row.insert(row.end(), {r.mass[i], r.energy[i], r.V[i], r.eta_norm[i]});
    t.rows.push_back(std::move(row));
  }
  return t;
}

// Lazily built objects shared by the stages.
class Context {
 public:
  Context(const ScenarioConfig& cfg, std::string cache, bool use_cache)
      : cfg_(cfg), cache_(std::move(cache)), use_cache_(use_cache) {}

  const ScenarioConfig& cfg() const { return cfg_; }

  const DiscreteOperator& op() {
    if (!op_) op_ = build_operator(RadialGrid::make(cfg_.r_max, cfg_.n), make_potential(cfg_.potential, cfg_.potential_params));
    return *op_;
  }

  const Model& model() {
    if (!model_) {
      const std::string path = cache_file("model", {"potential", "grid", "eigen", "branch"});
      if (use_cache_ && fs::exists(path)) {
        model_ = std::make_unique<Model>(load_model(path, op()));
      } else {
        BranchOptions b;
        b.rho_max = cfg_.rho_max;
        b.n_samples = cfg_.n_samples;
        b.tol = cfg_.newton_tol;
        model_ = std::make_unique<Model>(build_model(op(), EigenOptions{.max_states = cfg_.max_states}, b));
        if (use_cache_) save_model(path, *model_);
      }
    }
    return *model_;
  }

  const ResonanceTable& table() {
    if (!table_) {
      TableOptions o;
      if (cfg_.N) o.N = *cfg_.N;
      if (cfg_.tau) o.tau = *cfg_.tau;
      table_ = build_table(model().basis.e, o);
    }
    return *table_;
  }

  const HamiltonianExpansion& expansion() {
    if (!ex_) ex_ = std::make_unique<HamiltonianExpansion>(expand_energy(model(), cfg_.truncation_order));
    return *ex_;
  }

  const EffectiveHamiltonian& effective() {
    if (!H_) {
      const std::string path =
          cache_file("effective", {"potential", "grid", "eigen", "branch", "resonance", "expansion"});
      if (use_cache_ && fs::exists(path)) {
        H_ = std::make_unique<EffectiveHamiltonian>(load_effective(path, model()));
      } else {
        H_ = std::make_unique<EffectiveHamiltonian>(effective_hamiltonian(expansion(), table()));
        if (use_cache_) save_effective(path, *H_);
      }
    }
    return *H_;
  }

  const FgrTable& fgr() {
    if (!fgr_) {
      SpectralMeasureBackend b;
      b.kind = measure_kind_from(cfg_.measure);
      fgr_ = std::make_unique<FgrTable>(build_fgr_table(effective(), b));
    }
    return *fgr_;
  }

  const ReducedModel& reduced() {
    if (!rm_) {
      ReducedOptions o;
      o.damping = cfg_.reduced.damping;
      o.varpi = cfg_.reduced.varpi;
      rm_ = std::make_unique<ReducedModel>(build_reduced(effective(), fgr(), o));
    }
    return *rm_;
  }

  CVec z0() {
    const int n = model().modes();
    if (static_cast<int>(cfg_.simulate.z0.size()) != n)
      fail(ErrorKind::config, "simulate.z0 has " + std::to_string(cfg_.simulate.z0.size()) + " entries but the potential has " +
                                  std::to_string(n) + " bound states");
    return Eigen::Map<const CVec>(cfg_.simulate.z0.data(), n);
  }

  // Radiation part of the initial state: seeded random bumps on P_c, scaled to simulate.eta.
  CVec eta0() {
    const auto& g = op().grid;
    CVec f = CVec::Zero(g.n_points);
    if (cfg_.simulate.eta == 0) return f;
    std::mt19937_64 rng(cfg_.seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0), w(0.6, 2.0);
    for (int t = 0; t < 4; ++t) {
      const cplx c(u(rng), u(rng));
      const double a = w(rng), c0 = 2.0 * std::abs(u(rng));
      for (int k = 0; k < g.n_points; ++k) {
        const double r = g.r(k);
        f[k] += c * r * std::exp(-((r - c0) * (r - c0)) / (a * a));
      }
    }
    f = project_continuous(model().basis, f);
    return f * (cfg_.simulate.eta / std::sqrt(op().mass(f)));
  }

  CVec initial_state() { return synthesize(model(), {z0(), eta0()}); }

 private:
  std::string cache_file(const std::string& what, const std::vector<std::string>& sections) const {
    return (fs::path(cache_) / (what + "-" + hex64(fnv1a(std::string(kToolVersion) + cfg_.section_hash(sections))) + ".bin"))
        .string();
  }

  ScenarioConfig cfg_;
  std::string cache_;
  bool use_cache_;
  std::optional<DiscreteOperator> op_;
  std::unique_ptr<Model> model_;
  std::optional<ResonanceTable> table_;
  std::unique_ptr<HamiltonianExpansion> ex_;
  std::unique_ptr<EffectiveHamiltonian> H_;
  std::unique_ptr<FgrTable> fgr_;
  std::unique_ptr<ReducedModel> rm_;
};

// Stage bodies write artifacts into dir and return the summary.
struct StageOut {
  json summary;
  std::vector<std::string> files;  // names inside dir
};
using StageFn = std::function<StageOut(Context&, const fs::path& dir)>;

void write_json(const fs::path& p, const json& j) {
  std::ofstream out(p);
  if (!out) fail(ErrorKind::io, "cannot write " + p.string());
  out << j.dump(2) << "\n";
}

StageOut stage_spectrum(Context& c, const fs::path& dir) {
  const auto& cfg = c.cfg();
  const EigenOptions eo{.max_states = cfg.max_states};
  const EigenBasis b = eigenbasis(c.op(), eo);
  const auto fine_op = build_operator(RadialGrid::make(cfg.r_max, 2 * cfg.n + 1),
                                      make_potential(cfg.potential, cfg.potential_params));
  const Vec fine = eigenbasis(fine_op, eo).e;
  const Eigen::Index k = std::min(b.e.size(), fine.size());
  const Vec rich = richardson4(b.e.head(k), fine.head(k));
  const auto ze = zero_energy_check(c.op());

  CsvTable ev{{"j", "e", "e_fine", "e_richardson"}, {}};
  for (Eigen::Index j = 0; j < b.e.size(); ++j)
    ev.rows.push_back({double(j), b.e[j], j < k ? fine[j] : NAN, j < k ? rich[j] : NAN});
  write_csv((dir / "eigenvalues.csv").string(), ev);

  CsvTable ef;
  ef.header.push_back("r");
  for (int j = 0; j < b.count(); ++j) ef.header.push_back("phi" + std::to_string(j));
  const int stride = std::max(1, cfg.n / 400);
  for (int i = 0; i < cfg.n; i += stride) {
    std::vector<double> row{c.op().grid.r(i)};
    for (const auto& p : b.phi) row.push_back(p[i]);
    ef.rows.push_back(std::move(row));
  }
  write_csv((dir / "eigenfunctions.csv").string(), ef);

  return {{{"modes", b.count()},
           {"e", vec_json(b.e)},
           {"e_richardson", vec_json(rich)},
           {"min_gap", b.min_gap()},
           {"zero_energy", {{"slope_ratio", ze.slope_ratio}, {"flagged", ze.flagged}}}},
          {"eigenvalues.csv", "eigenfunctions.csv"}};
}

StageOut stage_bound_states(Context& c, const fs::path& dir) {
  const Model& m = c.model();
  json certs = json::array();
  StageOut out;
  for (const auto& f : m.fam) {
    const auto cert = certify(f, m.op);
    certs.push_back({{"j", f.j},
                     {"rho_max", f.rho_max()},
                     {"halvings", f.halvings},
                     {"q_exponent", cert.q_exponent},
                     {"quad_coefficient", cert.quad_coefficient},
                     {"phi4", cert.phi4},
                     {"max_residual", cert.max_residual}});
    CsvTable t{{"rho", "E", "q_norm", "residual"}, {}};
    for (const auto& s : f.samples) {
      // q = Q - rho phi = rho t psi
      const double q = s.rho * s.t * std::sqrt(m.op.dot(s.psi, s.psi));
      t.rows.push_back({s.rho, f.e + s.t * s.f, q, s.residual});
    }
    const std::string name = "branch_" + std::to_string(f.j) + ".csv";
    write_csv((dir / name).string(), t);
    out.files.push_back(name);
  }
  out.summary = {{"branches", certs}, {"branch_radius", m.branch_radius()}};
  return out;
}

StageOut stage_decompose(Context& c, const fs::path& dir) {
  const Model& m = c.model();
  const CVec u = c.initial_state();
  const ModulationState s = decompose(m, u);
  const CVec back = synthesize(m, s);
  CsvTable t{{"j", "re_z", "im_z", "abs_z"}, {}};
  for (Eigen::Index j = 0; j < s.z.size(); ++j) t.rows.push_back({double(j), s.z[j].real(), s.z[j].imag(), std::abs(s.z[j])});
  write_csv((dir / "state.csv").string(), t);
  return {{{"z", cvec_json(s.z)},
           {"eta_norm", std::sqrt(m.op.mass(s.eta))},
           {"constraint_residual", s.residual},
           {"iterations", s.iters},
           {"round_trip", std::sqrt(m.op.mass(CVec(back - u)) / m.op.mass(u))},
           {"chart_radius", chart_radius(m)}},
          {"state.csv"}};
}

StageOut stage_resonances(Context& c, const fs::path& dir) {
  const ResonanceTable& t = c.table();
  const H3Report h3 = h3_scan(t.e, t.N);
  json M = json::array(), ML = json::array(), Mk = json::array();
  for (const auto& p : t.M) M.push_back(p.str());
  for (const auto& l : t.ML) {
    json a = json::array();
    for (const auto& p : l) a.push_back(p.str());
    ML.push_back(a);
  }
  for (const auto& k : t.Mk) Mk.push_back(k.size());
  json M0 = json::array();
  for (const auto& m : t.M0) M0.push_back(m.str());
  const json full = {{"N", t.N}, {"tau", t.tau},     {"cutoff", t.cutoff}, {"Mk_sizes", Mk},
                     {"M0", M0}, {"M", M},           {"Lambda", t.Lambda}, {"ML", ML},
                     {"h3_min", h3.min_value},       {"warnings", t.warnings}};
  write_json(dir / "table.json", full);
  return {{{"N", t.N},
           {"tau", t.tau},
           {"h3_min", h3.min_value},
           {"M_size", t.M.size()},
           {"Lambda", t.Lambda},
           {"warnings", t.warnings}},
          {"table.json"}};
}

StageOut stage_expansion(Context& c, const fs::path& dir) {
  const EffectiveHamiltonian& H = c.effective();
  json ch = json::array();
  int radiating = 0;
  for (const auto& k : H.channels) {
    ch.push_back({{"mono", k.mono.str()}, {"L", k.L}, {"norm", k.norm}, {"source", k.source}});
    radiating += k.norm > 0;
  }
  const GeneratingFunction chi = solve_homological(c.expansion(), c.table(), 1);
  double min_div = INFINITY;
  for (const auto& g : chi.vector) min_div = std::min(min_div, std::abs(g.L));
  const json a = [&] {
    json rows = json::array();
    for (Eigen::Index i = 0; i < H.a.rows(); ++i) rows.push_back(vec_json(H.a.row(i).transpose()));
    return rows;
  }();
  write_json(dir / "channels.json", {{"channels", ch}, {"a", a}});
  return {{{"channels", ch.size()},
           {"radiating", radiating},
           {"a", a},
           {"generators", chi.vector.size()},
           {"homological_residual", homological_residual(c.expansion(), chi)},
           {"min_divisor", chi.vector.empty() ? json(nullptr) : json(min_div)}},
          {"channels.json"}};
}

StageOut stage_fgr(Context& c, const fs::path& dir) {
  const FgrTable& F = c.fgr();
  const int n = c.model().modes();
  json lv = json::array();
  for (const auto& l : F.levels)
    lv.push_back({{"L", l.L}, {"channels", l.monos.size()}, {"gram_eigenvalues", vec_json(l.gram_eigenvalues)}});
  json out = {{"Lambda", json::array()}, {"levels", lv}, {"backend", to_string(F.backend.kind)}};
  for (const auto& l : F.levels) out["Lambda"].push_back(l.L);
  bool holds = true;
  if (F.levels.empty()) {
    out["h4"] = "vacuous";
  } else {
    const int per = std::max(1, c.cfg().h4_samples / 3);
    const auto h4 = check_h4(F, sphere_samples(n, {0.1, 0.5, 1.0}, per, static_cast<unsigned>(c.cfg().seed)));
    out["h4"] = {{"c_low", h4.c_low}, {"c_high", h4.c_high}, {"samples", h4.samples}, {"holds", h4.holds}};
    holds = h4.holds;
  }
  write_json(dir / "fgr.json", out);
  if (!holds) fail(ErrorKind::fgr_degenerate, "the FGR form vanishes on part of the sampled sphere");
  return {out, {"fgr.json"}};
}

bool radiating(Context& c) {
  for (const auto& k : c.effective().channels)
    if (k.norm > 0) return true;
  return false;
}

StageOut stage_simulate(Context& c, const fs::path& dir) {
  const auto& s = c.cfg().simulate;
  PdeOptions o;
  o.dt = s.dt;
  o.sample_every = s.sample_every;
  o.absorber = s.absorber;
  const ReducedModel* rm = radiating(c) ? &c.reduced() : nullptr;
  const auto rec = integrate_pde(c.model(), c.initial_state(), s.T, o, rm);
  write_csv((dir / "trajectory.csv").string(), trajectory_csv(rec));
  const Verdict v = selection_verdict(rec);
  write_json(dir / "verdict.json", verdict_json(v));
  return {{{"verdict", v.kind},
           {"j0", v.j0},
           {"rho_plus", v.rho_plus},
           {"decay_rate", v.decay_rate},
           {"mass_drift", rec.max_mass_drift()},
           {"energy_drift", rec.max_energy_drift()},
           {"truncated", rec.truncated},
           {"note", rec.note}},
          {"trajectory.csv", "verdict.json"}};
}

StageOut stage_reduced(Context& c, const fs::path& dir) {
  const auto& r = c.cfg().reduced;
  const auto rec = integrate_reduced(c.reduced(), c.z0(), r.T, r.dt, r.sample_every);
  write_csv((dir / "trajectory.csv").string(), trajectory_csv(rec));
  const Verdict v = selection_verdict(rec);
  write_json(dir / "verdict.json", verdict_json(v));
  const auto ly = lyapunov_series(rec, c.fgr());
  return {{{"verdict", v.kind},
           {"j0", v.j0},
           {"rho_plus", v.rho_plus},
           {"decay_rate", v.decay_rate},
           {"lyapunov", {{"delta_V", ly.delta_V}, {"dissipation", ly.dissipation}, {"closure", ly.closure}}}},
          {"trajectory.csv", "verdict.json"}};
}

StageOut stage_instability(Context& c, const fs::path& dir) {
  const auto& s = c.cfg().stability;
  if (s.j >= c.model().modes()) fail(ErrorKind::config, "stability.j exceeds the number of bound states");
  const auto rep = instability_certificate(c.model(), s.j, s.r, s.eps);
  CsvTable t{{"eps", "beta", "gap", "mass_defect"}, {}};
  for (size_t i = 0; i < rep.eps.size(); ++i) t.rows.push_back({rep.eps[i], rep.beta[i], rep.gap[i], rep.mass_defect[i]});
  write_csv((dir / "curve.csv").string(), t);
  const json out = {{"j", rep.j},         {"r", rep.r},           {"g1", rep.g1},
                    {"g2", rep.g2},       {"slope", rep.slope},   {"target", rep.target},
                    {"slope_error", rep.slope_error()},           {"negative", rep.negative}};
  write_json(dir / "certificate.json", out);
  if (!rep.negative) fail(ErrorKind::invariant, "energy gap along the test curve is not negative");
  return {out, {"curve.csv", "certificate.json"}};
}

StageOut stage_positivity(Context& c, const fs::path&) {
  const auto p = ground_positivity(c.model(), c.cfg().stability.rho);
  return {{{"rho", p.rho},
           {"E", p.E},
           {"lminus", {p.lminus0, p.lminus1}},
           {"lplus0", p.lplus0},
           {"kernel_residual", p.kernel_residual},
           {"overlap", p.overlap},
           {"stable", p.stable}},
          {}};
}

struct StageDef {
  StageFn fn;
  std::vector<std::string> sections;
};

const std::map<std::string, StageDef>& stage_table() {
  static const std::vector<std::string> base{"potential", "grid", "eigen"};
  auto with = [](std::vector<std::string> a, std::initializer_list<const char*> more) {
    for (const char* s : more) a.push_back(s);
    return a;
  };
  static const std::map<std::string, StageDef> t{
      {"spectrum", {stage_spectrum, base}},
      {"bound_states", {stage_bound_states, with(base, {"branch"})}},
      {"decompose", {stage_decompose, with(base, {"branch", "simulate", "seed"})}},
      {"resonances", {stage_resonances, with(base, {"resonance"})}},
      {"expansion", {stage_expansion, with(base, {"branch", "resonance", "expansion"})}},
      {"fgr", {stage_fgr, with(base, {"branch", "resonance", "expansion", "fgr", "seed"})}},
      {"simulate", {stage_simulate, with(base, {"branch", "resonance", "expansion", "fgr", "reduced", "simulate", "seed"})}},
      {"reduced", {stage_reduced, with(base, {"branch", "resonance", "expansion", "fgr", "reduced", "simulate"})}},
      {"instability", {stage_instability, with(base, {"branch", "stability"})}},
      {"positivity", {stage_positivity, with(base, {"branch", "stability"})}},
  };
  return t;
}

// Strips the "<kind> error: " prefix that Error adds.
std::string bare_message(const Error& e) {
  const std::string w = e.what(), p = std::string(to_string(e.kind())) + " error: ";
  return w.rfind(p, 0) == 0 ? w.substr(p.size()) : w;
}

}  // namespace

RunManifest run_scenario(const ScenarioConfig& cfg, const RunOptions& opt) {
  cfg.validate();
  const fs::path out(cfg.output);
  const std::string cache = resolve_cache_dir(cfg, opt);
  fs::create_directories(out);
  if (opt.use_cache) fs::create_directories(cache);

  RunManifest man;
  man.config_hash = cfg.hash();
  man.config = cfg.to_json();
  man.created = utc_now();
  Context ctx(cfg, cache, opt.use_cache);

  for (const auto& name : all_stages()) {
    if (std::find(cfg.stages.begin(), cfg.stages.end(), name) == cfg.stages.end()) continue;
    const StageDef& def = stage_table().at(name);
    StageRecord rec;
    rec.name = name;
    rec.key = hex64(fnv1a(std::string(kToolVersion) + "/" + name + "/" + cfg.section_hash(def.sections)));
    const fs::path dir = out / name;
    const fs::path hit = fs::path(cache) / (name + "-" + rec.key);
    const auto t0 = std::chrono::steady_clock::now();
    try {
      fs::create_directories(dir);
      if (opt.use_cache && fs::exists(hit / "summary.json")) {
        std::ifstream in(hit / "summary.json");
        const json saved = json::parse(in);
        rec.summary = saved.at("summary");
        for (const auto& f : saved.at("files")) {
          const std::string fn = f.get<std::string>();
          fs::copy_file(hit / fn, dir / fn, fs::copy_options::overwrite_existing);
          rec.artifacts.push_back(name + "/" + fn);
        }
        rec.cache_hit = true;
      } else {
        StageOut so = def.fn(ctx, dir);
        rec.summary = std::move(so.summary);
        for (const auto& f : so.files) rec.artifacts.push_back(name + "/" + f);
        if (opt.use_cache) {
          // Stage into a temporary directory, then rename, so a crash never leaves a half entry.
          const fs::path tmp = fs::path(cache) / (name + "-" + rec.key + ".tmp");
          fs::remove_all(tmp);
          fs::create_directories(tmp);
          for (const auto& f : so.files) fs::copy_file(dir / f, tmp / f);
          write_json(tmp / "summary.json", {{"summary", rec.summary}, {"files", so.files}});
          fs::remove_all(hit);
          fs::rename(tmp, hit);
        }
      }
      write_json(dir / "summary.json", rec.summary);
    } catch (const std::exception& ex) {
      const Error* e = dynamic_cast<const Error*>(&ex);
      const ErrorKind kind = e ? e->kind() : ErrorKind::io;
      const std::string msg = e ? bare_message(*e) : ex.what();
      man.status = "failed";
      man.failed_stage = name;
      man.error_kind = to_string(kind);
      man.error = msg;
      write_json(out / "manifest.json", man.to_json());
      throw Error(kind, "stage " + name + ": " + msg);
    }
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    man.stages.push_back(std::move(rec));
  }
  write_json(out / "manifest.json", man.to_json());
  return man;
}

}  // namespace nls
