// fracsol command-line driver.

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fracsol/fracsol.hpp"

using namespace fracsol;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct RunConfig {
  std::string command;
  // model
  std::string family = "fkdv";
  std::string symbol = "pure_power";
  double alpha = 0.75;
  double beta = 0.0;
  int p = 1;
  std::string bbm_form = "paper";
  double c = 1.0;
  double c_new = 2.0;
  double q = 0.0;
  double delta = 0.01;
  int epsilon = -1;
  // grids
  std::size_t n = 4096;
  double L = 200.0;
  std::size_t nx = 512, ny = 512;
  double Lx = 24.0, Ly = 24.0;
  // solver
  double tol = 1e-10;
  int max_iter = 2000;
  double gamma = 0.0;
  double step = 0.0;
  double identity_tol = 1e-6;
  bool dealias_profile = false;
  // evolution
  double T = 20.0;
  double dt = 0.0;
  int record_every = 100;
  bool dealias = true;
  std::uint64_t seed = 0;
  std::string perturb = "gaussian";
  double K = 5.0;
  double drift_tol = 1e-6;
  std::string init = "soliton";
  // verification
  std::vector<double> thetas{2.0};
  std::vector<double> rs{4, 8, 16, 32};
  std::string cutoff = "inner";
  std::vector<double> alphas{0.5, 0.8, 1.0, 4.0 / 3.0, 1.9};
  std::vector<double> cs{0.5, 1.0, 2.0};
  // io
  std::string out;
  std::string profile;
  std::string report;
  std::string config;
  // sweep
  std::string sweep_command;
  std::vector<std::string> params;
  std::string out_dir = "sweep";
  int jobs = 1;
};

json to_json(const RunConfig& r) {
  return {{"command", r.command}, {"family", r.family}, {"symbol", r.symbol}, {"alpha", r.alpha},
          {"beta", r.beta}, {"p", r.p}, {"bbm_form", r.bbm_form}, {"c", r.c}, {"c_new", r.c_new},
          {"q", r.q}, {"delta", r.delta}, {"epsilon", r.epsilon}, {"n", r.n}, {"L", r.L},
          {"nx", r.nx}, {"ny", r.ny}, {"Lx", r.Lx}, {"Ly", r.Ly}, {"tol", r.tol},
          {"max_iter", r.max_iter}, {"gamma", r.gamma}, {"step", r.step},
          {"identity_tol", r.identity_tol}, {"dealias_profile", r.dealias_profile}, {"T", r.T},
          {"dt", r.dt}, {"record_every", r.record_every}, {"dealias", r.dealias}, {"seed", r.seed},
          {"perturb", r.perturb}, {"K", r.K}, {"drift_tol", r.drift_tol}, {"init", r.init},
          {"thetas", r.thetas}, {"rs", r.rs}, {"cutoff", r.cutoff}, {"alphas", r.alphas},
          {"cs", r.cs}, {"out", r.out}, {"profile", r.profile},
          {"sweep_command", r.sweep_command}, {"params", r.params}, {"out_dir", r.out_dir},
          {"jobs", r.jobs}};
}

// Exit codes.
constexpr int kOk = 0, kCheckFailed = 1, kUsage = 2;
constexpr double kBltBound = 1.0;

DispersionSymbol make_symbol(const RunConfig& r) {
  if (r.symbol == "pure_power") return DispersionSymbol::pure_power(r.alpha);
  if (r.symbol == "whitham") return DispersionSymbol::whitham();
  if (r.symbol == "whitham_tension") return DispersionSymbol::whitham_tension(r.beta);
  throw InvalidArgument("--symbol: unknown symbol '" + r.symbol + "'");
}

ModelSpec make_model(const RunConfig& r) {
  ModelSpec m{parse_family(r.family), make_symbol(r), r.p, parse_bbm_form(r.bbm_form)};
  m.validate();
  return m;
}

PetviashviliOptions solver_options(const RunConfig& r, bool dealias) {
  PetviashviliOptions o;
  o.tol = r.tol;
  o.max_iter = r.max_iter;
  if (r.gamma > 0.0) o.gamma = r.gamma;
  o.dealias = dealias;
  return o;
}

std::vector<std::string> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("--config: cannot open '" + path + "'");
  std::vector<std::string> args;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw InvalidArgument("--config: line " + std::to_string(lineno) + ": expected 'key = value'");
    std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    std::replace(key.begin(), key.end(), '_', '-');
    args.push_back("--" + key + "=" + value);
  }
  return args;
}

void emit(const RunConfig& cfg, json report, std::ostream& out) {
  report["config"] = to_json(cfg);
  const std::string text = report.dump(2) + "\n";
  if (cfg.report.empty())
    out << text;
  else
    io::write_text(cfg.report, text);
}

// ---- commands --------------------------------------------------------------

int cmd_ground_state(const RunConfig& cfg, std::ostream& out) {
  const ModelSpec model = make_model(cfg);
  Grid1D g(cfg.n, cfg.L);
  SolitaryWave w = petviashvili(model, cfg.c, g, solver_options(cfg, cfg.dealias_profile));
  json rep = {{"command", "ground-state"}, {"wave", io::wave_metadata(w)}};
  rep["warnings"] = model.warnings();
  bool ok = true;
  const bool quadratic = model.p == 1 && model.symbol.is_pure_power() &&
                         !(model.family == Family::FBBM && model.bbm_form == BbmForm::Derived);
  if (quadratic && cfg.alpha > 1.0 / 3.0) {
    auto rs = identity_suite(w, cfg.alpha, cfg.c, cfg.identity_tol);
    rep["identities"] = rs;
    ok = all_pass(rs);
  }
  const double sup = w.profile.sup_norm();
  rep["evenness_defect"] = evenness_defect(w.profile) / sup;
  rep["min_over_sup"] = w.profile.min() / sup;
  if (!cfg.out.empty()) io::save_profile(w.profile, io::wave_metadata(w), cfg.out);
  rep["pass"] = ok;
  emit(cfg, rep, out);
  return ok ? kOk : kCheckFailed;
}

SolitaryWave wave_from_file(const RunConfig& cfg, const ModelSpec& fallback, double c) {
  io::LoadedProfile lp = io::load_profile(cfg.profile);
  ModelSpec model = fallback;
  bool dealiased = false;
  if (!lp.meta.is_null()) {
    if (lp.meta.contains("family")) model.family = parse_family(lp.meta["family"].get<std::string>());
    if (lp.meta.contains("bbm_form")) model.bbm_form = parse_bbm_form(lp.meta["bbm_form"].get<std::string>());
    if (lp.meta.contains("p")) model.p = lp.meta["p"].get<int>();
    if (lp.meta.contains("alpha") && model.symbol.is_pure_power()) {
      const double a = lp.meta["alpha"].get<double>();
      if (std::abs(a - cfg.alpha) > 1e-14)
        throw InvalidArgument("--alpha: " + std::to_string(cfg.alpha) + " does not match the profile's alpha " + std::to_string(a));
    }
    if (lp.meta.contains("dealiased")) dealiased = lp.meta["dealiased"].get<bool>();
  }
  SolitaryWave w{lp.field, c, model, 0.0, 0.0, 0, dealiased};
  assign_residuals(w);
  return w;
}

int cmd_rescale(const RunConfig& cfg, std::ostream& out) {
  require(!cfg.profile.empty(), "--profile: required");
  SolitaryWave w = wave_from_file(cfg, make_model(cfg), 1.0);
  RescaleResult r = rescale_solitary(w, cfg.c_new, cfg.alpha);
  const bool ok = r.wave.residual_sup <= 10.0 * w.residual_sup + r.resampling_bound;
  if (!cfg.out.empty()) io::save_profile(r.wave.profile, io::wave_metadata(r.wave), cfg.out);
  json rep = {{"command", "rescale"}, {"input_residual_sup", w.residual_sup}, {"wave", io::wave_metadata(r.wave)},
              {"resampling_bound", r.resampling_bound},
              {"mass_ratio", mass(r.wave.profile) / mass(w.profile)},
              {"mass_ratio_expected", std::pow(cfg.c_new, (2 * cfg.alpha - 1) / cfg.alpha)}, {"pass", ok}};
  emit(cfg, rep, out);
  return ok ? kOk : kCheckFailed;
}

int cmd_verify(const RunConfig& cfg, std::ostream& out) {
  require(!cfg.profile.empty(), "--profile: required");
  const ModelSpec fallback = make_model(cfg);
  SolitaryWave w = wave_from_file(cfg, fallback, cfg.c);
  const Grid1D& g = w.profile.grid();
  json rep = {{"command", "verify"}, {"residual_sup", w.residual_sup}};
  bool ok = w.residual_sup < 1e-6;
  if (!ok) {
    rep["error"] = "profile residual_sup >= 1e-6 at the given c";
    rep["pass"] = false;
    emit(cfg, rep, out);
    return kCheckFailed;
  }
  auto ids = identity_suite(w, cfg.alpha, cfg.c, cfg.identity_tol);
  rep["identities"] = ids;
  ok = all_pass(ids);

  // Gaussian test function on a box large enough for the x-weight.
  Grid1D pg(4096, 40.0);
  RealField gauss = RealField::from_function(pg, [](double x) { return std::exp(-x * x); });
  IdentityReport poh = pohozaev_functional_check(gauss, cfg.alpha);
  rep["pohozaev_functional"] = poh;
  ok = ok && poh.pass;

  // Weinstein constancy over independent solves at c/2 and 2c on the same grid.
  std::vector<RealField> family;
  json jw = json::array();
  const double J0 = weinstein(w.profile, cfg.alpha);
  double lo = J0, hi = J0;
  for (double f : {0.5, 2.0}) {
    SolitaryWave s = petviashvili(w.model, f * cfg.c, g, solver_options(cfg, w.dealiased));
    const double J = weinstein(s.profile, cfg.alpha);
    lo = std::min(lo, J);
    hi = std::max(hi, J);
    jw.push_back({{"c", f * cfg.c}, {"weinstein", J}});
    family.push_back(s.profile);
  }
  const double spread = (hi - lo) / J0;
  rep["weinstein"] = {{"value", J0}, {"others", jw}, {"relative_spread", spread}, {"tolerance", cfg.identity_tol},
                      {"pass", spread < cfg.identity_tol}};
  ok = ok && spread < cfg.identity_tol;

  std::vector<RealField> battery = gn_battery(g, cfg.seed);
  battery.insert(battery.end(), family.begin(), family.end());
  GnScanResult gs = gn_scan(w, cfg.alpha, battery);
  rep["gn_scan"] = gs;
  ok = ok && gs.pass;
  rep["pass"] = ok;
  emit(cfg, rep, out);
  return ok ? kOk : kCheckFailed;
}

int cmd_evolve(const RunConfig& cfg, std::ostream& out) {
  const ModelSpec model = make_model(cfg);
  Grid1D g(cfg.n, cfg.L);
  std::optional<SolitaryWave> Q;
  RealField u0 = RealField::zeros(g);
  if (cfg.init == "soliton") {
    Q = petviashvili(model, cfg.c, g, solver_options(cfg, cfg.dealias));
    u0 = Q->profile;
  } else if (cfg.init == "gaussian") {
    u0 = RealField::from_function(g, [&](double x) { return cfg.c * std::exp(-x * x); });
  } else if (cfg.init == "profile") {
    require(!cfg.profile.empty(), "--profile: required with --init profile");
    SolitaryWave w = wave_from_file(cfg, model, cfg.c);
    require(w.profile.grid() == g, "--n/--L: grid does not match the loaded profile");
    u0 = w.profile;
    Q = w;
  } else {
    throw InvalidArgument("--init: expected soliton, gaussian or profile");
  }
  EvolutionOptions eo;
  eo.dealias = cfg.dealias;
  eo.record_every = cfg.record_every;
  eo.track_orbit = Q;
  const double dt = cfg.dt > 0.0 ? cfg.dt : default_dt(model, u0, cfg.dealias);
  EvolutionTrace tr = evolve(model, u0, cfg.T, dt, eo);
  if (!cfg.out.empty()) io::save_trace(tr, cfg.out);
  const double drift = std::max(relative_drift(tr.series_a), relative_drift(tr.series_b));
  const bool ok = !tr.blew_up && tr.cfl_ok && drift < cfg.drift_tol;
  json rep = {{"command", "evolve"}, {"dt", tr.dt}, {"steps", tr.steps}, {"cfl", tr.cfl}, {"cfl_ok", tr.cfl_ok},
              {"blew_up", tr.blew_up}, {"drift_a", relative_drift(tr.series_a)},
              {"drift_b", relative_drift(tr.series_b)}, {"final_time", tr.times.back()}, {"pass", ok}};
  if (!tr.orbital_distance.empty())
    rep["max_orbital_distance"] = *std::max_element(tr.orbital_distance.begin(), tr.orbital_distance.end());
  emit(cfg, rep, out);
  return ok ? kOk : kCheckFailed;
}

int cmd_stability(const RunConfig& cfg, std::ostream& out) {
  const ModelSpec model = make_model(cfg);
  Grid1D g(cfg.n, cfg.L);
  StabilityOptions so;
  so.K = cfg.K;
  so.seed = cfg.seed;
  so.record_every = cfg.record_every;
  so.solver = solver_options(cfg, true);
  so.drift_tol = cfg.drift_tol;
  std::optional<double> dt;
  if (cfg.dt > 0.0) dt = cfg.dt;
  StabilityReport r = stability_experiment(model, cfg.c, cfg.delta, parse_perturbation(cfg.perturb), cfg.T, dt, g, so);
  json rep = {{"command", "stability"}, {"report", r}, {"pass", r.verdict != "growing"}};
  if (!cfg.out.empty()) {
    std::string s = "t,orbital_distance\n";
    for (std::size_t i = 0; i < r.times.size(); ++i) s += io::fmt17(r.times[i]) + "," + io::fmt17(r.distances[i]) + "\n";
    io::write_text(cfg.out, s);
  }
  emit(cfg, rep, out);
  return r.verdict != "growing" ? kOk : kCheckFailed;
}

int cmd_minimize_iq(const RunConfig& cfg, std::ostream& out) {
  Grid1D g(cfg.n, cfg.L);
  const ModelSpec model = ModelSpec::fkdv(cfg.alpha);
  SolitaryWave Q1 = petviashvili(model, 1.0, g, solver_options(cfg, false));
  const double q = cfg.q > 0.0 ? cfg.q : mass(Q1.profile);
  const double cs = cstar(q, l2_squared(Q1.profile), cfg.alpha);
  MinimizerOptions mo;
  if (cfg.step > 0.0) mo.step = cfg.step;
  mo.tol = cfg.tol;
  mo.max_iter = std::max(cfg.max_iter, 20000);
  mo.c_guess = cs;
  MinimizerResult m = minimize_iq(q, cfg.alpha, g, mo);
  const double E_formula = ground_state_energy(q, cs, cfg.alpha);
  RescaleResult rq = rescale_solitary(Q1, cs, cfg.alpha);
  const OrbitalDistance od = orbital_distance(m.profile, rq.wave.profile, cfg.alpha);
  const double rel_dist = od.distance / energy_norm(rq.wave.profile, cfg.alpha);
  const bool ok = m.converged && m.I_q < 0.0;
  if (!cfg.out.empty()) io::save_profile(m.profile, json{{"q", q}, {"alpha", cfg.alpha}, {"theta", m.theta}}, cfg.out);
  json rep = {{"command", "minimize-iq"}, {"q", q}, {"I_q", m.I_q}, {"theta", m.theta}, {"iterations", m.iterations},
              {"converged", m.converged}, {"gradient_norm", m.gradient_norm}, {"c_star", cs},
              {"E_formula", E_formula}, {"I_q_relative_error", std::abs(m.I_q - E_formula) / std::abs(E_formula)},
              {"theta_relative_error", std::abs(m.theta - cs) / cs}, {"relative_profile_distance", rel_dist},
              {"pass", ok}};
  emit(cfg, rep, out);
  return ok ? kOk : kCheckFailed;
}

int cmd_iq_scaling(const RunConfig& cfg, std::ostream& out) {
  Grid1D g(cfg.n, cfg.L);
  double q = cfg.q;
  if (!(q > 0.0)) q = mass(petviashvili(ModelSpec::fkdv(cfg.alpha), 1.0, g, solver_options(cfg, false)).profile);
  MinimizerOptions mo;
  if (cfg.step > 0.0) mo.step = cfg.step;
  mo.max_iter = std::max(cfg.max_iter, 20000);
  IqScalingResult r = iq_scaling_check(cfg.alpha, q, cfg.thetas, g, mo);
  const bool ok = all_pass(r.reports);
  emit(cfg, json{{"command", "iq-scaling"}, {"result", r}, {"pass", ok}}, out);
  return ok ? kOk : kCheckFailed;
}

int cmd_commutator(const RunConfig& cfg, std::ostream& out) {
  Grid1D g(cfg.n, cfg.L);
  RealField v = RealField::from_function(g, [](double x) { return std::exp(-x * x); });
  require(cfg.cutoff == "inner" || cfg.cutoff == "outer", "--cutoff: expected inner or outer");
  CommutatorResult r = commutator_decay(cfg.alpha, v, cfg.rs, cfg.cutoff == "inner" ? CutoffKind::Inner : CutoffKind::Outer);
  const bool ok = !r.degenerate && std::abs(r.slope - r.target_slope) <= 0.15;
  if (!cfg.out.empty()) {
    std::string s = "r,norm,cutoff_l4\n";
    for (std::size_t i = 0; i < r.r.size(); ++i)
      s += io::fmt17(r.r[i]) + "," + io::fmt17(r.norms[i]) + "," + io::fmt17(r.cutoff_l4[i]) + "\n";
    io::write_text(cfg.out, s);
  }
  emit(cfg, json{{"command", "commutator"}, {"result", r}, {"pass", ok}}, out);
  return ok ? kOk : kCheckFailed;
}

int cmd_kp_check(const RunConfig& cfg, std::ostream& out) {
  bool ok = true;
  json chain = json::array();
  for (double a : cfg.alphas)
    for (double c : cfg.cs)
      for (int e : {-1, 1}) {
        KPConsistency k = kp_identity_consistency(a, c, e);
        ok = ok && k.max_residual <= 1e-12;
        chain.push_back(k);
      }
  const KPConsistency edge = kp_identity_consistency(0.8, 1.0, -1);
  const bool boundary = edge.integrals.a == 0.0;
  const bool defocusing = kp_identity_consistency(cfg.alpha, 1.0, 1).trivial_only;

  Grid2D g(cfg.nx, cfg.ny, cfg.Lx, cfg.Ly);
  require(cfg.alpha > 0.8 && cfg.alpha <= 1.0, "--alpha: blt battery needs alpha in (4/5, 1]");
  auto base = [](double x, double y) { return -2.0 * x * std::exp(-x * x - y * y); };
  RealField2D f = RealField2D::from_function(g, base);
  const BltRatio r0 = blt_ratio(f, cfg.alpha);
  const double amp = std::abs(blt_ratio(f.scaled(7.0), cfg.alpha).ratio - r0.ratio) / r0.ratio;
  json family = json::array();
  double rmax = 0.0;
  for (int i = 0; i <= 8; ++i) {
    const double lam = std::pow(2.0, -1.0 + 0.25 * i);
    RealField2D fl = kp_scaled_field(g, base, lam, cfg.alpha);
    const BltRatio r = blt_ratio(fl, cfg.alpha);
    rmax = std::max(rmax, r.ratio);
    family.push_back({{"lambda", lam}, {"ratio", r.ratio}});
  }
  // No explicit constant is available; the family must stay below 1.
  const bool bounded = std::isfinite(rmax) && rmax <= kBltBound;
  ok = ok && boundary && defocusing && amp <= 1e-12 && bounded;
  if (!cfg.out.empty()) io::save_field_2d(f, cfg.out);
  json rep = {{"command", "kp-check"}, {"chain", chain}, {"a_at_four_fifths", edge.integrals.a},
              {"defocusing_trivial", defocusing}, {"blt", r0}, {"amplitude_invariance", amp},
              {"dilation_family", family}, {"max_ratio", rmax}, {"ratio_bound", kBltBound}, {"pass", ok}};
  emit(cfg, rep, out);
  return ok ? kOk : kCheckFailed;
}

int run(std::vector<std::string> args, std::ostream& out);

int cmd_sweep(const RunConfig& cfg, std::ostream& out) {
  require(!cfg.sweep_command.empty() && cfg.sweep_command != "sweep", "--sweep-command: name a non-sweep command");
  require(cfg.jobs >= 1, "--jobs: must be at least 1");
  // Cartesian product of --param key=v1,v2,...
  std::vector<std::pair<std::string, std::vector<std::string>>> axes;
  for (const auto& p : cfg.params) {
    const auto eq = p.find('=');
    require(eq != std::string::npos && eq > 0, "--param: expected key=v1,v2,...");
    std::vector<std::string> vals;
    std::stringstream ss(p.substr(eq + 1));
    for (std::string v; std::getline(ss, v, ';');) vals.push_back(v);
    require(!vals.empty(), "--param: empty value list for " + p.substr(0, eq));
    axes.emplace_back(p.substr(0, eq), vals);
  }
  std::vector<std::vector<std::pair<std::string, std::string>>> points{{}};
  for (const auto& [key, vals] : axes) {
    std::vector<std::vector<std::pair<std::string, std::string>>> next;
    for (const auto& pt : points)
      for (const auto& v : vals) {
        auto q = pt;
        q.emplace_back(key, v);
        next.push_back(q);
      }
    points = std::move(next);
  }
  fs::create_directories(cfg.out_dir);
  std::vector<int> codes(points.size(), 0);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < points.size(); i = next++) {
      const std::string stem = (fs::path(cfg.out_dir) / ("point_" + std::to_string(i))).string();
      std::vector<std::string> a{"fracsol", cfg.sweep_command};
      if (!cfg.config.empty()) a.push_back("--config=" + cfg.config);
      for (const auto& [k, v] : points[i]) a.push_back("--" + k + "=" + v);
      a.push_back("--report=" + stem + ".json");
      if (cfg.sweep_command == "ground-state" || cfg.sweep_command == "evolve" || cfg.sweep_command == "stability")
        a.push_back("--out=" + stem + ".csv");
      std::ostringstream sink;
      codes[i] = run(a, sink);
      if (codes[i] != kOk && !sink.str().empty()) io::write_text(stem + ".json", sink.str());
    }
  };
  std::vector<std::thread> pool;
  const int nthreads = std::min<int>(cfg.jobs, static_cast<int>(points.size()));
  for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  json idx = json::array();
  bool ok = true;
  for (std::size_t i = 0; i < points.size(); ++i) {
    json p = json::object();
    for (const auto& [k, v] : points[i]) p[k] = v;
    idx.push_back({{"index", i}, {"params", p}, {"exit_code", codes[i]},
                   {"report", (fs::path(cfg.out_dir) / ("point_" + std::to_string(i) + ".json")).string()}});
    ok = ok && codes[i] == kOk;
  }
  json rep = {{"command", "sweep"}, {"points", idx}, {"pass", ok}};
  io::write_text(fs::path(cfg.out_dir) / "index.json", rep.dump(2) + "\n");
  emit(cfg, rep, out);
  return ok ? kOk : kCheckFailed;
}

// ---- argument handling -----------------------------------------------------

const CLI::Validator kPowerOfTwo = CLI::Validator(
    [](const std::string& s) {
      try {
        const auto v = std::stoull(s);
        return (is_power_of_two(v) && v >= 8) ? std::string() : std::string("must be a power of two >= 8");
      } catch (...) {
        return std::string("must be an integer");
      }
    },
    "POW2");

void add_model(CLI::App* s, RunConfig& r) {
  s->add_option("--family", r.family, "fkdv, fbbm or gfkdv")->check(CLI::IsMember({"fkdv", "fbbm", "gfkdv"}));
  s->add_option("--symbol", r.symbol, "pure_power, whitham or whitham_tension")
      ->check(CLI::IsMember({"pure_power", "whitham", "whitham_tension"}));
  s->add_option("--alpha", r.alpha, "dispersion exponent")->check(CLI::Range(1e-12, 2.0));
  s->add_option("--beta", r.beta, "surface tension (whitham_tension)")->check(CLI::NonNegativeNumber);
  s->add_option("--p", r.p, "nonlinearity power (gfkdv)")->check(CLI::PositiveNumber);
  s->add_option("--bbm-form", r.bbm_form, "paper or derived")->check(CLI::IsMember({"paper", "derived"}));
  s->add_option("--c", r.c, "velocity")->check(CLI::PositiveNumber);
}

void add_grid(CLI::App* s, RunConfig& r) {
  s->add_option("--n", r.n, "grid points")->check(kPowerOfTwo);
  s->add_option("--L", r.L, "half-length of the box")->check(CLI::PositiveNumber);
}

void add_solver(CLI::App* s, RunConfig& r) {
  s->add_option("--tol", r.tol, "solver tolerance")->check(CLI::PositiveNumber);
  s->add_option("--max-iter", r.max_iter, "iteration cap")->check(CLI::PositiveNumber);
  s->add_option("--gamma", r.gamma, "Petviashvili exponent (0: (p+1)/p)")->check(CLI::NonNegativeNumber);
}

void add_common(CLI::App* s, RunConfig& r) {
  s->add_option("--report", r.report, "report JSON path (default: stdout)");
  s->add_option("--config", r.config, "key = value configuration file");
  s->add_option("--seed", r.seed, "random seed");
}

int run(std::vector<std::string> args, std::ostream& out) {
  RunConfig cfg;
  CLI::App app{"fractional KdV/BBM solitary-wave laboratory", "fracsol"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);

  auto* gs = app.add_subcommand("ground-state", "solve for a solitary wave and check its identities");
  add_model(gs, cfg); add_grid(gs, cfg); add_solver(gs, cfg); add_common(gs, cfg);
  gs->add_option("--identity-tol", cfg.identity_tol)->check(CLI::PositiveNumber);
  gs->add_option("--dealias", cfg.dealias_profile, "two-thirds rule in the profile nonlinearity");
  gs->add_option("--out", cfg.out, "profile CSV path");

  auto* rs = app.add_subcommand("rescale", "rescale a c = 1 profile to another velocity");
  add_model(rs, cfg); add_common(rs, cfg);
  rs->add_option("--profile", cfg.profile)->required();
  rs->add_option("--c-new", cfg.c_new)->check(CLI::PositiveNumber);
  rs->add_option("--out", cfg.out);

  auto* vf = app.add_subcommand("verify", "identity suite, Pohozaev check, Weinstein constancy, GN scan");
  add_model(vf, cfg); add_solver(vf, cfg); add_common(vf, cfg);
  vf->add_option("--profile", cfg.profile)->required();
  vf->add_option("--identity-tol", cfg.identity_tol)->check(CLI::PositiveNumber);

  auto* ev = app.add_subcommand("evolve", "time integration with conserved-quantity trace");
  add_model(ev, cfg); add_grid(ev, cfg); add_solver(ev, cfg); add_common(ev, cfg);
  ev->add_option("--T", cfg.T)->check(CLI::PositiveNumber);
  ev->add_option("--dt", cfg.dt, "time step (0: default)")->check(CLI::NonNegativeNumber);
  ev->add_option("--record-every", cfg.record_every)->check(CLI::PositiveNumber);
  ev->add_option("--dealias", cfg.dealias);
  ev->add_option("--init", cfg.init, "soliton, gaussian or profile");
  ev->add_option("--profile", cfg.profile);
  ev->add_option("--drift-tol", cfg.drift_tol)->check(CLI::PositiveNumber);
  ev->add_option("--out", cfg.out, "trace CSV path");

  auto* st = app.add_subcommand("stability", "perturbed solitary-wave experiment");
  add_model(st, cfg); add_grid(st, cfg); add_solver(st, cfg); add_common(st, cfg);
  st->add_option("--delta", cfg.delta)->check(CLI::NonNegativeNumber);
  st->add_option("--T", cfg.T)->check(CLI::PositiveNumber);
  st->add_option("--dt", cfg.dt)->check(CLI::NonNegativeNumber);
  st->add_option("--record-every", cfg.record_every)->check(CLI::PositiveNumber);
  st->add_option("--perturb", cfg.perturb)->check(CLI::IsMember({"gaussian", "dilation", "random"}));
  st->add_option("--K", cfg.K)->check(CLI::PositiveNumber);
  st->add_option("--drift-tol", cfg.drift_tol)->check(CLI::PositiveNumber);
  st->add_option("--out", cfg.out, "distance CSV path");

  auto* mi = app.add_subcommand("minimize-iq", "constrained energy minimization at fixed mass");
  add_grid(mi, cfg); add_common(mi, cfg);
  mi->add_option("--alpha", cfg.alpha)->check(CLI::Range(0.5, 1.0));
  mi->add_option("--q", cfg.q, "mass (0: mass of the c = 1 ground state)")->check(CLI::NonNegativeNumber);
  mi->add_option("--step", cfg.step)->check(CLI::NonNegativeNumber);
  mi->add_option("--tol", cfg.tol)->check(CLI::PositiveNumber);
  mi->add_option("--max-iter", cfg.max_iter)->check(CLI::PositiveNumber);
  mi->add_option("--out", cfg.out);

  auto* iq = app.add_subcommand("iq-scaling", "scaling law of the minimal energy in the mass");
  add_grid(iq, cfg); add_common(iq, cfg);
  iq->add_option("--alpha", cfg.alpha)->check(CLI::Range(0.5, 1.0));
  iq->add_option("--q", cfg.q)->check(CLI::NonNegativeNumber);
  iq->add_option("--thetas", cfg.thetas)->delimiter(',');
  iq->add_option("--step", cfg.step)->check(CLI::NonNegativeNumber);
  iq->add_option("--max-iter", cfg.max_iter)->check(CLI::PositiveNumber);

  auto* cm = app.add_subcommand("commutator", "decay of the cutoff commutator");
  add_grid(cm, cfg); add_common(cm, cfg);
  cm->add_option("--alpha", cfg.alpha)->check(CLI::Range(1e-12, 2.0));
  cm->add_option("--rs", cfg.rs)->delimiter(',');
  cm->add_option("--cutoff", cfg.cutoff)->check(CLI::IsMember({"inner", "outer"}));
  cm->add_option("--out", cfg.out);

  auto* kp = app.add_subcommand("kp-check", "KP integral relations and anisotropic GN ratio");
  add_common(kp, cfg);
  kp->add_option("--alpha", cfg.alpha, "alpha for the blt battery");
  kp->add_option("--alphas", cfg.alphas)->delimiter(',');
  kp->add_option("--cs", cfg.cs)->delimiter(',');
  kp->add_option("--nx", cfg.nx)->check(kPowerOfTwo);
  kp->add_option("--ny", cfg.ny)->check(kPowerOfTwo);
  kp->add_option("--Lx", cfg.Lx)->check(CLI::PositiveNumber);
  kp->add_option("--Ly", cfg.Ly)->check(CLI::PositiveNumber);
  kp->add_option("--out", cfg.out, "2D test field CSV");

  auto* sw = app.add_subcommand("sweep", "cartesian product of parameter lists");
  add_common(sw, cfg);
  sw->add_option("--sweep-command", cfg.sweep_command)->required();
  sw->add_option("--param", cfg.params, "key=v1;v2;... (repeatable)")->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  sw->add_option("--out-dir", cfg.out_dir);
  if (const char* env = std::getenv("FRACSOL_JOBS")) {
    try { cfg.jobs = std::max(1, std::stoi(env)); } catch (...) {}
  }
  sw->add_option("--jobs", cfg.jobs)->check(CLI::PositiveNumber);

  // Config file entries go right after the command name so that flags win.
  try {
    std::string cfg_path;
    for (std::size_t i = 1; i < args.size(); ++i) {
      if (args[i].rfind("--config=", 0) == 0) cfg_path = args[i].substr(9);
      else if (args[i] == "--config" && i + 1 < args.size()) cfg_path = args[i + 1];
    }
    if (!cfg_path.empty() && args.size() >= 2) {
      auto extra = read_config(cfg_path);
      args.insert(args.begin() + 2, extra.begin(), extra.end());
    }
    std::vector<std::string> rev(args.rbegin(), args.rend() - 1);
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, out);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, std::cerr);
    return kUsage;
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }

  CLI::App* sub = app.get_subcommands().front();
  cfg.command = sub->get_name();
  try {
    if (cfg.command == "ground-state") return cmd_ground_state(cfg, out);
    if (cfg.command == "rescale") return cmd_rescale(cfg, out);
    if (cfg.command == "verify") return cmd_verify(cfg, out);
    if (cfg.command == "evolve") return cmd_evolve(cfg, out);
    if (cfg.command == "stability") return cmd_stability(cfg, out);
    if (cfg.command == "minimize-iq") return cmd_minimize_iq(cfg, out);
    if (cfg.command == "iq-scaling") return cmd_iq_scaling(cfg, out);
    if (cfg.command == "commutator") return cmd_commutator(cfg, out);
    if (cfg.command == "kp-check") return cmd_kp_check(cfg, out);
    if (cfg.command == "sweep") return cmd_sweep(cfg, out);
  } catch (const InvalidArgument& e) {
    emit(cfg, json{{"error", {{"kind", e.kind()}, {"message", e.what()}}}, {"pass", false}}, out);
    return kUsage;
  } catch (const FormatError& e) {
    emit(cfg, json{{"error", {{"kind", e.kind()}, {"message", e.what()}}}, {"pass", false}}, out);
    return kUsage;
  } catch (const Error& e) {
    emit(cfg, json{{"error", {{"kind", e.kind()}, {"message", e.what()}}}, {"pass", false}}, out);
    return kCheckFailed;
  }
  return kUsage;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return run(args, std::cout);
}
