#include "rhosolve/harness.hpp"

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <memory>
#include <numeric>
#include <sstream>

#include "rhosolve/diffusive.hpp"
#include "rhosolve/lattice.hpp"
#include "rhosolve/params.hpp"
#include "rhosolve/quasiballistic.hpp"
#include "rhosolve/transport.hpp"

namespace rhosolve {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    std::size_t c = v.find(',', pos);
    out.push_back(trim(c == std::string::npos ? v.substr(pos) : v.substr(pos, c - pos)));
    if (c == std::string::npos) break;
    pos = c + 1;
  }
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  errno = 0;
  char* end = nullptr;
  double x = std::strtod(v.c_str(), &end);
  if (end == v.c_str() || *end != '\0' || errno == ERANGE || !std::isfinite(x))
    throw ConfigError("config key '" + key + "': cannot parse '" + v + "' as a number");
  return x;
}

long long to_ll(const std::string& key, const std::string& v) {
  errno = 0;
  char* end = nullptr;
  long long x = std::strtoll(v.c_str(), &end, 10);
  if (end == v.c_str() || *end != '\0' || errno == ERANGE)
    throw ConfigError("config key '" + key + "': cannot parse '" + v + "' as an integer");
  return x;
}

int to_int(const std::string& key, const std::string& v, long long lo, long long hi) {
  long long x = to_ll(key, v);
  if (x < lo || x > hi)
    throw ConfigError("config key '" + key + "': value " + v + " outside [" +
                      std::to_string(lo) + ", " + std::to_string(hi) + "]");
  return static_cast<int>(x);
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  errno = 0;
  char* end = nullptr;
  unsigned long long x = std::strtoull(v.c_str(), &end, 10);
  if (end == v.c_str() || *end != '\0' || errno == ERANGE || v.find('-') != std::string::npos)
    throw ConfigError("config key '" + key + "': cannot parse '" + v +
                      "' as a nonnegative integer");
  return x;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError("config key '" + key + "': expected true/false, got '" + v + "'");
}

void require_positive(const std::string& key, double x) {
  if (!(x > 0.0)) throw ConfigError("config key '" + key + "': must be > 0");
}

const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> k = {
      "solver",       "label",         "L_over_ell",  "L_over_ella",
      "W_over_lambda", "L_over_W",     "ma",          "mb",
      "eta",          "richardson",    "t_min",       "t_points_low",
      "t_points_high", "n_ang",        "n_x",         "tol",
      "itmax",        "ensemble",      "bins",        "seed",
      "a_over_lambda", "nu_corr",      "threads"};
  return k;
}

void assign_key(ExperimentConfig& c, const std::string& key, const std::string& v) {
  if (key == "solver") c.solver = v;
  else if (key == "label") c.label = v;
  else if (key == "L_over_ell") c.L_over_ell = to_double(key, v);
  else if (key == "L_over_ella") c.L_over_ella = to_double(key, v);
  else if (key == "W_over_lambda") c.W_over_lambda = to_double(key, v);
  else if (key == "L_over_W") c.L_over_W = to_double(key, v);
  else if (key == "ma") c.ma = to_double(key, v);
  else if (key == "mb") c.mb = to_double(key, v);
  else if (key == "eta") c.eta = to_double(key, v);
  else if (key == "richardson") c.richardson = to_bool(key, v);
  else if (key == "t_min") c.t_min = to_double(key, v);
  else if (key == "t_points_low") c.t_points_low = to_int(key, v, 2, 100000);
  else if (key == "t_points_high") c.t_points_high = to_int(key, v, 2, 100000);
  else if (key == "n_ang") c.n_ang = to_int(key, v, 4, 100000);
  else if (key == "n_x") c.n_x = to_int(key, v, 2, 10000000);
  else if (key == "tol") c.tol = to_double(key, v);
  else if (key == "itmax") c.itmax = to_int(key, v, 0, 100000000);
  else if (key == "ensemble") c.ensemble = to_int(key, v, 1, 100000000);
  else if (key == "bins") c.bins = to_int(key, v, 4, 1000000);
  else if (key == "seed") c.seed = to_u64(key, v);
  else if (key == "a_over_lambda") c.a_over_lambda = to_double(key, v);
  else if (key == "nu_corr") c.nu_corr = to_double(key, v);
  else if (key == "threads") c.threads = to_int(key, v, 1, 4096);
  else
    throw ConfigError("unknown config key '" + key + "'");
}

std::string fmt_g(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

ConfigDoc parse_config_doc(const std::string& text) {
  ConfigDoc doc;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": expected 'key = value', got '" + line + "'");
    std::string key = trim(line.substr(0, eq));
    std::string val = trim(line.substr(eq + 1));
    if (key.empty() || key.find_first_of(" \t") != std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": bad key '" + key + "'");
    if (val.empty())
      throw ConfigError("config line " + std::to_string(lineno) + ": key '" + key +
                        "' has no value");
    for (const auto& kv : doc)
      if (kv.first == key)
        throw ConfigError("duplicate config key '" + key + "'");
    std::vector<std::string> vals = split_list(val);
    for (const auto& v : vals)
      if (v.empty())
        throw ConfigError("config key '" + key + "': empty element in list '" + val + "'");
    doc.emplace_back(key, std::move(vals));
  }
  return doc;
}

ConfigDoc load_config_doc(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config_doc(ss.str());
}

ExperimentConfig build_config(const ConfigDoc& doc) {
  ExperimentConfig c;
  bool have_solver = false, have_kl = false;
  for (const auto& [key, vals] : doc) {
    bool known = false;
    for (const auto& k : known_keys()) known = known || k == key;
    if (!known) throw ConfigError("unknown config key '" + key + "'");
    if (vals.size() != 1)
      throw ConfigError("config key '" + key +
                        "' holds a list; lists are only valid in sweeps");
    assign_key(c, key, vals[0]);
    if (key == "solver") have_solver = true;
    if (key == "L_over_ell") have_kl = true;
  }
  if (!have_solver) throw ConfigError("missing required config key 'solver'");
  if (!have_kl) throw ConfigError("missing required config key 'L_over_ell'");

  if (c.solver != "rft" && c.solver != "two_stream" && c.solver != "dmpk" &&
      c.solver != "quasiballistic" && c.solver != "microsim")
    throw ConfigError("config key 'solver': '" + c.solver +
                      "' is not one of rft|two_stream|dmpk|quasiballistic|microsim");
  require_positive("L_over_ell", c.L_over_ell);
  if (c.L_over_ella < 0.0) throw ConfigError("config key 'L_over_ella': must be >= 0");
  require_positive("W_over_lambda", c.W_over_lambda);
  require_positive("L_over_W", c.L_over_W);
  if (!(c.ma > 0.0 && c.ma <= 1.0)) throw ConfigError("config key 'ma': must lie in (0, 1]");
  if (!(c.mb > 0.0 && c.mb <= 1.0)) throw ConfigError("config key 'mb': must lie in (0, 1]");
  require_positive("eta", c.eta);
  if (!(c.t_min > 0.0 && c.t_min < 0.5))
    throw ConfigError("config key 't_min': must lie in (0, 0.5)");
  if (c.n_ang % 4 != 0)
    throw ConfigError("config key 'n_ang': must be a multiple of 4");
  require_positive("tol", c.tol);
  if (!(c.a_over_lambda > 0.0 && c.a_over_lambda <= 0.125 + 1e-12))
    throw ConfigError("config key 'a_over_lambda': must lie in (0, 1/8]");
  require_positive("nu_corr", c.nu_corr);
  if ((c.solver == "dmpk" || c.solver == "quasiballistic") && c.L_over_ella > 0.0)
    throw ConfigError("config key 'L_over_ella': the " + c.solver +
                      " closed form excludes absorption; use two_stream or rft");
  if ((c.solver == "dmpk" || c.solver == "two_stream") && (c.ma != 1.0 || c.mb != 1.0))
    throw ConfigError("config key 'ma'/'mb': " + c.solver + " assumes full apertures");
  if (c.solver == "quasiballistic" && c.mb != 1.0)
    throw ConfigError("config key 'mb': quasiballistic models input-side control only");
  if (c.label.empty()) c.label = c.solver;
  return c;
}

std::vector<ExperimentConfig> expand_sweep(const ConfigDoc& doc) {
  for (const auto& [key, vals] : doc) {
    bool known = false;
    for (const auto& k : known_keys()) known = known || k == key;
    if (!known) throw ConfigError("unknown config key '" + key + "'");
    (void)vals;
  }
  long long total = 1;
  for (const auto& kv : doc) {
    total *= static_cast<long long>(kv.second.size());
    if (total > 10000)
      throw ConfigError("sweep expands to more than 10000 points");
  }
  std::vector<ExperimentConfig> out;
  out.reserve(static_cast<std::size_t>(total));
  std::vector<std::size_t> idx(doc.size(), 0);
  int width = 3;
  for (long long t = total - 1; t >= 1000; t /= 10) ++width;
  for (long long p = 0; p < total; ++p) {
    ConfigDoc point;
    point.reserve(doc.size());
    for (std::size_t i = 0; i < doc.size(); ++i)
      point.emplace_back(doc[i].first,
                         std::vector<std::string>{doc[i].second[idx[i]]});
    ExperimentConfig c = build_config(point);
    if (total > 1) {
      char buf[24];
      std::snprintf(buf, sizeof buf, "_p%0*lld", width, p);
      c.label += buf;
    }
    out.push_back(std::move(c));
    for (std::size_t i = doc.size(); i-- > 0;) {
      if (++idx[i] < doc[i].second.size()) break;
      idx[i] = 0;
    }
  }
  return out;
}

std::string emit_config(const ExperimentConfig& c) {
  std::ostringstream o;
  o << "solver = " << c.solver << "\n";
  o << "label = " << c.label << "\n";
  o << "L_over_ell = " << fmt_g(c.L_over_ell) << "\n";
  o << "L_over_ella = " << fmt_g(c.L_over_ella) << "\n";
  o << "W_over_lambda = " << fmt_g(c.W_over_lambda) << "\n";
  o << "L_over_W = " << fmt_g(c.L_over_W) << "\n";
  o << "ma = " << fmt_g(c.ma) << "\n";
  o << "mb = " << fmt_g(c.mb) << "\n";
  o << "eta = " << fmt_g(c.eta) << "\n";
  o << "richardson = " << (c.richardson ? "true" : "false") << "\n";
  o << "t_min = " << fmt_g(c.t_min) << "\n";
  o << "t_points_low = " << c.t_points_low << "\n";
  o << "t_points_high = " << c.t_points_high << "\n";
  o << "n_ang = " << c.n_ang << "\n";
  o << "n_x = " << c.n_x << "\n";
  o << "tol = " << fmt_g(c.tol) << "\n";
  o << "itmax = " << c.itmax << "\n";
  o << "ensemble = " << c.ensemble << "\n";
  o << "bins = " << c.bins << "\n";
  o << "seed = " << c.seed << "\n";
  o << "a_over_lambda = " << fmt_g(c.a_over_lambda) << "\n";
  o << "nu_corr = " << fmt_g(c.nu_corr) << "\n";
  o << "threads = " << c.threads << "\n";
  return o.str();
}

nlohmann::json config_to_json(const ExperimentConfig& c) {
  return {{"solver", c.solver},
          {"label", c.label},
          {"L_over_ell", c.L_over_ell},
          {"L_over_ella", c.L_over_ella},
          {"W_over_lambda", c.W_over_lambda},
          {"L_over_W", c.L_over_W},
          {"ma", c.ma},
          {"mb", c.mb},
          {"eta", c.eta},
          {"richardson", c.richardson},
          {"t_min", c.t_min},
          {"t_points_low", c.t_points_low},
          {"t_points_high", c.t_points_high},
          {"n_ang", c.n_ang},
          {"n_x", c.n_x},
          {"tol", c.tol},
          {"itmax", c.itmax},
          {"ensemble", c.ensemble},
          {"bins", c.bins},
          {"seed", c.seed},
          {"a_over_lambda", c.a_over_lambda},
          {"nu_corr", c.nu_corr},
          {"threads", c.threads}};
}

namespace {

// Convergence bookkeeping across the contour solves of one run.
struct ContourStats {
  long solves = 0;
  int nonconverged = 0;
  int max_iterations = 0;
  double max_residual = 0.0;
  nlohmann::json failures = nlohmann::json::array();

  void note(cplx gamma, int iterations, double residual, bool converged,
            const std::string& diagnostic = "") {
    ++solves;
    max_iterations = std::max(max_iterations, iterations);
    if (std::isfinite(residual)) max_residual = std::max(max_residual, residual);
    if (!converged) {
      ++nonconverged;
      if (failures.size() < 20) {
        nlohmann::json f = {{"gamma_re", gamma.real()},
                            {"gamma_im", gamma.imag()},
                            {"iterations", iterations},
                            {"residual", residual}};
        if (!diagnostic.empty()) f["diagnostic"] = diagnostic;
        failures.push_back(std::move(f));
      }
    }
  }
};

constexpr cplx kNanF{std::numeric_limits<double>::quiet_NaN(),
                     std::numeric_limits<double>::quiet_NaN()};

std::function<cplx(cplx)> make_contour_functor(const ExperimentConfig& cfg,
                                               const std::shared_ptr<ContourStats>& st) {
  if (cfg.solver == "dmpk") {
    double s = spreading_parameter(cfg.L_over_ell);
    return [s, st](cplx gamma) {
      RootResult r = dmpk_contour(gamma, s);
      st->note(gamma, r.iterations, r.residual, r.converged);
      return r.converged ? r.F : kNanF;
    };
  }
  if (cfg.solver == "quasiballistic") {
    struct State {
      AngularGrid grid;
      std::vector<std::uint8_t> in_a;
    };
    auto state = std::make_shared<State>();
    state->grid = angular_quadrature(cfg.n_ang);
    state->in_a = aperture_mask(state->grid, cfg.ma);
    double kl = cfg.L_over_ell;
    return [state, kl, st](cplx gamma) {
      QbState r = qb_contour(gamma, kl, state->grid, state->in_a);
      st->note(gamma, r.iterations, r.residual, r.converged);
      return r.converged ? r.F : kNanF;
    };
  }
  // rft / two_stream: one transport setup, Qbar warm-started along the contour
  struct State {
    TransportSetup setup;
    SolveControls ctl;
    QField carry;
    bool have = false;
  };
  auto state = std::make_shared<State>();
  state->ctl.n_ang = cfg.n_ang;
  state->ctl.n_x = cfg.n_x;
  state->ctl.tol = cfg.tol;
  state->ctl.itmax = cfg.itmax > 0 ? cfg.itmax
                     : cfg.solver == "two_stream" ? 400000
                                                 : 6000;
  if (cfg.solver == "two_stream") {
    state->setup = make_two_stream(cfg.L_over_ell, cfg.L_over_ella, state->ctl);
  } else {
    PortParams ports{cfg.ma, cfg.mb};
    state->setup = make_transport(cfg.L_over_ell, cfg.L_over_ella, ports, state->ctl);
  }
  state->setup.threads = cfg.threads;
  return [state, st](cplx gamma) {
    TransportResult r = solve_transport(state->setup, gamma, state->ctl,
                                        state->have ? &state->carry : nullptr);
    st->note(gamma, r.iterations, r.residual, r.converged, r.diagnostic);
    if (!r.diagnostic.empty()) return kNanF;  // aborted point: no usable field
    state->carry = std::move(r.Qt);
    state->have = true;
    return r.F;
  };
}

std::string render_csv(const Spectrum& s) {
  std::string out = "T,rho,provenance,eta\n";
  char buf[160];
  for (std::size_t i = 0; i < s.T.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%s,%.17g\n", s.T[i], s.rho[i],
                  s.provenance.c_str(), s.eta);
    out += buf;
  }
  return out;
}

nlohmann::json spectrum_metrics(const Spectrum& s) {
  nlohmann::json m;
  m["points"] = s.T.size();
  m["mass"] = curve_mass(s);
  m["mass_above_0p9"] = mass_above(s, 0.9);
  try {
    m["mean_T"] = mean_T(s);
  } catch (const std::exception&) {
    m["mean_T"] = nullptr;
  }
  m["upper_edge_0p05"] = upper_edge(s, 0.05);
  return m;
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& cfg, const std::string& out_dir) {
  auto t0 = std::chrono::steady_clock::now();
  RunResult rr;
  rr.config = cfg;
  nlohmann::json diag = nlohmann::json::object();
  Spectrum sp;

  if (cfg.solver == "microsim") {
    LatticeModel model = make_lattice(cfg.W_over_lambda, cfg.L_over_W, cfg.L_over_ell,
                                      cfg.L_over_ella, cfg.a_over_lambda, cfg.nu_corr);
    EnsembleResult er;
    try {
      er = ensemble_spectrum(model, cfg.ensemble, cfg.bins, cfg.seed, cfg.ma, cfg.mb,
                             cfg.threads);
    } catch (const std::runtime_error& e) {
      throw SolverError(e.what());
    }
    sp = er.hist;
    diag["realizations"] = er.realizations;
    diag["skipped"] = er.skipped;
    diag["channels"] = er.channels;
    diag["mean_T_ensemble"] = er.mean_T;
    diag["lattice"] = {{"Ny", model.Ny},
                       {"Nx", model.Nx},
                       {"a", model.a},
                       {"n_prop", model.n_prop()},
                       {"alpha", model.alpha},
                       {"eps_abs", model.eps_abs}};
  } else {
    std::vector<double> grid =
        composite_t_grid(cfg.t_min, cfg.t_points_low, cfg.t_points_high);
    auto st = std::make_shared<ContourStats>();
    auto F = make_contour_functor(cfg, st);
    sp = spectrum_from_F(F, grid, cfg.eta, cfg.richardson, cfg.solver);
    // scrub aborted contour points rather than writing NaN rows
    std::size_t keep = 0, dropped = 0;
    for (std::size_t i = 0; i < sp.T.size(); ++i) {
      if (std::isfinite(sp.rho[i])) {
        sp.T[keep] = sp.T[i];
        sp.rho[keep] = sp.rho[i];
        ++keep;
      } else {
        ++dropped;
      }
    }
    sp.T.resize(keep);
    sp.rho.resize(keep);
    diag["solves"] = st->solves;
    diag["nonconverged"] = st->nonconverged;
    diag["max_iterations"] = st->max_iterations;
    diag["max_residual"] = st->max_residual;
    diag["dropped_points"] = dropped;
    if (!st->failures.empty()) diag["failures"] = st->failures;
    if (sp.T.empty()) throw SolverError("all contour points failed; no spectrum produced");
  }

  double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  nlohmann::json rep;
  rep["schema_version"] = kSchemaVersion;
  rep["generator"] = {{"name", "rhosolve"}, {"version", kVersion}};
  rep["solver"] = cfg.solver;
  rep["config"] = config_to_json(cfg);
  rep["metrics"] = spectrum_metrics(sp);
  rep["diagnostics"] = diag;
  rep["wall_time_s"] = wall;

  rr.spectrum = std::move(sp);
  if (!out_dir.empty()) {
    std::filesystem::path dir(out_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw SolverError("cannot create output directory '" + out_dir + "'");
    rr.csv_path = (dir / (cfg.label + "_spectrum.csv")).string();
    rr.report_path = (dir / (cfg.label + "_report.json")).string();
    rep["outputs"] = {{"spectrum_csv", cfg.label + "_spectrum.csv"}};
    write_spectrum_csv(rr.spectrum, rr.csv_path);
    write_text_atomic(rep.dump(2) + "\n", rr.report_path);
  }
  rr.report = std::move(rep);
  return rr;
}

nlohmann::json compare_spectra(const Spectrum& a, const Spectrum& b) {
  if (a.T.size() < 2 || b.T.size() < 2)
    throw ConfigError("comparison needs at least two points per spectrum");
  double lo = std::max(a.T.front(), b.T.front());
  double hi = std::min(a.T.back(), b.T.back());
  if (!(lo < hi))
    throw ConfigError("spectra share no common T window; comparison rejected");

  nlohmann::json out;
  out["schema_version"] = kSchemaVersion;
  out["provenance"] = {a.provenance, b.provenance};
  out["common_window"] = {lo, hi};
  out["l1"] = l1_distance(a, b);
  try {
    out["l1_normalized"] = l1_distance_normalized(a, b);
  } catch (const std::exception&) {
    out["l1_normalized"] = nullptr;
  }
  bool have_means = true;
  double mta = 0.0, mtb = 0.0;
  try {
    mta = mean_T(a);
    mtb = mean_T(b);
  } catch (const std::exception&) {
    have_means = false;
  }
  if (have_means) {
    out["mean_T"] = {mta, mtb};
    out["mean_T_diff"] = std::abs(mta - mtb);
  } else {
    out["mean_T"] = nullptr;
    out["mean_T_diff"] = nullptr;
  }
  // sup difference over the interior window (5% inset from both ends)
  double wlo = lo + 0.05 * (hi - lo), whi = hi - 0.05 * (hi - lo);
  std::vector<double> u = common_grid(a, b);
  std::vector<double> nodes{wlo, whi};
  for (double t : u)
    if (t > wlo && t < whi) nodes.push_back(t);
  std::sort(nodes.begin(), nodes.end());
  double sup = 0.0;
  for (double t : nodes)
    sup = std::max(sup, std::abs(interp_rho(a, t) - interp_rho(b, t)));
  out["interior_window"] = {wlo, whi};
  out["sup_diff_interior"] = sup;
  return out;
}

nlohmann::json calibration_report(const ExperimentConfig& cfg) {
  LatticeModel model = make_lattice(cfg.W_over_lambda, cfg.L_over_W, cfg.L_over_ell,
                                    cfg.L_over_ella, cfg.a_over_lambda, cfg.nu_corr);
  CalibrationResult r = calibrate_ell(model, cfg.ensemble, cfg.seed, cfg.threads);
  nlohmann::json out;
  out["schema_version"] = kSchemaVersion;
  out["generator"] = {{"name", "rhosolve"}, {"version", kVersion}};
  out["config"] = config_to_json(cfg);
  out["ell_target"] = r.ell_target;
  out["ell_fit"] = r.ell_fit;
  out["ratio"] = r.ell_fit / r.ell_target;
  out["relative_error"] = std::abs(r.ell_fit - r.ell_target) / r.ell_target;
  out["slope"] = r.slope;
  out["realizations"] = r.realizations;
  out["fit_window_slices"] = {r.fit_lo, r.fit_hi};
  return out;
}

Spectrum read_spectrum_csv(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open spectrum file '" + path + "'");
  std::string line;
  if (!std::getline(f, line)) throw ConfigError("empty spectrum file '" + path + "'");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "T,rho,provenance,eta")
    throw ConfigError("'" + path + "' is not a spectrum CSV (bad header)");
  Spectrum s;
  int lineno = 1;
  while (std::getline(f, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    std::vector<std::string> cells = split_list(line);
    if (cells.size() != 4)
      throw ConfigError("'" + path + "' line " + std::to_string(lineno) +
                        ": expected 4 CSV fields");
    double T = to_double("T", cells[0]);
    double rho = to_double("rho", cells[1]);
    if (s.T.empty()) {
      s.provenance = cells[2];
      s.eta = to_double("eta", cells[3]);
    }
    s.T.push_back(T);
    s.rho.push_back(rho);
  }
  if (s.T.empty()) throw ConfigError("'" + path + "' holds no spectrum rows");
  // tolerate shuffled rows: metrics assume ascending T
  std::vector<std::size_t> order(s.T.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return s.T[i] < s.T[j]; });
  Spectrum sorted;
  sorted.eta = s.eta;
  sorted.provenance = s.provenance;
  sorted.T.reserve(s.T.size());
  sorted.rho.reserve(s.T.size());
  for (std::size_t i : order) {
    sorted.T.push_back(s.T[i]);
    sorted.rho.push_back(s.rho[i]);
  }
  return sorted;
}

void write_spectrum_csv(const Spectrum& s, const std::string& path) {
  write_text_atomic(render_csv(s), path);
}

void write_text_atomic(const std::string& text, const std::string& path) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw SolverError("cannot write '" + tmp + "'");
    f << text;
    f.flush();
    if (!f.good()) throw SolverError("short write to '" + tmp + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw SolverError("cannot rename '" + tmp + "' to '" + path + "'");
}

}  // namespace rhosolve
