#pragma once
// Experiment driver: key = value configs in, deterministic CSV spectra and
// versioned JSON reports out.  One config describes one run of one solver
// (rft, two_stream, dmpk, quasiballistic, microsim); list-valued keys turn a
// config into a sweep, expanded as a cross product with one output pair per
// point.  Outputs are written atomically (tmp + rename) and are byte-identical
// for identical configs regardless of the thread budget.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "rhosolve/spectrum.hpp"

namespace rhosolve {

// Bad input: unknown/duplicate/missing keys, unparsable values, invalid
// ranges, incompatible comparisons.  CLI exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// The run itself failed (no spectrum produced).  CLI exit code 1.
struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  std::string solver;           // rft | two_stream | dmpk | quasiballistic | microsim
  double L_over_ell = 0.0;      // required, > 0
  double L_over_ella = 0.0;     // 0 = no absorption
  double W_over_lambda = 10.5;  // microLattice geometry
  double L_over_W = 1.0;
  double ma = 1.0, mb = 1.0;    // aperture half-widths, (0, 1]
  double eta = 1e-3;            // contour offset
  bool richardson = true;       // eta -> 0 extrapolation
  double t_min = 1e-3;
  int t_points_low = 40, t_points_high = 40;
  int n_ang = 64, n_x = 400;
  double tol = 1e-10;
  int itmax = 0;  // 0 = per-solver default
  int ensemble = 1000, bins = 60;
  std::uint64_t seed = 1;
  double a_over_lambda = 0.1;
  double nu_corr = 1.0;
  int threads = 1;
  std::string label;  // output basename; defaults to the solver name
};

// Parsed config text: keys in file order, each with one or more comma
// separated values.  Rejects malformed lines and duplicate keys.
using ConfigDoc = std::vector<std::pair<std::string, std::vector<std::string>>>;

ConfigDoc parse_config_doc(const std::string& text);
ConfigDoc load_config_doc(const std::string& path);

// Single-valued doc -> validated config.  Unknown keys, lists, missing
// required keys, and out-of-range values all throw ConfigError naming the key.
ExperimentConfig build_config(const ConfigDoc& doc);

// Cross product over the list-valued keys, in file order; labels gain a
// zero-padded _pNNN suffix when more than one point results.
std::vector<ExperimentConfig> expand_sweep(const ConfigDoc& doc);

// Canonical text form; parse(emit(parse(x))) round-trips identically.
std::string emit_config(const ExperimentConfig& cfg);
nlohmann::json config_to_json(const ExperimentConfig& cfg);

struct RunResult {
  ExperimentConfig config;
  Spectrum spectrum;
  nlohmann::json report;
  std::string csv_path, report_path;  // empty when out_dir was empty
};

// Dispatches to the configured solver, computes the spectrum and its summary
// metrics, and (when out_dir is nonempty) writes <label>_spectrum.csv and
// <label>_report.json there.  Partial contour failures are embedded in the
// report; SolverError is thrown only when no spectrum results.
RunResult run_experiment(const ExperimentConfig& cfg, const std::string& out_dir);

// Curve distances for two tabulated spectra: raw and unit-mass-normalized L1,
// mean-T difference, and the sup difference over the common window inset 5%
// from both ends.  Throws ConfigError when the grids share no window.
nlohmann::json compare_spectra(const Spectrum& a, const Spectrum& b);

// Mean-free-path calibration for the config's lattice: ballistic decay fit
// against the nominal ell.
nlohmann::json calibration_report(const ExperimentConfig& cfg);

Spectrum read_spectrum_csv(const std::string& path);
void write_spectrum_csv(const Spectrum& s, const std::string& path);
// Write-to-temp + rename, so readers never observe a partial file.
void write_text_atomic(const std::string& text, const std::string& path);

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kVersion = "0.1.0";

}  // namespace rhosolve
