// Command-line front end: solve one config, expand a sweep, compare two
// spectrum CSVs, or run the mean-free-path calibration.  Exit codes: 0 on
// success, 1 when the solver produced no spectrum, 2 on config/usage errors.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "rhosolve/harness.hpp"

namespace {

struct CommonOpts {
  std::string config_path;
  std::string out_dir = ".";
  int threads = 0;          // 0 = keep config value
  std::uint64_t seed = 0;
  bool seed_set = false;
  double eta = 0.0;
  bool eta_set = false;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool needs_config = true) {
  auto* cfg = cmd->add_option("--config", o.config_path, "config file (key = value lines)");
  if (needs_config) cfg->required();
  cmd->add_option("--out", o.out_dir, "output directory")->capture_default_str();
  cmd->add_option("--threads", o.threads, "worker thread budget (overrides config)");
  cmd->add_option("--seed", o.seed, "ensemble seed base (overrides config)")
      ->each([&o](const std::string&) { o.seed_set = true; });
  cmd->add_option("--eta", o.eta, "contour offset (overrides config)")
      ->each([&o](const std::string&) { o.eta_set = true; });
}

void apply_overrides(rhosolve::ExperimentConfig& c, const CommonOpts& o) {
  if (o.threads > 0) c.threads = o.threads;
  if (o.seed_set) c.seed = o.seed;
  if (o.eta_set) {
    if (!(o.eta > 0.0)) throw rhosolve::ConfigError("--eta must be > 0");
    c.eta = o.eta;
  }
}

void print_run_summary(const rhosolve::RunResult& rr) {
  const auto& m = rr.report["metrics"];
  std::string mean = m["mean_T"].is_null() ? "n/a" : m["mean_T"].dump();
  std::printf("%s: %zu points, mass %.4f, mean_T %s, upper_edge %.4f -> %s\n",
              rr.config.label.c_str(), rr.spectrum.T.size(), m["mass"].get<double>(),
              mean.c_str(), m["upper_edge_0p05"].get<double>(), rr.csv_path.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"transmission-eigenvalue distributions for 2D disordered waveguides"};
  app.set_version_flag("--version", std::string("rhosolve ") + rhosolve::kVersion);
  app.require_subcommand(1);

  CommonOpts so, wo, co, ko;
  std::string cmp_a, cmp_b, cmp_out;

  CLI::App* solve = app.add_subcommand("solve", "run one configured experiment");
  add_common(solve, so);
  CLI::App* sweep = app.add_subcommand("sweep", "expand list-valued keys and run each point");
  add_common(sweep, wo);
  CLI::App* compare = app.add_subcommand("compare", "distance metrics between two spectrum CSVs");
  compare->add_option("a", cmp_a, "first spectrum CSV")->required();
  compare->add_option("b", cmp_b, "second spectrum CSV")->required();
  compare->add_option("--out", cmp_out, "also write the comparison JSON here");
  CLI::App* calib = app.add_subcommand("calibrate", "fit the lattice mean free path from ballistic decay");
  add_common(calib, ko);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (solve->parsed()) {
      rhosolve::ConfigDoc doc = rhosolve::load_config_doc(so.config_path);
      rhosolve::ExperimentConfig cfg = rhosolve::build_config(doc);
      apply_overrides(cfg, so);
      rhosolve::RunResult rr = rhosolve::run_experiment(cfg, so.out_dir);
      print_run_summary(rr);
    } else if (sweep->parsed()) {
      rhosolve::ConfigDoc doc = rhosolve::load_config_doc(wo.config_path);
      std::vector<rhosolve::ExperimentConfig> points = rhosolve::expand_sweep(doc);
      nlohmann::json index;
      index["schema_version"] = rhosolve::kSchemaVersion;
      index["points"] = nlohmann::json::array();
      int failed = 0;
      for (std::size_t i = 0; i < points.size(); ++i) {
        rhosolve::ExperimentConfig cfg = points[i];
        apply_overrides(cfg, wo);
        nlohmann::json entry = {{"label", cfg.label}, {"solver", cfg.solver}};
        try {
          rhosolve::RunResult rr = rhosolve::run_experiment(cfg, wo.out_dir);
          entry["spectrum_csv"] = cfg.label + "_spectrum.csv";
          entry["report"] = cfg.label + "_report.json";
          std::printf("[%zu/%zu] ", i + 1, points.size());
          print_run_summary(rr);
        } catch (const rhosolve::SolverError& e) {
          entry["error"] = e.what();
          ++failed;
          std::fprintf(stderr, "[%zu/%zu] %s failed: %s\n", i + 1, points.size(),
                       cfg.label.c_str(), e.what());
        }
        index["points"].push_back(std::move(entry));
      }
      std::filesystem::path dir(wo.out_dir);
      rhosolve::write_text_atomic(index.dump(2) + "\n",
                                  (dir / "sweep_index.json").string());
      if (failed == static_cast<int>(points.size()))
        throw rhosolve::SolverError("every sweep point failed");
    } else if (compare->parsed()) {
      rhosolve::Spectrum a = rhosolve::read_spectrum_csv(cmp_a);
      rhosolve::Spectrum b = rhosolve::read_spectrum_csv(cmp_b);
      nlohmann::json out = rhosolve::compare_spectra(a, b);
      std::cout << out.dump(2) << "\n";
      if (!cmp_out.empty()) rhosolve::write_text_atomic(out.dump(2) + "\n", cmp_out);
    } else if (calib->parsed()) {
      rhosolve::ConfigDoc doc = rhosolve::load_config_doc(ko.config_path);
      rhosolve::ExperimentConfig cfg = rhosolve::build_config(doc);
      apply_overrides(cfg, ko);
      nlohmann::json out = rhosolve::calibration_report(cfg);
      std::cout << out.dump(2) << "\n";
      if (!ko.out_dir.empty()) {
        std::filesystem::path dir(ko.out_dir);
        std::error_code ec;
        std::filesystem::create_directories(dir, ec);
        rhosolve::write_text_atomic(out.dump(2) + "\n",
                                    (dir / (cfg.label + "_calibration.json")).string());
      }
    }
  } catch (const rhosolve::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const rhosolve::SolverError& e) {
    std::fprintf(stderr, "solver error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
