// Python face of the suite: scalar generating-function evaluations for each
// solver, spectra and lattice ensembles as plain lists, and a config-driven
// entry point mirroring the CLI.

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "rhosolve/diffusive.hpp"
#include "rhosolve/harness.hpp"
#include "rhosolve/lattice.hpp"
#include "rhosolve/quasiballistic.hpp"
#include "rhosolve/spectrum.hpp"
#include "rhosolve/transport.hpp"

namespace py = pybind11;
using namespace rhosolve;

namespace {

py::dict spectrum_dict(const Spectrum& s) {
  py::dict d;
  d["T"] = s.T;
  d["rho"] = s.rho;
  d["eta"] = s.eta;
  d["provenance"] = s.provenance;
  return d;
}

TransportSetup transport_setup(double L_over_ell, double L_over_ella, double ma,
                               double mb, const SolveControls& ctl, bool two_stream) {
  if (two_stream) return make_two_stream(L_over_ell, L_over_ella, ctl);
  PortParams ports{ma, mb};
  return make_transport(L_over_ell, L_over_ella, ports, ctl);
}

py::dict transport_F(double L_over_ell, double L_over_ella, cplx gamma, double ma,
                     double mb, int n_ang, int n_x, double tol, int itmax,
                     bool two_stream) {
  SolveControls ctl;
  ctl.n_ang = n_ang;
  ctl.n_x = n_x;
  ctl.tol = tol;
  ctl.itmax = itmax;
  TransportSetup setup = transport_setup(L_over_ell, L_over_ella, ma, mb, ctl, two_stream);
  TransportResult r = solve_transport(setup, gamma, ctl);
  py::dict d;
  d["F"] = r.F;
  d["iterations"] = r.iterations;
  d["residual"] = r.residual;
  d["converged"] = r.converged;
  if (!r.diagnostic.empty()) d["diagnostic"] = r.diagnostic;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "transmission-eigenvalue distributions for 2D disordered waveguides";
  m.attr("__version__") = kVersion;

  py::register_exception<ConfigError>(m, "ConfigError");
  py::register_exception<SolverError>(m, "SolverError");

  m.def("dmpk_F",
        [](cplx gamma, double L_over_ell) {
          double s = spreading_parameter(L_over_ell);
          RootResult r = gamma.imag() > 0.0 ? dmpk_contour(gamma, s)
                                            : dmpk_fixed_point(gamma, s);
          if (!r.converged) throw SolverError("dmpk root search failed to converge");
          return r.F;
        },
        py::arg("gamma"), py::arg("L_over_ell"),
        "Diffusive closed-form generating function F(gamma); contour-safe for "
        "Im gamma > 0.");

  m.def("transport_F",
        [](double L_over_ell, cplx gamma, double L_over_ella, double ma, double mb,
           int n_ang, int n_x, double tol, int itmax) {
          return transport_F(L_over_ell, L_over_ella, gamma, ma, mb, n_ang, n_x, tol,
                             itmax, false);
        },
        py::arg("L_over_ell"), py::arg("gamma"), py::arg("L_over_ella") = 0.0,
        py::arg("ma") = 1.0, py::arg("mb") = 1.0, py::arg("n_ang") = 64,
        py::arg("n_x") = 400, py::arg("tol") = 1e-10, py::arg("itmax") = 6000,
        "Full matrix-transport generating function at one gamma.");

  m.def("two_stream_F",
        [](double L_over_ell, cplx gamma, double L_over_ella, int n_x, double tol,
           int itmax) {
          return transport_F(L_over_ell, L_over_ella, gamma, 1.0, 1.0, 8, n_x, tol,
                             itmax, true);
        },
        py::arg("L_over_ell"), py::arg("gamma"), py::arg("L_over_ella") = 0.0,
        py::arg("n_x") = 400, py::arg("tol") = 1e-10, py::arg("itmax") = 400000,
        "Two-stream generating function at one gamma.");

  m.def("qb_F",
        [](double L_over_ell, cplx gamma, double ma, int n_ang) {
          AngularGrid grid = angular_quadrature(n_ang);
          std::vector<std::uint8_t> in_a = aperture_mask(grid, ma);
          QbState r = gamma.imag() > 0.0
                          ? qb_contour(gamma, L_over_ell, grid, in_a)
                          : solve_quasiballistic(gamma, L_over_ell, grid, in_a);
          if (!r.converged) throw SolverError("quasiballistic closure failed to converge");
          return r.F;
        },
        py::arg("L_over_ell"), py::arg("gamma"), py::arg("ma") = 1.0,
        py::arg("n_ang") = 64,
        "Quasiballistic-closure generating function at one gamma.");

  m.def("composite_t_grid", &composite_t_grid, py::arg("tmin") = 1e-3,
        py::arg("n_lo") = 40, py::arg("n_hi") = 40);

  m.def("lattice_eigenvalues",
        [](double W_over_lambda, double L_over_W, double L_over_ell,
           std::uint64_t seed, double L_over_ella, double ma, double mb,
           double a_over_lambda, double nu_corr) {
          LatticeModel model = make_lattice(W_over_lambda, L_over_W, L_over_ell,
                                            L_over_ella, a_over_lambda, nu_corr);
          std::vector<double> U = disorder_realization(model, seed);
          Eigen::MatrixXcd t = transmission_matrix(model, U);
          return transmission_eigenvalues(aperture_filter(model, t, ma, mb));
        },
        py::arg("W_over_lambda"), py::arg("L_over_W"), py::arg("L_over_ell"),
        py::arg("seed") = 1, py::arg("L_over_ella") = 0.0, py::arg("ma") = 1.0,
        py::arg("mb") = 1.0, py::arg("a_over_lambda") = 0.1, py::arg("nu_corr") = 1.0,
        "Transmission eigenvalues of one disorder realization, descending.");

  m.def("lattice_ensemble",
        [](double W_over_lambda, double L_over_W, double L_over_ell, int n_real,
           std::uint64_t seed, int bins, double L_over_ella, double ma, double mb,
           double a_over_lambda, double nu_corr, int threads) {
          LatticeModel model = make_lattice(W_over_lambda, L_over_W, L_over_ell,
                                            L_over_ella, a_over_lambda, nu_corr);
          EnsembleResult er =
              ensemble_spectrum(model, n_real, bins, seed, ma, mb, threads);
          py::dict d = spectrum_dict(er.hist);
          d["samples"] = er.samples;
          d["mean_T"] = er.mean_T;
          d["realizations"] = er.realizations;
          d["skipped"] = er.skipped;
          d["channels"] = er.channels;
          return d;
        },
        py::arg("W_over_lambda"), py::arg("L_over_W"), py::arg("L_over_ell"),
        py::arg("n_real") = 100, py::arg("seed") = 1, py::arg("bins") = 60,
        py::arg("L_over_ella") = 0.0, py::arg("ma") = 1.0, py::arg("mb") = 1.0,
        py::arg("a_over_lambda") = 0.1, py::arg("nu_corr") = 1.0,
        py::arg("threads") = 1,
        "Pooled eigenvalue histogram over a seeded lattice ensemble.");

  m.def("calibrate_ell",
        [](double W_over_lambda, double L_over_W, double L_over_ell, int n_real,
           std::uint64_t seed, double a_over_lambda, int threads) {
          LatticeModel model = make_lattice(W_over_lambda, L_over_W, L_over_ell, 0.0,
                                            a_over_lambda, 1.0);
          CalibrationResult r = calibrate_ell(model, n_real, seed, threads);
          py::dict d;
          d["ell_target"] = r.ell_target;
          d["ell_fit"] = r.ell_fit;
          d["slope"] = r.slope;
          d["realizations"] = r.realizations;
          return d;
        },
        py::arg("W_over_lambda"), py::arg("L_over_W"), py::arg("L_over_ell"),
        py::arg("n_real") = 200, py::arg("seed") = 1, py::arg("a_over_lambda") = 0.1,
        py::arg("threads") = 1,
        "Fit the realized mean free path from ballistic ensemble-mean decay.");

  m.def("run_config",
        [](const std::string& text, const std::string& out_dir) {
          ConfigDoc doc = parse_config_doc(text);
          ExperimentConfig cfg = build_config(doc);
          RunResult rr = run_experiment(cfg, out_dir);
          py::dict d = spectrum_dict(rr.spectrum);
          d["report_json"] = rr.report.dump();
          if (!rr.csv_path.empty()) d["csv_path"] = rr.csv_path;
          return d;
        },
        py::arg("text"), py::arg("out_dir") = std::string(),
        "Parse a config document, run it, and return the spectrum plus the "
        "JSON report (files are written when out_dir is nonempty).");
}
