#pragma once
// Microscopic waveguide: five-point finite differences on (Ny x Nx) sites with
// periodic transverse boundaries and semi-infinite clean leads attached at
// both ends through exact per-mode self-energies.  Transport by the recursive
// Green's function sweep, slice by slice; transmission matrices through the
// lattice Fisher-Lee relation with mode group velocities, which keeps clean
// flux unitarity exact on the grid.  Disorder is i.i.d. Gaussian per site
// (delta-correlated in the continuum limit) with variance alpha/a^2, seeded
// per realization index so ensembles reproduce independent of execution order.

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rhosolve/spectrum.hpp"

namespace rhosolve {

struct LatticeModel {
  int Ny = 0, Nx = 0;
  double a = 0.1;        // grid pitch (lambda = 1)
  double k = 0.0;        // wavenumber
  double c = 0.0;        // inter-site coupling 1/a^2
  double alpha = 0.0;    // disorder strength; site variance alpha/a^2
  double eps_abs = 0.0;  // absorption k/ell_a added inside the slab
  double ell = 0.0;      // nominal mean free path behind alpha

  std::vector<double> q;     // transverse wavenumbers, FFT mode order
  std::vector<cplx> zeta;    // per-mode lead factor, |zeta| <= 1
  std::vector<int> prop;     // propagating mode indices
  std::vector<double> v;     // group velocities of propagating modes
  Eigen::MatrixXcd Phi;      // Ny x Ny mode matrix  Phi(y, m) = e^{i q_m y a}/sqrt(Ny)
  Eigen::MatrixXcd Phi_p;    // propagating columns of Phi
  Eigen::MatrixXcd Sigma;    // lead self-energy Phi diag(c zeta) Phi^dag

  int n_prop() const { return static_cast<int>(prop.size()); }
  // controlled-mode count for an aperture: |q|/k <= m
  int n_controlled(double m_ap) const;
};

// Builds the lattice, lead basis, and self-energies.  alpha follows the
// Born-level conversion alpha = 4 k nu_corr / ell; nu_corr absorbs the finite-a
// lattice correction measured by the calibration oracle (1 = trust Born).
// Throws std::invalid_argument for a > lambda/8 or empty geometry.
LatticeModel make_lattice(double W_over_lambda, double L_over_W,
                          double L_over_ell, double L_over_ella = 0.0,
                          double a_over_lambda = 0.1, double nu_corr = 1.0);

// Per-site potentials for one realization, Ny-major (site (y, n) at n*Ny + y).
std::vector<double> disorder_realization(const LatticeModel& m, std::uint64_t seed);

// Recursive sweep: returns G(Nx, 1) * B for a Ny x r block B; with keep_fields
// also the interior columns psi_n = G(n, 1) * B for every slice (backward
// substitution through the stored left-connected blocks).
struct GreenApply {
  Eigen::MatrixXcd at_exit;                 // G(Nx,1) B
  std::vector<Eigen::MatrixXcd> interior;   // psi_n per slice when requested
};
GreenApply green_apply(const LatticeModel& m, const std::vector<double>& U,
                       const Eigen::MatrixXcd& B, bool keep_fields = false);

// Full-control transmission matrix (n_prop x n_prop) via the recursive sweep.
Eigen::MatrixXcd transmission_matrix(const LatticeModel& m,
                                     const std::vector<double>& U);
// Same through one dense solve of the whole lattice operator (oracle).
Eigen::MatrixXcd transmission_matrix_dense(const LatticeModel& m,
                                           const std::vector<double>& U);

// Row/column restriction to |q|/k <= m_b (rows) and m_a (columns).
Eigen::MatrixXcd aperture_filter(const LatticeModel& m, const Eigen::MatrixXcd& t,
                                 double ma, double mb);

// Eigenvalues of t^dag t as squared singular values, descending.
std::vector<double> transmission_eigenvalues(const Eigen::MatrixXcd& t);

struct EnsembleResult {
  Spectrum hist;
  std::vector<double> samples;  // pooled eigenvalues
  double mean_T = 0.0;          // ensemble mean per controlled channel
  int realizations = 0;
  int skipped = 0;
  int channels = 0;  // controlled input channels per realization
};
EnsembleResult ensemble_spectrum(const LatticeModel& m, int n_real, int bins,
                                 std::uint64_t seed_base, double ma, double mb,
                                 int threads = 1);

// Ballistic decay of the ensemble-mean field: fit ln|<psi_0(x)>| linearly over
// the interior of the slab; ell_fit = -1/(2 slope).  The normal-incidence mode
// is injected as a source on the first slice.
struct CalibrationResult {
  double ell_target = 0.0;
  double ell_fit = 0.0;
  double slope = 0.0;
  int realizations = 0;
  int fit_lo = 0, fit_hi = 0;  // slice window of the fit
};
CalibrationResult calibrate_ell(const LatticeModel& m, int n_real,
                                std::uint64_t seed_base, int threads = 1);

}  // namespace rhosolve
