#pragma once
// Spectral transform and curve metrics.  The eigenvalue density follows from
// the generating function's boundary values just above the cut,
//   rho(T) = (1/pi T^2) Im F(1/T + i eta),
// evaluated on a composite T grid and optionally eta-extrapolated by one
// Richardson step, 2 rho(eta/2) - rho(eta).  Metrics operate on tabulated
// curves: raw L1 for solver-vs-solver distances, unit-mass-normalized L1 for
// histogram-vs-curve distances, plus captured mass, mean T, and the upper
// spectral edge.

#include <complex>
#include <functional>
#include <string>
#include <vector>

namespace rhosolve {

using cplx = std::complex<double>;

// Geometric spacing across (tmin, 0.5) plus sqrt-clustered points piling up
// at the T = 1 edge where the open-channel peak lives.
std::vector<double> composite_t_grid(double tmin = 1e-3, int n_lo = 40,
                                     int n_hi = 40);

struct Spectrum {
  std::vector<double> T, rho;  // ascending T
  double eta = 0.0;
  std::string provenance;
};

// F is called at gamma = 1/T + i eta in ascending-T order (eta, then eta/2,
// per point when richardson is set), so a stateful functor can warm-start
// from the previous contour point.
Spectrum spectrum_from_F(const std::function<cplx(cplx)>& F,
                         const std::vector<double>& grid, double eta,
                         bool richardson, std::string provenance);

// Pooled eigenvalue histogram as a density on (0, 1]: uniform bins, value
// count/(denom * width); denom = realizations x controlled channels makes it
// a per-channel density comparable to the analytic rho.
Spectrum histogram_spectrum(const std::vector<double>& samples, int bins,
                            double denom, std::string provenance);

double curve_mass(const Spectrum& s);
double mass_above(const Spectrum& s, double t0);
double mean_T(const Spectrum& s);
// Largest grid T with rho >= thresh (0 when the curve never reaches it).
double upper_edge(const Spectrum& s, double thresh);

// Linear interpolation of rho at t (clamped to the tabulated range).
double interp_rho(const Spectrum& s, double t);
// Union of both grids restricted to the common T window; throws when the
// curves share none.
std::vector<double> common_grid(const Spectrum& a, const Spectrum& b);

// Trapezoid integral of |a - b| on the union grid over the common T window,
// linear interpolation between nodes.
double l1_distance(const Spectrum& a, const Spectrum& b);
// Same, after scaling each curve to unit mass on the common window.
double l1_distance_normalized(const Spectrum& a, const Spectrum& b);

}  // namespace rhosolve
