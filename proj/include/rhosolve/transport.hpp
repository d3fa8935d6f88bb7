#pragma once
// Self-consistent matrix transport across the slab.  The 2x2 radiance
// g(Omega, x) obeys
//   Omega_par dg/dx = -(1/2 ell) [Qbar(x), g] - (eps/2k) [Lam3, g]
// in the bulk, with port terms at the faces:  columns of the parametrization
// g = M Lam3 M^-1 are multiplied by (1 + i gamma Lam+) at x = 0^- and
// (1 + i Lam-) at x = L^+ for rays inside the respective apertures.  The
// two-point boundary value problem per ray is solved by propagating the
// eigencolumn known at each face (m- from the incoming side, m+ from the
// outgoing side) with midpoint exponential steps; columns are renormalized
// every step so thick or absorbing media cannot overflow.  Qbar is the
// angular average of g, closed by damped fixed-point mixing.

#include <complex>
#include <string>
#include <vector>

#include "rhosolve/matrix2.hpp"
#include "rhosolve/params.hpp"
#include "rhosolve/quadrature.hpp"

namespace rhosolve {

struct TransportSetup {
  double kl = 0.0;  // L/ell, optical thickness
  double ka = 0.0;  // L/ell_a, absorption thickness
  AngularGrid grid;
  std::vector<std::uint8_t> in_a, in_b;  // aperture masks per ray
  int n_x = 400;
  int threads = 1;
};

TransportSetup make_transport(double L_over_ell, double L_over_ella,
                              const PortParams& ports, const SolveControls& ctl);
// Degenerate +-mu grid: same machinery, two-stream physics.
TransportSetup make_two_stream(double L_over_ell, double L_over_ella,
                               const SolveControls& ctl);

using QField = std::vector<M2>;  // Qbar on the n_x + 1 grid planes

struct TransportResult {
  std::vector<M2> g;  // ray-major: g[i * (n_x + 1) + j]
  QField Qt;
  cplx F = 0.0;
  int iterations = 0;
  double residual = 0.0;
  bool converged = false;
  std::string diagnostic;  // set when a gamma point is aborted
};

TransportResult solve_transport(const TransportSetup& setup, cplx gamma,
                                const SolveControls& ctl,
                                const QField* seed = nullptr);

// Generating function from a converged field: i * sum_in_a fw_i Tr[g_i(0) Lam+].
cplx generating_function(const TransportSetup& setup, const TransportResult& res);

struct ConstraintReport {
  double unipotency = 0.0;  // max ||g^2 - 1||
  double trace = 0.0;       // max |Tr g|
  double boundary = 0.0;    // incoming g12 / outgoing g21 structure at the faces
};
ConstraintReport constraint_residuals(const TransportSetup& setup,
                                      const TransportResult& res, cplx gamma);

}  // namespace rhosolve
