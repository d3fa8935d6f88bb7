#pragma once
// Direction-averaged transport limits.  The diffusive closed form determines
// F(gamma) from the scalar fixed-point relation
//   F = 1/(1-gamma) - s F tanhc(z) (1 + gamma F),   z^2 = (sF)^2 gamma (gamma-1),
// with s = L/(2 mu ell) the spreading parameter.  tanhc(z) = tanh(z)/z is even
// in z, so no square-root branch needs tracking.  The same physics solved as a
// transport problem on the degenerate +-mu grid (the two-stream reduction)
// lives in make_two_stream(); it additionally admits absorption, which the
// closed form does not.

#include <complex>

#include "rhosolve/matrix2.hpp"
#include "rhosolve/quadrature.hpp"

namespace rhosolve {

inline double spreading_parameter(double L_over_ell) {
  return L_over_ell / (2.0 * kMu);  // s = L/(2 mu ell), mu = pi/4 in d = 2
}

struct RootResult {
  cplx F = 0.0;
  bool converged = false;
  int iterations = 0;
  double residual = 0.0;  // |R(F)| at the returned root
};

// Residual of the fixed-point relation (zero at a solution).
cplx dmpk_residual(cplx gamma, double s, cplx F);

// Newton from a caller-supplied seed.  No continuation: finds whatever root
// the basin of the seed holds.
RootResult dmpk_newton(cplx gamma, double s, cplx F0);

// Continuation in s from the transparent limit F = 1/(1-gamma).  Reliable for
// gamma away from the branch cut [1, inf).
RootResult dmpk_fixed_point(cplx gamma, double s);

// Physical boundary value for gamma just above the cut: anchor the root far
// off the real axis (where s-continuation is safe) and walk Im gamma down by
// halving.  Plain continuation from the transparent limit lands on an
// unphysical real-valued root there.  Requires Im gamma > 0.
RootResult dmpk_contour(cplx gamma, double s, double anchor = 1.0);

}  // namespace rhosolve
