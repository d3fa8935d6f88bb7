#pragma once
// Thin-slab closure: the radiance direction profile f(Omega) solves
//   f = [1 - (1 - fbar) tau] / [1 + (1 + gamma fbar/(1-gamma)) tau],
//   tau = tanh(L sigma / 2 ell u) / sigma,   sigma^2 = 1 + gamma fbar^2/(1-gamma),
// with fbar the half-space average of f.  Position space is frozen (Q nearly
// constant through a slab thinner than ell) while direction space stays exact
// -- the dual approximation to the diffusive closed form.  tau is even in
// sigma, so the square root needs no branch tracking; sigma itself is reported
// on the Re >= 0 branch.  F comes from the aperture-restricted flux average of
// the g insertion (-2i/(1-gamma)) f Theta(u) Lam-.

#include <complex>
#include <cstdint>
#include <vector>

#include "rhosolve/matrix2.hpp"
#include "rhosolve/quadrature.hpp"

namespace rhosolve {

struct QbState {
  std::vector<cplx> f;  // on the upar > 0 nodes, grid order
  cplx fbar = 1.0;
  cplx sigma = 1.0;
  cplx gamma = 0.0;
  cplx F = 0.0;
  bool converged = false;
  int iterations = 0;
  double residual = 0.0;  // |fbar - half-space average of f| at exit
};

// Damped fixed-point iteration on the single complex scalar fbar; on
// non-convergence the damping is bisected a few times before giving up.
QbState solve_quasiballistic(cplx gamma, double L_over_ell,
                             const AngularGrid& grid,
                             const std::vector<std::uint8_t>& in_a,
                             cplx fbar_seed = 1.0, double tol = 1e-12,
                             int itmax = 2000);

// Boundary value on the spectral contour: the fbar map can hold several fixed
// points near the cut, so anchor high above it and walk Im gamma down by
// halving, reseeding each solve from the last.  Requires Im gamma > 0.
QbState qb_contour(cplx gamma, double L_over_ell, const AngularGrid& grid,
                   const std::vector<std::uint8_t>& in_a, double anchor = 0.5);

}  // namespace rhosolve
