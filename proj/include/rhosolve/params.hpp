#pragma once
// Physical parameter records.  Configs are dimensionless-first (W/lambda, L/W,
// L/ell, L/ell_a) with lambda = 1 internally; MediumParams stores the
// dimensional quantities and derives the rest.

#include <cmath>
#include <limits>

namespace rhosolve {

struct MediumParams {
  double k = 2.0 * 3.14159265358979323846;  // wavenumber (lambda = 1)
  double ell = 1.0;                         // scattering mean free path
  double ell_a = std::numeric_limits<double>::infinity();  // ballistic absorption length
  double L = 1.0;                           // slab thickness
  double W = 1.0;                           // waveguide width
  static constexpr int d = 2;

  double eps() const { return std::isinf(ell_a) ? 0.0 : k / ell_a; }
  double xi_a() const { return std::sqrt(0.5 * ell * ell_a); }

  // geometric constants through the general-d formulas (d pinned to 2)
  static double V_ball(int dim) {
    return std::pow(3.14159265358979323846, 0.5 * dim) / std::tgamma(0.5 * dim + 1.0);
  }
  static double S_d() { return d * V_ball(d); }        // 2 pi
  static double V_d() { return V_ball(d); }            // pi
  static double V_dm1() { return V_ball(d - 1); }      // 2
  static double mu() { return V_d() / (2.0 * V_dm1()); }  // pi/4

  static MediumParams from_dimensionless(double W_over_lambda, double L_over_W,
                                         double L_over_ell, double L_over_ella) {
    MediumParams m;
    m.W = W_over_lambda;
    m.L = L_over_W * m.W;
    m.ell = m.L / L_over_ell;
    m.ell_a = L_over_ella > 0.0 ? m.L / L_over_ella
                                : std::numeric_limits<double>::infinity();
    return m;
  }
};

struct PortParams {
  double ma = 1.0;  // input numerical aperture: inject |uperp| <= ma
  double mb = 1.0;  // output aperture
};

struct SolveControls {
  int n_ang = 64;          // total angular nodes (multiple of 4)
  int n_x = 400;           // spatial steps across the slab
  double tol = 1e-10;      // sup-norm tolerance on the Q update
  int itmax = 6000;
  double beta0 = 0.5;      // mixing weight, halved on residual increase
  double beta_min = 0.02;
  double grazing_floor = 1e-3;
};

}  // namespace rhosolve
