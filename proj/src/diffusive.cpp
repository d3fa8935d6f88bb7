#include "rhosolve/diffusive.hpp"

#include <cmath>
#include <stdexcept>

namespace rhosolve {

namespace {

// tanhc(z) = tanh(z)/z and sech^2(z) as a pair, as functions of z^2 (both are
// even, which is what makes the fixed-point relation branch-free).  Saturates
// for large Re z so deep-contour points cannot overflow cosh.
struct TanhcPair {
  cplx tc, sech2;
};

TanhcPair tanhc_pair(cplx z2) {
  if (std::abs(z2) < 1e-16) return {1.0 - z2 / 3.0, 1.0};
  cplx z = std::sqrt(z2);
  if (z.real() > 350.0) return {1.0 / z, 0.0};
  cplx c = std::cosh(z);
  return {std::tanh(z) / z, 1.0 / (c * c)};
}

struct NewtonStep {
  cplx R, dR;
};

NewtonStep residual_and_slope(cplx gamma, double s, cplx F) {
  cplx sF = s * F;
  auto [tc, sech2] = tanhc_pair(sF * sF * gamma * (gamma - 1.0));
  cplx R = F - 1.0 / (1.0 - gamma) + s * F * tc * (1.0 + gamma * F);
  cplx dR = 1.0 + s * (tc * (1.0 + 2.0 * gamma * F) + (1.0 + gamma * F) * (sech2 - tc));
  return {R, dR};
}

// Newton iteration used by every entry point; relative step tolerance 1e-14.
RootResult polish(cplx gamma, double s, cplx F, int itmax) {
  RootResult r;
  for (int it = 0; it < itmax; ++it) {
    auto [R, dR] = residual_and_slope(gamma, s, F);
    cplx Fn = F - R / dR;
    ++r.iterations;
    if (std::abs(Fn - F) < 1e-14 * std::max(1.0, std::abs(F))) {
      r.F = Fn;
      r.converged = true;
      r.residual = std::abs(residual_and_slope(gamma, s, Fn).R);
      return r;
    }
    F = Fn;
  }
  r.F = F;
  r.residual = std::abs(residual_and_slope(gamma, s, F).R);
  return r;
}

}  // namespace

cplx dmpk_residual(cplx gamma, double s, cplx F) {
  return residual_and_slope(gamma, s, F).R;
}

RootResult dmpk_newton(cplx gamma, double s, cplx F0) {
  return polish(gamma, s, F0, 200);
}

RootResult dmpk_fixed_point(cplx gamma, double s) {
  cplx F = 1.0 / (1.0 - gamma);
  if (s == 0.0) return {F, true, 0, 0.0};
  int nstep = std::max(1, static_cast<int>(std::ceil(s / 0.1)));
  RootResult r;
  int total = 0;
  for (int k = 1; k <= nstep; ++k) {
    r = polish(gamma, s * k / nstep, F, 100);
    total += r.iterations;
    F = r.F;
  }
  r.iterations = total;
  return r;
}

RootResult dmpk_contour(cplx gamma, double s, double anchor) {
  double target = gamma.imag();
  if (target <= 0.0)
    throw std::invalid_argument("dmpk_contour needs Im gamma > 0");
  cplx g0{gamma.real(), std::max(target, anchor)};
  RootResult r = dmpk_fixed_point(g0, s);
  int total = r.iterations;
  double eta = g0.imag();
  while (eta > target * 1.0001) {
    eta = std::max(0.5 * eta, target);
    r = polish({gamma.real(), eta}, s, r.F, 200);
    total += r.iterations;
  }
  r.iterations = total;
  return r;
}

}  // namespace rhosolve
