#include "rhosolve/quasiballistic.hpp"

#include <cmath>
#include <stdexcept>

namespace rhosolve {

namespace {

// tanh saturates exponentially; past |Re| ~ 350 the naive sinh/cosh quotient
// would overflow, and the true value is the sign of the real part to machine
// precision.
cplx tanh_safe(cplx z) {
  if (std::abs(z.real()) > 350.0) return z.real() > 0.0 ? 1.0 : -1.0;
  return std::tanh(z);
}

struct HalfGrid {
  std::vector<double> u, w;
  std::vector<std::uint8_t> ap;
};

HalfGrid positive_half(const AngularGrid& grid, const std::vector<std::uint8_t>& in_a) {
  HalfGrid h;
  for (int i = 0; i < grid.size(); ++i) {
    if (grid.upar[i] > 0.0) {
      h.u.push_back(grid.upar[i]);
      h.w.push_back(grid.w[i]);
      h.ap.push_back(in_a[i]);
    }
  }
  return h;
}

// One evaluation of the closure: given fbar, fill f and return its half-space
// average (the fixed-point map).
cplx closure_map(cplx gamma, double kl, const HalfGrid& h, cplx fbar,
                 std::vector<cplx>& f) {
  cplx sig2 = 1.0 + gamma * fbar * fbar / (1.0 - gamma);
  cplx sig = std::sqrt(sig2);
  cplx num_c = 1.0 - fbar;
  cplx den_c = 1.0 + gamma * fbar / (1.0 - gamma);
  cplx avg = 0.0;
  for (std::size_t i = 0; i < h.u.size(); ++i) {
    cplx tau = tanh_safe(kl * sig / (2.0 * h.u[i])) / sig;
    f[i] = (1.0 - num_c * tau) / (1.0 + den_c * tau);
    avg += 2.0 * h.w[i] * f[i];
  }
  return avg;
}

}  // namespace

QbState solve_quasiballistic(cplx gamma, double L_over_ell,
                             const AngularGrid& grid,
                             const std::vector<std::uint8_t>& in_a,
                             cplx fbar_seed, double tol, int itmax) {
  HalfGrid h = positive_half(grid, in_a);
  QbState st;
  st.gamma = gamma;
  st.f.resize(h.u.size());

  int total = 0;
  for (double beta : {0.5, 0.25, 0.125, 0.0625}) {
    cplx fbar = fbar_seed;
    for (int it = 0; it < itmax; ++it) {
      cplx fn = closure_map(gamma, L_over_ell, h, fbar, st.f);
      ++total;
      if (std::abs(fn - fbar) <= tol) {
        fbar = fn;
        st.converged = true;
        break;
      }
      fbar = (1.0 - beta) * fbar + beta * fn;
    }
    if (st.converged) {
      st.fbar = fbar;
      break;
    }
    st.fbar = fbar;  // best effort from the last damping tried
  }
  st.iterations = total;

  // final state and residual from the converged (or last) fbar
  cplx avg = closure_map(gamma, L_over_ell, h, st.fbar, st.f);
  st.residual = std::abs(avg - st.fbar);
  st.sigma = std::sqrt(1.0 + gamma * st.fbar * st.fbar / (1.0 - gamma));
  cplx acc = 0.0;
  for (std::size_t i = 0; i < h.u.size(); ++i)
    if (h.ap[i]) acc += h.w[i] * h.u[i] * st.f[i];
  st.F = kPi / (1.0 - gamma) * acc;
  return st;
}

QbState qb_contour(cplx gamma, double L_over_ell, const AngularGrid& grid,
                   const std::vector<std::uint8_t>& in_a, double anchor) {
  double target = gamma.imag();
  if (target <= 0.0)
    throw std::invalid_argument("qb_contour needs Im gamma > 0");
  double im = std::max(target, anchor);
  QbState st = solve_quasiballistic({gamma.real(), im}, L_over_ell, grid, in_a);
  while (im > target * 1.0001) {
    im = std::max(0.5 * im, target);
    st = solve_quasiballistic({gamma.real(), im}, L_over_ell, grid, in_a, st.fbar);
  }
  return st;
}

}  // namespace rhosolve
