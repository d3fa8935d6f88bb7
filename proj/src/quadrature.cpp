#include "rhosolve/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace rhosolve {

// Newton iteration on P_n with the Chebyshev-angle starting guess; nodes to
// machine precision for any n used here.
GaussLegendre gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n >= 1 required");
  GaussLegendre out;
  out.x.resize(n);
  out.w.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      pp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    out.x[i] = -x;
    out.x[n - 1 - i] = x;
    double w = 2.0 / ((1.0 - x * x) * pp * pp);
    out.w[i] = w;
    out.w[n - 1 - i] = w;
  }
  return out;
}

double AngularGrid::min_abs_upar() const {
  double m = 1.0;
  for (double u : upar) m = std::min(m, std::abs(u));
  return m;
}

AngularGrid angular_quadrature(int n_nodes, double floor) {
  if (n_nodes < 4 || n_nodes % 4 != 0)
    throw std::invalid_argument("angular_quadrature: n_nodes must be a positive multiple of 4");
  int nq = n_nodes / 4;
  GaussLegendre gl = gauss_legendre(nq);
  AngularGrid g;
  g.upar.reserve(n_nodes);
  g.uperp.reserve(n_nodes);
  g.w.reserve(n_nodes);
  // quadrant order: (+,+), (+,-), (-,+), (-,-) in (upar, uperp) signs
  const double sg[4][2] = {{1, 1}, {1, -1}, {-1, 1}, {-1, -1}};
  for (auto& q : sg) {
    for (int i = 0; i < nq; ++i) {
      double th = 0.25 * kPi * (gl.x[i] + 1.0);  // theta in (0, pi/2)
      g.upar.push_back(q[0] * std::cos(th));
      g.uperp.push_back(q[1] * std::sin(th));
      g.w.push_back(0.25 * kPi * gl.w[i] / (2.0 * kPi));
    }
  }
  double sum = 0.0;
  for (double w : g.w) sum += w;
  for (double& w : g.w) w /= sum;  // exact normalization against roundoff
  g.fw.resize(n_nodes);
  for (int i = 0; i < n_nodes; ++i) g.fw[i] = 0.5 * kPi * g.w[i] * g.upar[i];
  if (g.min_abs_upar() < floor)
    throw std::invalid_argument(
        "angular_quadrature: node below the grazing floor; lower n_nodes or override the floor");
  return g;
}

AngularGrid two_stream_grid() {
  AngularGrid g;
  g.upar = {kMu, -kMu};
  g.uperp = {0.0, 0.0};
  g.w = {0.5, 0.5};
  g.fw = {0.5, -0.5};  // half-space moments of the direction-averaged reduction
  g.two_stream = true;
  return g;
}

std::vector<std::uint8_t> aperture_mask(const AngularGrid& grid, double m) {
  std::vector<std::uint8_t> mask(grid.size());
  for (int i = 0; i < grid.size(); ++i)
    mask[i] = std::abs(grid.uperp[i]) <= m + 1e-14 ? 1 : 0;
  return mask;
}

}  // namespace rhosolve
