#include "rhosolve/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rhosolve {

namespace {

constexpr double kPiLocal = 3.14159265358979323846;

double trapezoid(const std::vector<double>& x, const std::vector<double>& y) {
  double acc = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i)
    acc += 0.5 * (y[i] + y[i - 1]) * (x[i] - x[i - 1]);
  return acc;
}

}  // namespace

double interp_rho(const Spectrum& s, double t) {
  const auto& T = s.T;
  auto it = std::lower_bound(T.begin(), T.end(), t);
  if (it == T.begin()) return s.rho.front();
  if (it == T.end()) return s.rho.back();
  std::size_t hi = it - T.begin(), lo = hi - 1;
  double frac = (t - T[lo]) / (T[hi] - T[lo]);
  return s.rho[lo] + frac * (s.rho[hi] - s.rho[lo]);
}

// Union of both grids restricted to the common support window.
std::vector<double> common_grid(const Spectrum& a, const Spectrum& b) {
  double lo = std::max(a.T.front(), b.T.front());
  double hi = std::min(a.T.back(), b.T.back());
  if (!(lo < hi)) throw std::invalid_argument("curves share no T window");
  std::vector<double> u;
  u.reserve(a.T.size() + b.T.size());
  for (double t : a.T)
    if (t >= lo && t <= hi) u.push_back(t);
  for (double t : b.T)
    if (t >= lo && t <= hi) u.push_back(t);
  std::sort(u.begin(), u.end());
  u.erase(std::unique(u.begin(), u.end(),
                      [](double x, double y) { return std::abs(x - y) < 1e-12; }),
          u.end());
  return u;
}

namespace {

double l1_on_grid(const Spectrum& a, const Spectrum& b, double sa, double sb) {
  std::vector<double> u = common_grid(a, b);
  std::vector<double> d(u.size());
  for (std::size_t i = 0; i < u.size(); ++i)
    d[i] = std::abs(sa * interp_rho(a, u[i]) - sb * interp_rho(b, u[i]));
  return trapezoid(u, d);
}

}  // namespace

std::vector<double> composite_t_grid(double tmin, int n_lo, int n_hi) {
  if (tmin <= 0.0 || tmin >= 0.5 || n_lo < 2 || n_hi < 1)
    throw std::invalid_argument("bad composite grid parameters");
  std::vector<double> g;
  g.reserve(n_lo + n_hi);
  double ratio = std::pow(0.5 / tmin, 1.0 / (n_lo - 1));
  double t = tmin;
  for (int k = 0; k < n_lo; ++k, t *= ratio) g.push_back(t);
  g.back() = 0.5;  // pin the seam against pow roundoff
  for (int j = 1; j <= n_hi; ++j) {
    double q = static_cast<double>(j) / n_hi;
    g.push_back(1.0 - 0.5 * (1.0 - q) * (1.0 - q));
  }
  return g;
}

Spectrum spectrum_from_F(const std::function<cplx(cplx)>& F,
                         const std::vector<double>& grid, double eta,
                         bool richardson, std::string provenance) {
  Spectrum s;
  s.T = grid;
  s.rho.resize(grid.size());
  s.eta = eta;
  s.provenance = std::move(provenance);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double t = grid[i];
    cplx Fa = F({1.0 / t, eta});
    if (richardson) {
      cplx Fb = F({1.0 / t, eta / 2.0});
      s.rho[i] = (2.0 * Fb - Fa).imag() / (kPiLocal * t * t);
    } else {
      s.rho[i] = Fa.imag() / (kPiLocal * t * t);
    }
  }
  return s;
}

Spectrum histogram_spectrum(const std::vector<double>& samples, int bins,
                            double denom, std::string provenance) {
  if (bins < 1 || denom <= 0.0) throw std::invalid_argument("bad histogram shape");
  Spectrum s;
  s.provenance = std::move(provenance);
  double width = 1.0 / bins;
  std::vector<double> count(bins, 0.0);
  for (double t : samples) {
    int k = std::min(bins - 1, std::max(0, static_cast<int>(t * bins)));
    count[k] += 1.0;
  }
  s.T.resize(bins);
  s.rho.resize(bins);
  for (int k = 0; k < bins; ++k) {
    s.T[k] = (k + 0.5) * width;
    s.rho[k] = count[k] / (denom * width);
  }
  return s;
}

double curve_mass(const Spectrum& s) { return trapezoid(s.T, s.rho); }

double mass_above(const Spectrum& s, double t0) {
  double acc = 0.0;
  for (std::size_t i = 1; i < s.T.size(); ++i) {
    double a = s.T[i - 1], b = s.T[i];
    if (b <= t0) continue;
    double ya = s.rho[i - 1], yb = s.rho[i];
    if (a < t0) {  // clip the straddling panel at t0
      double f = (t0 - a) / (b - a);
      ya = ya + f * (yb - ya);
      a = t0;
    }
    acc += 0.5 * (ya + yb) * (b - a);
  }
  return acc;
}

double mean_T(const Spectrum& s) {
  std::vector<double> ty(s.T.size());
  for (std::size_t i = 0; i < s.T.size(); ++i) ty[i] = s.T[i] * s.rho[i];
  double m = curve_mass(s);
  if (m == 0.0) throw std::invalid_argument("curve has zero mass");
  return trapezoid(s.T, ty) / m;
}

double upper_edge(const Spectrum& s, double thresh) {
  for (std::size_t i = s.T.size(); i-- > 0;)
    if (s.rho[i] >= thresh) return s.T[i];
  return 0.0;
}

double l1_distance(const Spectrum& a, const Spectrum& b) {
  return l1_on_grid(a, b, 1.0, 1.0);
}

double l1_distance_normalized(const Spectrum& a, const Spectrum& b) {
  std::vector<double> u = common_grid(a, b);
  Spectrum aw, bw;
  aw.T = u;
  bw.T = u;
  aw.rho.resize(u.size());
  bw.rho.resize(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    aw.rho[i] = interp_rho(a, u[i]);
    bw.rho[i] = interp_rho(b, u[i]);
  }
  double ma = curve_mass(aw), mb = curve_mass(bw);
  if (ma <= 0.0 || mb <= 0.0) throw std::invalid_argument("curve has zero mass");
  return l1_on_grid(aw, bw, 1.0 / ma, 1.0 / mb);
}

}  // namespace rhosolve
