#include <cmath>
#include <complex>
#include <stdexcept>

#include "doctest.h"
#include "rhosolve/spectrum.hpp"

using namespace rhosolve;

namespace {
constexpr double pi = 3.14159265358979323846;

Spectrum flat(double lo, double hi, double value, int n = 33) {
  Spectrum s;
  for (int i = 0; i < n; ++i) {
    s.T.push_back(lo + (hi - lo) * i / (n - 1));
    s.rho.push_back(value);
  }
  return s;
}
}  // namespace

TEST_CASE("composite grid is strictly ascending into the T = 1 edge") {
  std::vector<double> g = composite_t_grid(1e-3, 40, 40);
  REQUIRE(g.size() == 80);
  CHECK(g.front() == doctest::Approx(1e-3));
  CHECK(g.back() == doctest::Approx(1.0));
  for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] > g[i - 1]);
  // half the points crowd the top half where the open-channel peak lives
  int above = 0;
  for (double t : g) above += t > 0.5;
  CHECK(above == 40);
  CHECK_THROWS_AS(composite_t_grid(0.7, 10, 10), std::invalid_argument);
}

TEST_CASE("a simple pole turns into a Lorentzian line of the right mass") {
  // F(gamma) = w/(1/T0 - gamma): rho_eta(T) is the pole at T0 broadened to
  // a Lorentzian; without Richardson the peak height is w/(pi eta T0^2)
  double T0 = 0.5, w = 0.7, eta = 1e-3;
  auto F = [&](cplx gamma) { return w / (1.0 / T0 - gamma); };
  std::vector<double> grid;
  for (int i = 0; i <= 400; ++i) grid.push_back(0.3 + 0.4 * i / 400.0);
  Spectrum s = spectrum_from_F(F, grid, eta, false, "pole");
  double peak = 0.0, t_at = 0.0;
  for (std::size_t i = 0; i < s.T.size(); ++i)
    if (s.rho[i] > peak) {
      peak = s.rho[i];
      t_at = s.T[i];
    }
  CHECK(t_at == doctest::Approx(T0).epsilon(0.01));
  CHECK(peak == doctest::Approx(w / (pi * eta * T0 * T0)).epsilon(0.01));
  // the line integrates to ~w T0^... : mass = w within the window up to tails
  CHECK(curve_mass(s) == doctest::Approx(w).epsilon(0.02));
  CHECK(s.provenance == "pole");
  CHECK(s.eta == eta);
}

TEST_CASE("Richardson step cancels the linear eta bias") {
  // F with a regular part: Im F(1/T + i eta) = a eta + O(eta^2) away from
  // poles; the extrapolated density must vanish at eta -> 0 faster than eta
  auto F = [](cplx gamma) { return 1.0 / (3.0 - gamma); };  // pole at T = 1/3
  std::vector<double> grid{0.6, 0.7, 0.8};
  Spectrum raw = spectrum_from_F(F, grid, 1e-3, false, "raw");
  Spectrum ext = spectrum_from_F(F, grid, 1e-3, true, "ext");
  for (std::size_t i = 0; i < grid.size(); ++i)
    CHECK(std::abs(ext.rho[i]) < 0.02 * std::abs(raw.rho[i]));
}

TEST_CASE("histogram turns samples into a per-channel density") {
  std::vector<double> samples{0.05, 0.05, 0.95, 0.95, 0.95, 1.0};
  Spectrum h = histogram_spectrum(samples, 10, 2.0, "hist");
  REQUIRE(h.T.size() == 10);
  CHECK(h.T[0] == doctest::Approx(0.05));
  CHECK(h.T[9] == doctest::Approx(0.95));
  // bin width 0.1, denom 2: value = count / 0.2
  CHECK(h.rho[0] == doctest::Approx(2.0 / 0.2));
  CHECK(h.rho[9] == doctest::Approx(4.0 / 0.2));  // 1.0 clamps into the last bin
  for (int i = 1; i < 9; ++i) CHECK(h.rho[i] == 0.0);
}

TEST_CASE("curve metrics on a flat density") {
  Spectrum s = flat(0.1, 0.9, 1.0);
  CHECK(curve_mass(s) == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(mean_T(s) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(mass_above(s, 0.5) == doctest::Approx(0.4).epsilon(1e-9));
  // straddling panel is clipped at the cut, not dropped
  CHECK(mass_above(s, 0.33) == doctest::Approx(0.57).epsilon(1e-9));
  CHECK(upper_edge(s, 0.5) == doctest::Approx(0.9));
  CHECK(upper_edge(s, 2.0) == 0.0);
  Spectrum z = flat(0.1, 0.9, 0.0);
  CHECK_THROWS_AS(mean_T(z), std::invalid_argument);
}

TEST_CASE("L1 distances on known rectangles") {
  Spectrum a = flat(0.1, 0.9, 1.0);
  Spectrum b = flat(0.1, 0.9, 0.25);
  CHECK(l1_distance(a, b) == doctest::Approx(0.6).epsilon(1e-12));
  // after unit-mass normalization the shapes coincide
  CHECK(l1_distance_normalized(a, b) == doctest::Approx(0.0).epsilon(1e-12));
  // partial overlap integrates only the common window
  Spectrum c = flat(0.5, 1.0, 1.0);
  CHECK(l1_distance(b, c) == doctest::Approx(0.3).epsilon(1e-12));
  Spectrum d = flat(0.91, 1.0, 1.0);
  CHECK_THROWS_AS(l1_distance(a, d), std::invalid_argument);
}

TEST_CASE("interpolation clamps outside the tabulated range") {
  Spectrum s = flat(0.2, 0.8, 2.0);
  s.rho.front() = 1.0;
  CHECK(interp_rho(s, 0.05) == 1.0);
  CHECK(interp_rho(s, 0.95) == 2.0);
}
