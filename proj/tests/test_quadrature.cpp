#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "rhosolve/quadrature.hpp"

using namespace rhosolve;

TEST_CASE("Gauss-Legendre integrates polynomials exactly") {
  GaussLegendre gl(6);  // exact through degree 11 on [-1, 1]
  for (int p = 0; p <= 11; ++p) {
    double acc = 0.0;
    for (std::size_t i = 0; i < gl.x.size(); ++i)
      acc += gl.w[i] * std::pow(gl.x[i], p);
    double exact = (p % 2 == 0) ? 2.0 / (p + 1) : 0.0;
    CHECK(std::abs(acc - exact) < 1e-14);
  }
}

TEST_CASE("angular grid reproduces the circle moments to machine precision") {
  for (int n : {16, 32, 64, 128}) {
    AngularGrid g = angular_quadrature(n);
    REQUIRE(g.size() == n);
    double w_tot = 0.0, flux_fwd = 0.0, u2 = 0.0, fw_fwd = 0.0, fw_tot = 0.0;
    for (int i = 0; i < g.size(); ++i) {
      w_tot += g.w[i];
      u2 += g.w[i] * g.upar[i] * g.upar[i];
      fw_tot += g.fw[i];
      if (g.upar[i] > 0.0) {
        flux_fwd += g.w[i] * g.upar[i];
        fw_fwd += g.fw[i];
      }
      // on the unit circle
      CHECK(std::abs(g.upar[i] * g.upar[i] + g.uperp[i] * g.uperp[i] - 1.0) < 1e-14);
    }
    CHECK(std::abs(w_tot - 1.0) < 1e-13);                 // (1/2pi) int dtheta
    CHECK(std::abs(flux_fwd - 1.0 / kPi) < 1e-13);        // half-space flux
    CHECK(std::abs(u2 - 0.5) < 1e-13);                    // <cos^2>
    CHECK(std::abs(fw_fwd - 0.5) < 1e-13);                // (pi/2) w u over u > 0
    CHECK(std::abs(fw_tot) < 1e-13);                      // odd in u
  }
}

TEST_CASE("grazing floor rejects grids that would reach the floor") {
  AngularGrid g = angular_quadrature(128);
  CHECK(g.min_abs_upar() >= kGrazingFloor);
  CHECK_THROWS_AS(angular_quadrature(1024), std::invalid_argument);
  CHECK_NOTHROW(angular_quadrature(1024, 1e-8));
  CHECK_THROWS_AS(angular_quadrature(30), std::invalid_argument);  // not mult of 4
}

TEST_CASE("two-stream grid carries half-space moment weights") {
  AngularGrid g = two_stream_grid();
  REQUIRE(g.size() == 2);
  CHECK(g.upar[0] == doctest::Approx(kMu).epsilon(1e-15));
  CHECK(g.upar[1] == doctest::Approx(-kMu).epsilon(1e-15));
  CHECK(g.w[0] == 0.5);
  CHECK(g.w[1] == 0.5);
  CHECK(g.fw[0] == 0.5);
  CHECK(g.fw[1] == -0.5);
}

TEST_CASE("aperture mask selects transverse momenta inside the cone") {
  AngularGrid g = angular_quadrature(64);
  auto full = aperture_mask(g, 1.0);
  auto half = aperture_mask(g, 0.5);
  int n_full = 0, n_half = 0;
  for (int i = 0; i < g.size(); ++i) {
    n_full += full[i];
    n_half += half[i];
    CHECK(half[i] == (std::abs(g.uperp[i]) <= 0.5 ? 1 : 0));
  }
  CHECK(n_full == g.size());
  CHECK(n_half > 0);
  CHECK(n_half < g.size());
}
