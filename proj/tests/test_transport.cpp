#include <cmath>
#include <complex>

#include "doctest.h"
#include "rhosolve/diffusive.hpp"
#include "rhosolve/transport.hpp"

using namespace rhosolve;

namespace {

TransportSetup setup_full(double kl, double ka, int n_ang, int n_x, double ma = 1.0,
                          double mb = 1.0) {
  SolveControls ctl;
  ctl.n_ang = n_ang;
  ctl.n_x = n_x;
  PortParams ports{ma, mb};
  return make_transport(kl, ka, ports, ctl);
}

}  // namespace

TEST_CASE("empty medium reproduces the open-channel pole exactly") {
  // no scattering, no absorption: every channel transmits, F = 1/(1 - gamma)
  SolveControls ctl;
  ctl.n_ang = 32;
  ctl.n_x = 20;
  TransportSetup setup = setup_full(1e-12, 0.0, 32, 20);
  for (cplx gamma : {cplx(-1.0, 0.0), cplx(0.5, 0.0), cplx(2.0, 0.5)}) {
    TransportResult r = solve_transport(setup, gamma, ctl);
    CHECK(r.converged);
    CHECK(std::abs(r.F - 1.0 / (1.0 - gamma)) < 1e-9);
  }
}

TEST_CASE("frozen generating-function values") {
  SolveControls ctl;
  ctl.n_ang = 64;
  ctl.n_x = 200;
  // [DERIVED: validated reference implementation, mixing tol 1e-10]
  {
    TransportSetup setup = setup_full(5.0, 0.0, 64, 200);
    TransportResult r = solve_transport(setup, cplx(-1.0, 0.0), ctl);
    CHECK(r.converged);
    CHECK(std::abs(r.F - 0.146069129611) < 2e-9);
  }
  {
    TransportSetup setup = setup_full(5.0, 0.0, 64, 200);
    TransportResult r = solve_transport(setup, cplx(2.0, 0.5), ctl);
    CHECK(r.converged);
    CHECK(std::abs(r.F - cplx(-0.066635757322, 0.256022504486)) < 2e-9);
  }
  {
    SolveControls bctl;
    bctl.n_ang = 32;
    bctl.n_x = 16;
    TransportSetup setup = setup_full(1e-3, 0.0, 32, 16);
    TransportResult r = solve_transport(setup, cplx(-1.0, 0.0), bctl);
    CHECK(r.converged);
    CHECK(std::abs(r.F - 0.499803651096) < 2e-9);
  }
}

TEST_CASE("constraint residuals vanish to rounding") {
  SolveControls ctl;
  ctl.n_ang = 32;
  ctl.n_x = 200;
  TransportSetup setup = setup_full(5.0, 0.0, 32, 200);
  TransportResult r = solve_transport(setup, cplx(-1.0, 0.0), ctl);
  REQUIRE(r.converged);
  ConstraintReport c = constraint_residuals(setup, r, cplx(-1.0, 0.0));
  CHECK(c.unipotency < 1e-10);
  CHECK(c.trace < 1e-12);
  CHECK(c.boundary < 1e-10);
}

TEST_CASE("warm start agrees with cold start") {
  SolveControls ctl;
  ctl.n_ang = 32;
  ctl.n_x = 200;
  TransportSetup setup = setup_full(5.0, 0.0, 32, 200);
  TransportResult cold = solve_transport(setup, cplx(2.0, 0.5), ctl);
  TransportResult near = solve_transport(setup, cplx(2.0, 0.6), ctl);
  TransportResult warm = solve_transport(setup, cplx(2.0, 0.5), ctl, &near.Qt);
  REQUIRE(cold.converged);
  REQUIRE(warm.converged);
  CHECK(std::abs(warm.F - cold.F) < 1e-8);
  CHECK(warm.iterations <= cold.iterations);
}

TEST_CASE("absorption suppresses the mean transmission") {
  SolveControls ctl;
  ctl.n_ang = 32;
  ctl.n_x = 200;
  TransportSetup lossless = setup_full(5.0, 0.0, 32, 200);
  TransportSetup lossy = setup_full(5.0, 1.0, 32, 200);
  cplx g0(1e-9, 0.0);
  TransportResult a = solve_transport(lossless, g0, ctl);
  TransportResult b = solve_transport(lossy, g0, ctl);
  REQUIRE(a.converged);
  REQUIRE(b.converged);
  CHECK(b.F.real() < a.F.real());
  CHECK(b.F.real() > 0.0);
}

TEST_CASE("thread budget does not change the bits") {
  SolveControls ctl;
  ctl.n_ang = 32;
  ctl.n_x = 150;
  TransportSetup s1 = setup_full(5.0, 0.5, 32, 150);
  TransportSetup s4 = s1;
  s1.threads = 1;
  s4.threads = 4;
  TransportResult r1 = solve_transport(s1, cplx(2.0, 0.5), ctl);
  TransportResult r4 = solve_transport(s4, cplx(2.0, 0.5), ctl);
  REQUIRE(r1.converged);
  REQUIRE(r4.converged);
  CHECK(r1.F.real() == r4.F.real());
  CHECK(r1.F.imag() == r4.F.imag());
  CHECK(r1.iterations == r4.iterations);
}

TEST_CASE("two-stream solver lands on the diffusive closed form") {
  SolveControls ctl;
  ctl.n_x = 1500;
  ctl.tol = 1e-12;
  ctl.itmax = 200000;
  TransportSetup ts = make_two_stream(2.0, 0.0, ctl);
  cplx gamma(-1.0, 0.0);
  TransportResult r = solve_transport(ts, gamma, ctl);
  REQUIRE(r.converged);
  RootResult d = dmpk_fixed_point(gamma, spreading_parameter(2.0));
  REQUIRE(d.converged);
  CHECK(std::abs(r.F - d.F) < 1e-5);
  // empty two-stream medium also reproduces the pole exactly
  TransportSetup empty = make_two_stream(1e-12, 0.0, ctl);
  TransportResult e = solve_transport(empty, gamma, ctl);
  CHECK(std::abs(e.F - 0.5) < 1e-10);
}
