#include "rhosolve/transport.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

namespace rhosolve {

namespace {

constexpr cplx kI{0.0, 1.0};

struct RayScratch {
  std::vector<ExpPair> E;
  std::vector<V2> fwd, bwd;
  void resize(int nx) {
    E.resize(nx);
    fwd.resize(nx + 1);
    bwd.resize(nx + 1);
  }
};

// One ray's BVP sweep through the frozen Qbar field: propagate the column
// known at each face across the slab, then assemble g on every plane.
// Returns false when the two columns become parallel (det -> 0), i.e. gamma
// sits on a resonance of the discretized problem.
bool propagate_ray(const TransportSetup& s, int i, cplx gamma,
                   const std::vector<M2>& Qmid, M2* g, RayScratch& ws) {
  const int nx = s.n_x;
  const double u = s.grid.upar[i];
  const double dx = 1.0 / nx;
  const double cl = -s.kl / (2.0 * u) * dx;
  const double ca = -s.ka / (2.0 * u) * dx;
  const bool pos = u > 0.0;

  for (int j = 0; j < nx; ++j) {
    const M2& q = Qmid[j];
    ws.E[j] = expm_traceless_pair({cl * q.a + ca, cl * q.b, cl * q.c, cl * q.d - ca});
  }

  // Face values of the known columns.  For u > 0 the incoming m- carries the
  // input port jump (1 + i gamma Lam+)(0,1)^T and the outgoing m+ the undone
  // output jump (1 + i Lam-)^-1 (1,0)^T; u < 0 rays meet the ports only
  // through their partner columns, so their boundary values stay bare.
  V2 vf, vb;
  if (pos) {
    vf = s.in_a[i] ? V2{kI * gamma, 1.0} : V2{0.0, 1.0};
    vb = s.in_b[i] ? V2{1.0, -kI} : V2{1.0, 0.0};
  } else {
    vf = {1.0, 0.0};
    vb = {0.0, 1.0};
  }
  vf = normalized(vf);
  vb = normalized(vb);

  ws.fwd[0] = vf;
  for (int j = 0; j < nx; ++j) ws.fwd[j + 1] = vf = normalized(apply(ws.E[j].fwd, vf));
  ws.bwd[nx] = vb;
  for (int j = nx - 1; j >= 0; --j) ws.bwd[j] = vb = normalized(apply(ws.E[j].inv, vb));

  for (int j = 0; j <= nx; ++j) {
    const V2& mp = pos ? ws.bwd[j] : ws.fwd[j];
    const V2& mm = pos ? ws.fwd[j] : ws.bwd[j];
    if (std::abs(mp.x * mm.y - mp.y * mm.x) < 1e-13) return false;
    g[j] = radiance_from_columns(mp, mm);
  }
  return true;
}

}  // namespace

TransportSetup make_transport(double L_over_ell, double L_over_ella,
                              const PortParams& ports, const SolveControls& ctl) {
  TransportSetup s;
  s.kl = L_over_ell;
  s.ka = L_over_ella;
  s.grid = angular_quadrature(ctl.n_ang, ctl.grazing_floor);
  s.in_a = aperture_mask(s.grid, ports.ma);
  s.in_b = aperture_mask(s.grid, ports.mb);
  s.n_x = ctl.n_x;
  return s;
}

TransportSetup make_two_stream(double L_over_ell, double L_over_ella,
                               const SolveControls& ctl) {
  TransportSetup s;
  s.kl = L_over_ell;
  s.ka = L_over_ella;
  s.grid = two_stream_grid();
  s.in_a.assign(s.grid.size(), 1);  // direction-averaged: no aperture resolution
  s.in_b.assign(s.grid.size(), 1);
  s.n_x = ctl.n_x;
  return s;
}

TransportResult solve_transport(const TransportSetup& setup, cplx gamma,
                                const SolveControls& ctl, const QField* seed) {
  const int na = setup.grid.size();
  const int nx = setup.n_x;
  const int np = nx + 1;
  if (seed && static_cast<int>(seed->size()) != np)
    throw std::invalid_argument("transport seed has wrong plane count");

  TransportResult r;
  r.g.assign(static_cast<std::size_t>(na) * np, M2{});
  QField Qt = seed ? *seed : QField(np, M2{});
  std::vector<M2> Qmid(nx);

  const int nt = std::max(1, std::min(setup.threads, na));
  std::atomic<int> bad{na};  // lowest degenerate ray index, na = none

  auto propagate_all = [&]() {
    for (int j = 0; j < nx; ++j) Qmid[j] = 0.5 * (Qt[j] + Qt[j + 1]);
    auto run = [&](int lo, int hi) {
      RayScratch ws;
      ws.resize(nx);
      for (int i = lo; i < hi; ++i) {
        if (!propagate_ray(setup, i, gamma, Qmid, &r.g[std::size_t(i) * np], ws)) {
          int cur = bad.load();
          while (i < cur && !bad.compare_exchange_weak(cur, i)) {
          }
          return;
        }
      }
    };
    if (nt == 1) {
      run(0, na);
    } else {
      std::vector<std::thread> pool;
      int base = na / nt, extra = na % nt, at = 0;
      for (int t = 0; t < nt; ++t) {
        int len = base + (t < extra ? 1 : 0);
        pool.emplace_back(run, at, at + len);
        at += len;
      }
      for (auto& th : pool) th.join();
    }
    return bad.load() == na;
  };

  auto accumulate = [&]() {
    QField Qn(np, M2{});
    for (int i = 0; i < na; ++i) {
      const M2* row = &r.g[std::size_t(i) * np];
      const cplx wi = setup.grid.w[i];
      for (int j = 0; j < np; ++j) Qn[j] += wi * row[j];
    }
    return Qn;
  };

  auto abort_point = [&](int it) {
    r.iterations = it;
    r.residual = std::numeric_limits<double>::infinity();
    r.diagnostic = "eigencolumn determinant underflow on ray " +
                   std::to_string(bad.load()) + "; gamma point aborted";
    return r;
  };

  if (!seed) {
    if (!propagate_all()) return abort_point(0);
    Qt = accumulate();
  }

  double beta = ctl.beta0;
  double last = std::numeric_limits<double>::infinity();
  double res = last;
  int it = 0;
  bool hit = false;
  for (it = 0; it < ctl.itmax; ++it) {
    if (!propagate_all()) return abort_point(it);
    QField Qn = accumulate();
    res = 0.0;
    for (int j = 0; j < np; ++j) res = std::max(res, (Qn[j] - Qt[j]).maxabs());
    if (res > last) beta = std::max(0.5 * beta, ctl.beta_min);
    last = res;
    for (int j = 0; j < np; ++j) Qt[j] = (1.0 - beta) * Qt[j] + beta * Qn[j];
    if (res <= ctl.tol) {
      hit = true;
      break;
    }
  }
  r.Qt = std::move(Qt);
  r.iterations = hit ? it + 1 : ctl.itmax;
  r.residual = res;
  r.converged = hit;
  r.F = generating_function(setup, r);
  return r;
}

cplx generating_function(const TransportSetup& setup, const TransportResult& res) {
  const std::size_t np = setup.n_x + 1;
  cplx acc = 0.0;
  for (int i = 0; i < setup.grid.size(); ++i)
    if (setup.in_a[i]) acc += setup.grid.fw[i] * res.g[i * np].c;
  return kI * acc;
}

ConstraintReport constraint_residuals(const TransportSetup& setup,
                                      const TransportResult& res, cplx gamma) {
  const int na = setup.grid.size();
  const std::size_t np = setup.n_x + 1;
  const M2 ja{1.0, kI * gamma, 0.0, 1.0}, ja_inv{1.0, -kI * gamma, 0.0, 1.0};
  const M2 jb{1.0, 0.0, kI, 1.0}, jb_inv{1.0, 0.0, -kI, 1.0};

  ConstraintReport rep;
  for (int i = 0; i < na; ++i) {
    const M2* row = &res.g[i * np];
    for (std::size_t j = 0; j < np; ++j) {
      rep.unipotency = std::max(rep.unipotency, (row[j] * row[j] - id2).maxabs());
      rep.trace = std::max(rep.trace, std::abs(row[j].trace()));
    }
    // Outside-the-port radiance must carry the vacuum structure: the incoming
    // column is a -1 eigencolumn (g12 = 0 there), the outgoing a +1 one
    // (g21 = 0), with the diagonal locked to +-1.
    const bool pos = setup.grid.upar[i] > 0.0;
    M2 g0 = row[0], gL = row[np - 1];
    if (pos && setup.in_a[i]) g0 = ja_inv * g0 * ja;   // undo input jump
    if (pos && setup.in_b[i]) gL = jb * gL * jb_inv;   // reapply output jump
    const M2& in = pos ? g0 : gL;
    const M2& out = pos ? gL : g0;
    double b = std::max({std::abs(in.b), std::abs(in.a - 1.0), std::abs(in.d + 1.0),
                         std::abs(out.c), std::abs(out.a - 1.0), std::abs(out.d + 1.0)});
    rep.boundary = std::max(rep.boundary, b);
  }
  return rep;
}

}  // namespace rhosolve
