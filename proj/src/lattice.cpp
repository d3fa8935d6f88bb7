#include "rhosolve/lattice.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <thread>

#include <Eigen/LU>
#include <Eigen/SVD>

namespace rhosolve {

namespace {

constexpr double kPi2 = 2.0 * 3.14159265358979323846;
constexpr cplx kIc{0.0, 1.0};

// Slice operator A_n = k^2 - Laplacian - U (+ i eps inside the slab), with the
// lead self-energy folded into the first and last slices.
void fill_slice(const LatticeModel& m, const double* Ucol, bool touch_lead,
                Eigen::MatrixXcd& A) {
  const int Ny = m.Ny;
  A.setZero(Ny, Ny);
  const cplx dbase = -4.0 * m.c + m.k * m.k + cplx(0.0, m.eps_abs);
  for (int y = 0; y < Ny; ++y) {
    A(y, y) = dbase - Ucol[y];
    A(y, (y + 1) % Ny) += m.c;
    A(y, (y + Ny - 1) % Ny) += m.c;
  }
  if (touch_lead) A += m.Sigma;
}

Eigen::MatrixXcd inverted(const Eigen::MatrixXcd& M, int slice) {
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(M);
  auto d = lu.matrixLU().diagonal();
  double lo = d.cwiseAbs().minCoeff(), hi = d.cwiseAbs().maxCoeff();
  if (!(lo > hi * 1e-14))
    throw std::runtime_error("singular slice inversion at slice " +
                             std::to_string(slice));
  return lu.inverse();
}

}  // namespace

int LatticeModel::n_controlled(double m_ap) const {
  int n = 0;
  for (int idx : prop)
    if (std::abs(q[idx]) / k <= m_ap + 1e-12) ++n;
  return n;
}

LatticeModel make_lattice(double W_over_lambda, double L_over_W,
                          double L_over_ell, double L_over_ella,
                          double a_over_lambda, double nu_corr) {
  if (a_over_lambda > 0.125 + 1e-12)
    throw std::invalid_argument("lattice pitch above lambda/8: dispersion error too large");
  if (W_over_lambda <= 0.0 || L_over_W <= 0.0 || L_over_ell <= 0.0)
    throw std::invalid_argument("lattice geometry must be positive");

  LatticeModel m;
  m.a = a_over_lambda;
  m.k = kPi2;
  m.c = 1.0 / (m.a * m.a);
  const double W = W_over_lambda, L = L_over_W * W;
  m.Ny = static_cast<int>(std::lround(W / m.a));
  m.Nx = static_cast<int>(std::lround(L / m.a));
  if (m.Ny < 3 || m.Nx < 1) throw std::invalid_argument("lattice too small");
  m.ell = L / L_over_ell;
  m.alpha = 4.0 * m.k * nu_corr / m.ell;
  m.eps_abs = L_over_ella > 0.0 ? m.k / (L / L_over_ella) : 0.0;

  const int Ny = m.Ny;
  m.q.resize(Ny);
  m.zeta.resize(Ny);
  m.Phi.resize(Ny, Ny);
  for (int mm = 0; mm < Ny; ++mm) {
    int ms = mm > Ny / 2 ? mm - Ny : mm;
    m.q[mm] = kPi2 * ms / (Ny * m.a);
    double Em = m.k * m.k - (2.0 - 2.0 * std::cos(m.q[mm] * m.a)) / (m.a * m.a);
    double z = 1.0 - m.a * m.a * Em / 2.0;
    cplx zeta;
    if (std::abs(z) <= 1.0) {
      zeta = cplx(z, std::sqrt(1.0 - z * z));  // retarded: outgoing/decaying
      if (std::abs(z) < 1.0) {
        m.prop.push_back(mm);
        double kpar = std::acos(z) / m.a;
        m.v.push_back(2.0 / m.a * std::sin(kpar * m.a));
      }
    } else {
      zeta = z - (z > 0 ? 1.0 : -1.0) * std::sqrt(z * z - 1.0);
    }
    if (std::abs(zeta) > 1.0) zeta = 1.0 / zeta;
    m.zeta[mm] = zeta;
    for (int y = 0; y < Ny; ++y)
      m.Phi(y, mm) = std::exp(kIc * (m.q[mm] * y * m.a)) / std::sqrt(double(Ny));
  }
  m.Phi_p.resize(Ny, m.n_prop());
  for (int i = 0; i < m.n_prop(); ++i) m.Phi_p.col(i) = m.Phi.col(m.prop[i]);

  Eigen::VectorXcd cz(Ny);
  for (int mm = 0; mm < Ny; ++mm) cz(mm) = m.c * m.zeta[mm];
  m.Sigma = m.Phi * cz.asDiagonal() * m.Phi.adjoint();
  return m;
}

std::vector<double> disorder_realization(const LatticeModel& m, std::uint64_t seed) {
  std::vector<double> U(static_cast<std::size_t>(m.Ny) * m.Nx);
  std::mt19937_64 eng(seed);
  const double sd = std::sqrt(m.alpha) / m.a;
  // explicit Box-Muller: identical streams on every platform, unlike
  // std::normal_distribution
  auto uniform = [&eng]() { return ((eng() >> 11) + 1.0) * 0x1.0p-53; };  // (0,1]
  for (std::size_t i = 0; i < U.size(); i += 2) {
    double r = std::sqrt(-2.0 * std::log(uniform()));
    double phi = kPi2 * uniform();
    U[i] = sd * r * std::cos(phi);
    if (i + 1 < U.size()) U[i + 1] = sd * r * std::sin(phi);
  }
  return U;
}

GreenApply green_apply(const LatticeModel& m, const std::vector<double>& U,
                       const Eigen::MatrixXcd& B, bool keep_fields) {
  const int Ny = m.Ny, Nx = m.Nx;
  if (static_cast<int>(U.size()) != Ny * Nx)
    throw std::invalid_argument("disorder block does not match the lattice");
  Eigen::MatrixXcd A(Ny, Ny), g, P;
  std::vector<Eigen::MatrixXcd> store;
  if (keep_fields) store.reserve(Nx);
  for (int n = 0; n < Nx; ++n) {
    fill_slice(m, &U[static_cast<std::size_t>(n) * Ny], n == 0 || n == Nx - 1, A);
    if (n == 0) {
      g = inverted(A, n);
      P = g * B;
    } else {
      g = inverted(A - (m.c * m.c) * g, n);
      P = -m.c * (g * P);
    }
    if (keep_fields) store.push_back(g);
  }
  GreenApply out;
  out.at_exit = P;
  if (keep_fields) {
    // psi_n = g_n (B delta_{n0} - c psi_{n+1}), swept backward from the exit
    out.interior.resize(Nx);
    out.interior[Nx - 1] = P;
    for (int n = Nx - 2; n >= 0; --n) {
      Eigen::MatrixXcd rhs = -m.c * out.interior[n + 1];
      if (n == 0) rhs += B;
      out.interior[n] = store[n] * rhs;
    }
  }
  return out;
}

Eigen::MatrixXcd transmission_matrix(const LatticeModel& m,
                                     const std::vector<double>& U) {
  const int np = m.n_prop();
  Eigen::MatrixXcd W = green_apply(m, U, m.Phi_p).at_exit;
  Eigen::MatrixXcd M = m.Phi_p.adjoint() * W;
  Eigen::MatrixXcd t(np, np);
  for (int i = 0; i < np; ++i)
    for (int j = 0; j < np; ++j)
      t(i, j) = kIc / m.a * std::sqrt(m.v[i] * m.v[j]) * M(i, j);
  return t;
}

Eigen::MatrixXcd transmission_matrix_dense(const LatticeModel& m,
                                           const std::vector<double>& U) {
  const int Ny = m.Ny, Nx = m.Nx, N = Ny * Nx;
  Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(N, N), blk(Ny, Ny);
  for (int n = 0; n < Nx; ++n) {
    fill_slice(m, &U[static_cast<std::size_t>(n) * Ny], n == 0 || n == Nx - 1, blk);
    A.block(n * Ny, n * Ny, Ny, Ny) = blk;
    if (n + 1 < Nx) {
      A.block(n * Ny, (n + 1) * Ny, Ny, Ny) = m.c * Eigen::MatrixXcd::Identity(Ny, Ny);
      A.block((n + 1) * Ny, n * Ny, Ny, Ny) = m.c * Eigen::MatrixXcd::Identity(Ny, Ny);
    }
  }
  Eigen::MatrixXcd E = Eigen::MatrixXcd::Zero(N, m.n_prop());
  E.topRows(Ny) = m.Phi_p;
  Eigen::MatrixXcd X = A.partialPivLu().solve(E);
  Eigen::MatrixXcd M = m.Phi_p.adjoint() * X.bottomRows(Ny);
  const int np = m.n_prop();
  Eigen::MatrixXcd t(np, np);
  for (int i = 0; i < np; ++i)
    for (int j = 0; j < np; ++j)
      t(i, j) = kIc / m.a * std::sqrt(m.v[i] * m.v[j]) * M(i, j);
  return t;
}

Eigen::MatrixXcd aperture_filter(const LatticeModel& m, const Eigen::MatrixXcd& t,
                                 double ma, double mb) {
  std::vector<int> rows, cols;
  for (int i = 0; i < m.n_prop(); ++i) {
    double s = std::abs(m.q[m.prop[i]]) / m.k;
    if (s <= mb + 1e-12) rows.push_back(i);
    if (s <= ma + 1e-12) cols.push_back(i);
  }
  Eigen::MatrixXcd out(rows.size(), cols.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j)
      out(i, j) = t(rows[i], cols[j]);
  return out;
}

std::vector<double> transmission_eigenvalues(const Eigen::MatrixXcd& t) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(t);
  std::vector<double> T(svd.singularValues().size());
  for (std::size_t i = 0; i < T.size(); ++i) {
    double s = svd.singularValues()(i);
    T[i] = s * s;
  }
  return T;
}

EnsembleResult ensemble_spectrum(const LatticeModel& m, int n_real, int bins,
                                 std::uint64_t seed_base, double ma, double mb,
                                 int threads) {
  EnsembleResult out;
  out.realizations = n_real;
  out.channels = m.n_controlled(ma);

  std::vector<std::vector<double>> slot(n_real);
  std::vector<std::uint8_t> ok(n_real, 0);
  auto run = [&](int lo, int hi) {
    for (int r = lo; r < hi; ++r) {
      try {
        auto U = disorder_realization(m, seed_base + static_cast<std::uint64_t>(r));
        Eigen::MatrixXcd t = aperture_filter(m, transmission_matrix(m, U), ma, mb);
        slot[r] = transmission_eigenvalues(t);
        ok[r] = 1;
      } catch (const std::runtime_error&) {
        ok[r] = 0;  // counted below; realization skipped
      }
    }
  };
  const int nt = std::max(1, std::min(threads, n_real));
  if (nt == 1) {
    run(0, n_real);
  } else {
    std::vector<std::thread> pool;
    int base = n_real / nt, extra = n_real % nt, at = 0;
    for (int t = 0; t < nt; ++t) {
      int len = base + (t < extra ? 1 : 0);
      pool.emplace_back(run, at, at + len);
      at += len;
    }
    for (auto& th : pool) th.join();
  }

  int n_ok = 0;
  double sum = 0.0;
  for (int r = 0; r < n_real; ++r) {
    if (!ok[r]) {
      ++out.skipped;
      continue;
    }
    ++n_ok;
    for (double T : slot[r]) {
      out.samples.push_back(T);
      sum += T;
    }
  }
  if (n_ok == 0) throw std::runtime_error("every realization failed");
  out.mean_T = sum / (static_cast<double>(n_ok) * out.channels);
  out.hist = histogram_spectrum(out.samples, bins,
                                static_cast<double>(n_ok) * out.channels, "microsim");
  return out;
}

CalibrationResult calibrate_ell(const LatticeModel& m, int n_real,
                                std::uint64_t seed_base, int threads) {
  const int Nx = m.Nx, Ny = m.Ny;
  Eigen::MatrixXcd B = Eigen::MatrixXcd::Constant(Ny, 1, 1.0 / std::sqrt(double(Ny)));

  std::vector<std::vector<cplx>> slot(n_real);
  auto run = [&](int lo, int hi) {
    for (int r = lo; r < hi; ++r) {
      auto U = disorder_realization(m, seed_base + static_cast<std::uint64_t>(r));
      GreenApply G = green_apply(m, U, B, true);
      std::vector<cplx> amp(Nx);
      for (int n = 0; n < Nx; ++n) amp[n] = (B.adjoint() * G.interior[n])(0, 0);
      slot[r] = std::move(amp);
    }
  };
  const int nt = std::max(1, std::min(threads, n_real));
  if (nt == 1) {
    run(0, n_real);
  } else {
    std::vector<std::thread> pool;
    int base = n_real / nt, extra = n_real % nt, at = 0;
    for (int t = 0; t < nt; ++t) {
      int len = base + (t < extra ? 1 : 0);
      pool.emplace_back(run, at, at + len);
      at += len;
    }
    for (auto& th : pool) th.join();
  }

  std::vector<cplx> mean(Nx, 0.0);
  for (int r = 0; r < n_real; ++r)
    for (int n = 0; n < Nx; ++n) mean[n] += slot[r][n];

  CalibrationResult res;
  res.ell_target = m.ell;
  res.realizations = n_real;
  res.fit_lo = static_cast<int>(std::lround(0.15 * Nx));
  res.fit_hi = static_cast<int>(std::lround(0.85 * Nx));
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int cnt = 0;
  for (int n = res.fit_lo; n < res.fit_hi; ++n) {
    double x = m.a * n, y = std::log(std::abs(mean[n]));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++cnt;
  }
  res.slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
  res.ell_fit = res.slope < 0.0 ? -1.0 / (2.0 * res.slope)
                                : std::numeric_limits<double>::infinity();
  return res;
}

}  // namespace rhosolve
