#pragma once
// Direction-space quadrature on the unit circle.  Nodes are Gauss-Legendre in
// the polar angle theta, replicated over four quadrants so the grid is exactly
// symmetric under upar -> -upar and uperp -> -uperp.  Weights discretize the
// normalized measure dOmega/S_2 = dtheta/2pi and sum to 1.
//
// The flux weights fw discretize the generating-function integral
//   F = i * sum_{|uperp|<=m_a} fw_i Tr[g_i Lam+],   fw_i = (pi/2) w_i upar_i,
// i.e. dOmega upar / 2V_1 of the aperture-filtered flux average.  The
// degenerate two-stream grid (+-mu with weights 1/2) replaces them by the
// half-space moments +-1/2, which is what the direction-averaged reduction
// actually integrates.

#include <cstdint>
#include <vector>

namespace rhosolve {

inline constexpr double kPi = 3.14159265358979323846;
// mean direction cosine mu = V_2/(2 V_1) in d = 2
inline constexpr double kMu = kPi / 4.0;

struct GaussLegendre {
  std::vector<double> x, w;  // nodes and weights on (-1, 1)
};
GaussLegendre gauss_legendre(int n);

struct AngularGrid {
  std::vector<double> upar;   // Omega_parallel = cos(theta)
  std::vector<double> uperp;  // Omega_perp = sin(theta)
  std::vector<double> w;      // normalized measure weights, sum = 1
  std::vector<double> fw;     // flux weights for F (signed)
  bool two_stream = false;
  int size() const { return static_cast<int>(upar.size()); }
  double min_abs_upar() const;
};

inline constexpr double kGrazingFloor = 1e-3;

// n_nodes: total node count, multiple of 4, >= 4.  Throws std::invalid_argument
// on a bad count or when the grid violates the grazing floor (override with
// floor = 0 to allow deep-grazing grids).
AngularGrid angular_quadrature(int n_nodes, double floor = kGrazingFloor);

AngularGrid two_stream_grid();

// Sharp aperture test at node positions: inside iff |uperp| <= m.
std::vector<std::uint8_t> aperture_mask(const AngularGrid& grid, double m);

}  // namespace rhosolve
