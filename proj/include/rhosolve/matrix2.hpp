#pragma once
// Dense complex 2x2 algebra for the matrix radiance g and its parametrization
// g = M Lam3 M^-1.  Everything is by-value; these matrices live in hot loops.

#include <array>
#include <cmath>
#include <complex>

namespace rhosolve {

using cplx = std::complex<double>;

struct M2 {
  cplx a, b, c, d;  // [[a, b], [c, d]]

  friend M2 operator+(const M2& x, const M2& y) {
    return {x.a + y.a, x.b + y.b, x.c + y.c, x.d + y.d};
  }
  friend M2 operator-(const M2& x, const M2& y) {
    return {x.a - y.a, x.b - y.b, x.c - y.c, x.d - y.d};
  }
  friend M2 operator*(const M2& x, const M2& y) {
    return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d,
            x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
  }
  friend M2 operator*(cplx s, const M2& x) {
    return {s * x.a, s * x.b, s * x.c, s * x.d};
  }
  M2& operator+=(const M2& y) {
    a += y.a; b += y.b; c += y.c; d += y.d;
    return *this;
  }
  cplx trace() const { return a + d; }
  cplx det() const { return a * d - b * c; }
  double maxabs() const {
    return std::max(std::max(std::abs(a), std::abs(b)),
                    std::max(std::abs(c), std::abs(d)));
  }
};

inline constexpr M2 id2{1.0, 0.0, 0.0, 1.0};
inline constexpr M2 lam3{1.0, 0.0, 0.0, -1.0};
inline constexpr M2 lam_plus{0.0, 1.0, 0.0, 0.0};
inline constexpr M2 lam_minus{0.0, 0.0, 1.0, 0.0};

struct V2 {
  cplx x, y;
};

inline V2 apply(const M2& m, const V2& v) {
  return {m.a * v.x + m.b * v.y, m.c * v.x + m.d * v.y};
}

inline V2 normalized(const V2& v) {
  double n = std::sqrt(std::norm(v.x) + std::norm(v.y));
  return {v.x / n, v.y / n};
}

// exp(+A) and exp(-A) for traceless A, via exp(A) = cosh(s) I + sinhc(s) A
// with s^2 = -det(A).  Exact up to roundoff; the pair gives an exact inverse.
struct ExpPair {
  M2 fwd, inv;
};

inline ExpPair expm_traceless_pair(const M2& A) {
  cplx s2 = -A.det();
  cplx ch, f;
  if (std::abs(s2) < 1e-12) {
    // series keeps full accuracy through the removable point s = 0
    ch = 1.0 + s2 * (0.5 + s2 / 24.0);
    f = 1.0 + s2 * (1.0 / 6.0 + s2 / 120.0);
  } else {
    cplx s = std::sqrt(s2);
    cplx e = std::exp(s), ei = 1.0 / e;
    ch = 0.5 * (e + ei);
    f = 0.5 * (e - ei) / s;
  }
  M2 fwd{ch + f * A.a, f * A.b, f * A.c, ch + f * A.d};
  M2 inv{ch - f * A.a, -f * A.b, -f * A.c, ch - f * A.d};
  return {fwd, inv};
}

// g from the eigencolumns m+ = (a,b), m- = (c,d):  g = M Lam3 M^-1.
// Traceless with g^2 = 1 by construction.
inline M2 radiance_from_columns(const V2& mp, const V2& mm) {
  cplx det = mp.x * mm.y - mp.y * mm.x;
  cplx diag = (mp.x * mm.y + mp.y * mm.x) / det;
  return {diag, -2.0 * mp.x * mm.x / det, 2.0 * mp.y * mm.y / det, -diag};
}

}  // namespace rhosolve
