#pragma once

// Closed forms and brute-force integrators used as independent references.
// Nothing here calls into the library.

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <vector>

namespace oracle_ref {

using cplx = std::complex<double>;

// Rectangular barrier of height v0 and length len: T = 1 / (1 + v0^2 sinh^2(kappa L) / (4 E (v0 - E))).
inline double rect_transmission(double v0, double len, double k) {
  const double e = 0.5 * k * k;
  if (v0 == 0.0) return 1.0;
  if (e < v0) {
    const double kappa = std::sqrt(2.0 * (v0 - e));
    const double s = std::sinh(kappa * len);
    return 1.0 / (1.0 + v0 * v0 * s * s / (4.0 * e * (v0 - e)));
  }
  if (e > v0) {
    const double q = std::sqrt(2.0 * (e - v0));
    const double s = std::sin(q * len);
    return 1.0 / (1.0 + v0 * v0 * s * s / (4.0 * e * (e - v0)));
  }
  return 1.0 / (1.0 + k * k * len * len / 4.0);
}

// A_T for incidence exp(ikx) on a rectangular barrier of length len; independent of its position.
inline cplx rect_amplitude_t(double v0, double len, double k) {
  const cplx q = std::sqrt(cplx(k * k - 2.0 * v0, 0.0));
  const cplx i{0.0, 1.0};
  const cplx denom = std::cos(q * len) - i * (q * q + k * k) / (2.0 * q * k) * std::sin(q * len);
  return std::exp(-i * k * len) / denom;
}

// Free Gaussian packet with initial width sigma, centre x0 and mean wavenumber k0.
inline cplx free_gaussian(double x, double t, double x0, double sigma, double k0) {
  const cplx i{0.0, 1.0};
  const cplx s2 = cplx(sigma * sigma, t);
  const double d = x - x0 - k0 * t;
  return std::pow(sigma * sigma / std::numbers::pi, 0.25) / std::sqrt(s2) *
         std::exp(i * (k0 * (x - x0) - 0.5 * k0 * k0 * t)) * std::exp(-d * d / (2.0 * s2));
}

struct Piece {
  double left, right, height;
};

// Integrates u'' = 2 (V - E) u from x_c (u = 0, u' = 1) leftwards to a with RK4,
// then matches u = alpha exp(ikx) + beta exp(-ikx) at a. The odd reflection
// sub-state is A_R u / beta, so its incident amplitude is A_R alpha / beta.
inline cplx odd_incident_amplitude(const std::vector<Piece>& pieces, double k, cplx a_r, int steps_per_piece = 4000) {
  const double e = 0.5 * k * k;
  const double a = pieces.front().left;
  const double xc = 0.5 * (pieces.front().left + pieces.back().right);
  double u = 0.0, du = 1.0, x = xc;
  for (auto it = pieces.rbegin(); it != pieces.rend(); ++it) {
    if (it->left >= xc) continue;
    const double hi = std::min(it->right, xc);
    const double h = -(hi - it->left) / steps_per_piece;
    const double c = 2.0 * (it->height - e);
    for (int s = 0; s < steps_per_piece; ++s) {
      const double k1u = du, k1d = c * u;
      const double k2u = du + 0.5 * h * k1d, k2d = c * (u + 0.5 * h * k1u);
      const double k3u = du + 0.5 * h * k2d, k3d = c * (u + 0.5 * h * k2u);
      const double k4u = du + h * k3d, k4d = c * (u + h * k3u);
      u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
      du += h / 6.0 * (k1d + 2.0 * k2d + 2.0 * k3d + k4d);
      x += h;
    }
  }
  (void)x;
  const cplx i{0.0, 1.0};
  const cplx alpha = 0.5 * (u + du / (i * k)) * std::exp(-i * k * a);
  const cplx beta = 0.5 * (u - du / (i * k)) * std::exp(i * k * a);
  return a_r * alpha / beta;
}

// Midpoint sum with n cells.
inline double riemann(const std::function<double(double)>& f, double lo, double hi, int n) {
  const double h = (hi - lo) / n;
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += f(lo + (i + 0.5) * h);
  return s * h;
}

}  // namespace oracle_ref
