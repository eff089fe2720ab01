#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace subscat {

/// Uniform grid x_i = origin + i * dx, i in [0, points).
struct UniformGrid {
  double origin = 0.0;
  double dx = 0.0;
  std::size_t points = 0;

  double at(std::size_t i) const { return origin + static_cast<double>(i) * dx; }
  double back() const { return at(points - 1); }
  std::vector<double> samples() const;

  /// Grid covering [lo, hi] with spacing <= dx that has `anchor` as a node.
  static UniformGrid anchored(double lo, double hi, double dx, double anchor);
  /// Index of the node closest to x.
  std::size_t nearest(double x) const;
};

/// End-corrected trapezoid weights on a uniform grid (the 3/8, 7/6, 23/24
/// closure, O(dx^4) for smooth integrands). Falls back to the plain trapezoid
/// rule below 8 points.
std::vector<double> uniform_weights(std::size_t points, double dx);

/// Integral of values on [0, points) split at node `split`, so a derivative
/// kink at that node does not degrade the order.
double integrate_uniform(std::span<const double> values, double dx, std::size_t split);
std::complex<double> integrate_uniform(std::span<const std::complex<double>> values, double dx, std::size_t split);

struct SimpsonResult {
  double value = 0.0;
  std::size_t evaluations = 0;
  bool partial_sums_monotone = true;  // meaningful for non-negative integrands
};

/// Adaptive Simpson over [a, b], started from `panels` equal panels so that
/// narrow features inside a long window are not skipped.
SimpsonResult adaptive_simpson(const std::function<double(double)>& f, double a, double b, double rel_tol,
                               std::size_t panels = 64, int max_depth = 40);

/// Adaptive Gauss-Kronrod (31 point) integral of a smooth function.
double integrate_smooth(const std::function<double(double)>& f, double a, double b, double rel_tol);

/// Fixed 20-point Gauss-Legendre rule mapped to [a, b].
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
QuadratureRule gauss_legendre(double a, double b);

/// Composite Gauss-Legendre rule over consecutive breakpoints, each piece
/// further split so no sub-piece exceeds max_piece.
QuadratureRule composite_gauss_legendre(std::span<const double> breakpoints, double max_piece);

}  // namespace subscat
