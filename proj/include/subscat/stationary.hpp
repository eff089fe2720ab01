#pragma once

#include <complex>
#include <cstdint>
#include <memory>
#include <shared_mutex>
#include <span>
#include <unordered_map>
#include <vector>

#include "subscat/potentials.hpp"

namespace subscat {

using cplx = std::complex<double>;

/// Field value and first derivative at a point.
struct FieldPoint {
  cplx value;
  cplx slope;
};

enum class Regime { oscillatory, evanescent, linear };

/// Closed-form solution inside one constant-potential segment [left, right].
///
///   oscillatory: first * exp(+i q (x-left))  + second * exp(-i q (x-left))
///   evanescent:  first * exp(-kappa (x-left)) + second * exp(+kappa (x-right))
///   linear:      first + second * (x-left)
///
/// Both evanescent basis functions are bounded by 1 inside the segment, so
/// opaque segments never produce overflowing intermediates.
struct SegmentField {
  double left = 0.0;
  double right = 0.0;
  Regime regime = Regime::oscillatory;
  double rate = 0.0;  // q or kappa
  cplx first;
  cplx second;

  FieldPoint evaluate(double x) const;
};

/// Stationary scattering state for incidence from the left:
///   x < a: exp(ikx) + a_r exp(-ikx)
///   x > b: a_t exp(ikx)
class ScatteringSolution {
 public:
  double k = 0.0;
  double energy = 0.0;
  cplx a_t;
  cplx a_r;
  double t_coef = 0.0;
  double r_coef = 0.0;

  double left() const { return left_; }
  double right() const { return right_; }
  double center() const { return 0.5 * (left_ + right_); }
  std::span<const SegmentField> segments() const { return segments_; }

  cplx field(double x) const { return field_and_slope(x).value; }
  FieldPoint field_and_slope(double x) const;

  /// |T + R - 1|
  double unitarity_residual() const { return std::abs(t_coef + r_coef - 1.0); }

 private:
  friend ScatteringSolution solve_stationary(const BarrierSpec&, double);
  double left_ = 0.0;
  double right_ = 0.0;
  std::vector<SegmentField> segments_;
};

/// Threshold below which E is treated as equal to a segment height.
inline double degenerate_energy_window(double height) { return 1e-12 * std::max(1.0, std::abs(height)); }

/// Transfer-matrix solution of the stationary equation at wavenumber k > 0.
ScatteringSolution solve_stationary(const BarrierSpec& barrier, double k);

/// Samples of the full stationary field on a sorted grid.
std::vector<cplx> evaluate_full(const ScatteringSolution& sol, std::span<const double> xs);

/// j = Im(conj(psi) psi') by central differences on a uniform grid; one value
/// per interior point (size n - 2).
std::vector<double> probability_current(std::span<const cplx> field, double dx);

/// Thread-safe memo of solutions for one barrier, keyed by the exact bits of k.
class SolutionCache {
 public:
  explicit SolutionCache(BarrierSpec barrier) : barrier_(std::move(barrier)) {}

  std::shared_ptr<const ScatteringSolution> get(double k);
  std::size_t size() const;
  const BarrierSpec& barrier() const { return barrier_; }

 private:
  BarrierSpec barrier_;
  mutable std::shared_mutex mutex_;
  std::unordered_map<std::uint64_t, std::shared_ptr<const ScatteringSolution>> entries_;
};

}  // namespace subscat
