#pragma once

#include <span>
#include <vector>

#include "subscat/potentials.hpp"
#include "subscat/stationary.hpp"
#include "subscat/wavepacket.hpp"

namespace subscat {

/// Uniform grid [x_min, x_max] with `points` nodes and a time step.
struct GridSpec {
  double x_min = 0.0;
  double x_max = 0.0;
  std::size_t points = 0;
  double dt = 0.0;

  double step() const { return (x_max - x_min) / static_cast<double>(points - 1); }
  double at(std::size_t i) const { return x_min + step() * static_cast<double>(i); }
  /// Throws ErrorKind::domain unless points >= 3, x_max > x_min and (if need_dt) dt > 0.
  void validate(bool need_dt) const;
};

struct NumerovResult {
  std::vector<double> xs;  // nodes from a - h to b + h
  std::vector<cplx> field;  // normalised to unit incident amplitude
  cplx a_t;
  cplx a_r;
  double t_coef = 0.0;
  double r_coef = 0.0;
  double points_per_wavelength = 0.0;  // at the finest local scale
};

/// Numerov integration from the transmitted side towards a. Each segment gets
/// its own uniform step no larger than grid.step(); segment edges are crossed
/// with a fourth-order Taylor stencil. Requires >= 50 points per shortest
/// local wavelength (2 pi / max(q, kappa)), else ErrorKind::numerical.
NumerovResult numerov_solve(const BarrierSpec& barrier, double k, const GridSpec& grid);

/// Grid over [a, b] with the requested resolution at wavenumber k.
GridSpec numerov_grid(const BarrierSpec& barrier, double k, double points_per_wavelength);

struct CrankNicolsonOptions {
  double c_acc = 1000.0;          // dt <= c_acc * dx^2
  double edge_threshold = 1e-10;  // density allowed next to the walls
  double norm_drift = 1e-12;      // per step
};

/// Crank-Nicolson propagator with hard walls at both grid ends and the
/// potential averaged over each cell.
class CrankNicolson {
 public:
  CrankNicolson(const BarrierSpec& barrier, const GridSpec& grid, std::vector<cplx> initial,
                CrankNicolsonOptions options = {});

  void step();
  void advance(std::size_t steps);

  double time() const { return time_; }
  std::size_t steps_taken() const { return steps_; }
  std::span<const cplx> field() const { return psi_; }
  const GridSpec& grid() const { return grid_; }
  double norm() const;
  double max_norm_drift() const { return max_drift_; }

 private:
  void check_edges() const;

  GridSpec grid_;
  CrankNicolsonOptions options_;
  std::vector<cplx> psi_;
  std::vector<cplx> diag_;       // (1 + i dt H / 2) diagonal
  std::vector<cplx> pivot_inv_;  // Thomas elimination, factored once
  std::vector<cplx> scratch_;
  cplx off_;
  double norm_ = 0.0;
  double time_ = 0.0;
  std::size_t steps_ = 0;
  double max_drift_ = 0.0;
};

/// One step of the scheme above (convenience wrapper; builds the matrix each call).
std::vector<cplx> crank_nicolson_step(std::span<const cplx> field, const BarrierSpec& barrier, const GridSpec& grid,
                                      double dt);

struct OracleComparison {
  std::vector<double> times;
  std::vector<double> l2;  // || spectral - Crank-Nicolson ||_2 at each time
  double max_l2 = 0.0;
  std::size_t steps = 0;
  double max_norm_drift = 0.0;
};

/// Starts Crank-Nicolson from the synthesised full packet at t_begin and
/// compares with the synthesis at `checkpoints` evenly spaced times up to t_end.
OracleComparison compare_with_crank_nicolson(const PacketEvolution& evolution, double t_begin, double t_end, double dx,
                                             double dt, std::size_t checkpoints);

}  // namespace subscat
