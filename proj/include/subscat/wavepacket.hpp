#pragma once

#include <span>
#include <string>
#include <vector>

#include "subscat/decomposition.hpp"
#include "subscat/potentials.hpp"
#include "subscat/quadrature.hpp"
#include "subscat/stationary.hpp"

namespace subscat {

struct PacketParams {
  double x0 = 0.0;     // initial centre
  double sigma = 1.0;  // spatial width
  double k0 = 1.0;     // central wavenumber
  std::size_t k_points = 2048;
  double half_width_sigmas = 6.5;  // k-grid spans k0 +- half_width_sigmas / sigma, clipped at 0
};

/// g(k) and G(k) = g(k) - g(-k) sampled on a uniform k-grid. G is scaled so
/// that sum_k w_k |G_k|^2 = 1 on the grid (trapezoid weights w).
struct SpectralPacket {
  PacketParams params;
  double dk = 0.0;
  std::vector<double> ks;
  std::vector<double> weights;
  std::vector<cplx> g;
  std::vector<cplx> big_g;
  double raw_norm = 0.0;           // sum w |G|^2 before rescaling
  double negative_fraction = 0.0;  // share of |g|^2 at k <= 0
  double tail_ratio = 0.0;         // max |G| at the two cutoffs / max |G|
};

/// Gaussian packet centred at x0 with width sigma and mean wavenumber k0:
///   g(k) = (sigma^2/pi)^(1/4) exp(-sigma^2 (k-k0)^2 / 2) exp(-i k x0)
/// Rejects packets that overlap the barrier (x0 + 5 sigma >= a) or carry
/// non-negligible k <= 0 content (k0 sigma < 5).
SpectralPacket make_gaussian_packet(const BarrierSpec& barrier, const PacketParams& params);

enum class Component { full, tr, ref };

struct Snapshot {
  double t = 0.0;
  UniformGrid grid;
  std::vector<cplx> full;
  std::vector<cplx> tr;
  std::vector<cplx> ref;
};

struct SnapshotScalars {
  double t = 0.0;
  double norm_full = 0.0;
  double transmitted = 0.0;  // <psi_tr|psi_tr>
  double reflected = 0.0;    // <psi_ref|psi_ref>
  double overlap_re = 0.0;   // Re <psi_tr|psi_ref>
  double overlap_im = 0.0;
};

/// Time-dependent packets assembled from the stationary sub-states:
///   field(x, t) = (2 pi)^(-1/2) sum_k w_k G(k) phi(x; k) exp(-i E(k) t)
/// with phi one of Psi_full, psi_tr, psi_ref. Stationary solutions are
/// computed once per k-node at construction; all queries are const and
/// thread-safe.
class PacketEvolution {
 public:
  PacketEvolution(BarrierSpec barrier, SpectralPacket packet);

  const BarrierSpec& barrier() const { return barrier_; }
  const SpectralPacket& packet() const { return packet_; }

  /// Nodes with k > 0 (a k = 0 node carries G = 0 and is skipped).
  std::span<const double> ks() const { return ks_; }
  std::span<const double> weights() const { return weights_; }
  std::span<const cplx> spectrum() const { return big_g_; }
  std::span<const Decomposition> states() const { return states_; }

  /// sum w |G|^2 T(k) and sum w |G|^2 R(k).
  double transmission() const { return transmission_; }
  double reflection() const { return reflection_; }
  double max_speed() const { return ks_.empty() ? 0.0 : ks_.back(); }

  /// c_k(t) = w_k G_k exp(-i E_k t) / sqrt(2 pi), one per active node.
  std::vector<cplx> coefficients(double t) const;

  std::vector<cplx> synthesize(Component component, double t, std::span<const double> xs) const;
  Snapshot snapshot(double t, const UniformGrid& grid) const;

  /// Grid over [x0 - 10 sigma - v t_max, b + v t_max] with x_c as a node.
  UniformGrid default_grid(double t_max, double dx) const;

  /// |norm(full k-grid) - norm(every other k-node)| at time t.
  double aliasing_drift(double t, const UniformGrid& grid) const;
  /// Throws ErrorKind::numerical when aliasing_drift exceeds 1e-4.
  void verify_k_resolution(double t, const UniformGrid& grid) const;

 private:
  struct Fields {
    std::vector<cplx> full, tr, ref;
  };
  Fields synthesize_all(std::span<const cplx> coeffs, std::span<const std::size_t> nodes,
                        std::span<const double> xs, bool substates) const;

  BarrierSpec barrier_;
  SpectralPacket packet_;
  std::vector<double> ks_;
  std::vector<double> weights_;
  std::vector<cplx> big_g_;
  std::vector<Decomposition> states_;
  double transmission_ = 0.0;
  double reflection_ = 0.0;
};

/// Inner products of a snapshot (end-corrected trapezoid, split at x_c).
/// Throws ErrorKind::numerical when |Psi_full|^2 at either grid end exceeds 1e-10.
SnapshotScalars norms_and_overlap(const Snapshot& snapshot, double center);

/// Tolerances for the snapshot invariants.
struct SnapshotTolerances {
  double norm = 1e-6;
  double sum = 1e-6;      // |T_t + R_t - 1|
  double overlap = 1e-6;  // |Re <psi_tr|psi_ref>|
};

/// Human-readable list of violated snapshot invariants (empty when all hold).
std::vector<std::string> snapshot_violations(const SnapshotScalars& s, const SnapshotTolerances& tol = {});

}  // namespace subscat
