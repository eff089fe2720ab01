#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "subscat/decomposition.hpp"
#include "subscat/wavepacket.hpp"

namespace subscat {

/// tau_dwell_tr = (1 / (k T)) * int_a^b |psi_tr|^2 dx
double dwell_time_tr(const Decomposition& dec);
/// tau_dwell_ref = (1 / (k R)) * int_a^{x_c} |psi_ref|^2 dx.
/// Throws ErrorKind::undefined when R <= 1e-12.
double dwell_time_ref(const Decomposition& dec);

enum class Subprocess { transmission, reflection };

struct RouteAOptions {
  /// Spatial interval; defaults to [a, b] for transmission and [a, x_c] for reflection.
  std::optional<std::pair<double, double>> domain;
  /// Time window; auto-detected when empty. A supplied window whose end
  /// values exceed threshold * peak is rejected.
  std::optional<std::pair<double, double>> window;
  double rel_tol = 1e-8;
  double threshold = 1e-10;
};

struct RouteAResult {
  double time = 0.0;
  double t_lo = 0.0;
  double t_hi = 0.0;
  double tail = 0.0;  // max end-point integrand / peak
  std::size_t evaluations = 0;
  bool monotone = true;
};

/// (1/N) int dt int_domain |psi(x, t)|^2 dx with N the spectral norm of the
/// sub-process (sum w |G|^2 T(k) or the R analogue).
RouteAResult larmor_time_route_a(const PacketEvolution& evolution, Subprocess which, const RouteAOptions& options = {});

enum class SpectralWeight {
  printed,  // G(k)
  squared,  // |G(k)|^2
};

struct RouteBResult {
  cplx time;         // (1/N) sum w W(k) P(k) tau_dwell(k)
  cplx weight_norm;  // (1/N) sum w W(k) P(k); N = sum w |G|^2 P(k)
};

/// k-domain form with per-k dwell times. `dwell` holds one entry per active
/// node of the evolution; pass dwell_table() output.
RouteBResult larmor_time_route_b(const PacketEvolution& evolution, Subprocess which, std::span<const double> dwell,
                                 SpectralWeight weight);

/// Dwell times at every active node of the packet grid (parallel over k).
std::vector<double> dwell_table(const PacketEvolution& evolution, Subprocess which);

/// Stationary-phase times from d(arg A)/dE (fourth-order central differences
/// with one Richardson step):
///   transmission_delay = d arg A_T / dE
///   traversal          = transmission_delay + (b - a) / k
///   reflection_delay   = d arg A_R / dE - 2 a / k
struct PhaseTime {
  double k = 0.0;
  double transmission_delay = 0.0;
  double traversal = 0.0;
  double reflection_delay = 0.0;
};

/// rel_step is the initial energy step over E. The step is cut by 4 (up to
/// ten times) while neighbouring phases differ by pi/2 or more, which happens
/// next to zeros of A_R; ErrorKind::numerical if that does not help.
PhaseTime phase_time(const BarrierSpec& barrier, double k, double rel_step = 1e-3);
std::vector<PhaseTime> phase_time_table(const BarrierSpec& barrier, std::span<const double> ks,
                                        double rel_step = 1e-3);

struct LarmorTimes {
  RouteAResult route_a;
  RouteBResult route_b_printed;
  RouteBResult route_b_squared;
  double norm = 0.0;  // spectral T or R
  /// |A - B| / |B| against the printed and the squared weights.
  double residual_printed = 0.0;
  double residual_squared = 0.0;
};

struct TimeReport {
  std::vector<double> ks;
  std::vector<double> dwell_tr;
  std::vector<double> dwell_ref;  // NaN where R <= 1e-12
  LarmorTimes larmor_tr;
  std::optional<LarmorTimes> larmor_ref;  // empty when the packet is not reflected
  /// Route A over [a, b] for reflection, for comparison with [a, x_c].
  std::optional<double> ref_full_barrier;
  std::vector<PhaseTime> phase;
};

TimeReport compute_time_report(const PacketEvolution& evolution, const RouteAOptions& options = {});

}  // namespace subscat
