#pragma once

#include <span>
#include <string>
#include <vector>

#include "subscat/potentials.hpp"
#include "subscat/stationary.hpp"
#include "subscat/wavepacket.hpp"

namespace subscat {

/// A field along z confined to [a, b] splits the barrier into V - omega/2 for
/// spin up and V + omega/2 for spin down. The spin starts along +x.
struct SpinAmplitudes {
  cplx t_plus;
  cplx t_minus;
  cplx r_plus;
  cplx r_minus;
};

SpinAmplitudes spin_resolved_amplitudes(const BarrierSpec& barrier, double omega, double k);

/// arg(A_T+ conj(A_T-)) / omega for a single wavenumber.
double clock_time_at(const BarrierSpec& barrier, double omega, double k);

/// Spin state of the transmitted and reflected sub-ensembles long after the
/// scattering event, at one field strength.
struct ClockReading {
  double omega = 0.0;
  double theta_t = 0.0;  // in-plane precession angle
  double theta_r = 0.0;
  double tau_t = 0.0;    // theta / omega
  double tau_r = 0.0;
  double sz_t = 0.0;     // out-of-plane polarisation (diagnostic only)
  double sz_r = 0.0;
  double inplane_t = 0.0;  // |<sigma_x> + i <sigma_y>|
  double inplane_r = 0.0;
};

/// Packet-weighted reading: the sub-ensemble spin is the |G|^2-weighted sum of
/// the per-k spinors, since different k decouple once the packets separate.
ClockReading clock_reading(const BarrierSpec& barrier, const SpectralPacket& packet, double omega);

struct ClockExtrapolation {
  double value = 0.0;
  double error = 0.0;              // |full-ladder limit - limit without the largest omega|
  bool stable = false;             // sub-ladder limits agree within 1%
  bool contracting = false;        // successive differences shrink by >= 1.5 per step
  double largest_change = 0.0;     // max relative change between successive readings
};

struct ClockResult {
  std::vector<ClockReading> readings;
  ClockExtrapolation tr;
  ClockExtrapolation ref;  // value is NaN when the packet is not reflected
  bool perturbative_warning = false;  // a reading changed by more than 5% between neighbours
  std::vector<std::string> warnings;
};

/// {1e-3, 5e-4, 2.5e-4} * E0.
std::vector<double> default_omega_ladder(double e0);

/// Limit of tau(omega) as omega -> 0 by polynomial extrapolation in omega^2
/// (Neville). Requires at least two distinct values.
ClockExtrapolation extrapolate_to_zero(std::span<const double> omegas, std::span<const double> values);

/// Readings over a decreasing ladder plus extrapolation. Throws
/// ErrorKind::numerical, listing the ladder and readings, when the
/// transmission limit is not stable.
ClockResult clock_times(const BarrierSpec& barrier, const SpectralPacket& packet, std::span<const double> omegas);

}  // namespace subscat
