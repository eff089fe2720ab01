#include "subscat/larmor_clock.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "subscat/error.hpp"
#include "subscat/parallel.hpp"

namespace subscat {

namespace {

constexpr double kStableRelative = 1e-2;
constexpr double kPerturbativeChange = 0.05;
constexpr double kContraction = 1.5;
constexpr double kReflectionFloor = 1e-12;

double neville_at_zero(std::span<const double> x, std::span<const double> y) {
  std::vector<double> p(y.begin(), y.end());
  const std::size_t n = x.size();
  for (std::size_t m = 1; m < n; ++m)
    for (std::size_t i = 0; i + m < n; ++i) p[i] = (x[i + m] * p[i] - x[i] * p[i + 1]) / (x[i + m] - x[i]);
  return p[0];
}

}  // namespace

SpinAmplitudes spin_resolved_amplitudes(const BarrierSpec& barrier, double omega, double k) {
  require(std::isfinite(omega), ErrorKind::domain, "larmor: omega must be finite");
  if (omega == 0.0) {
    const ScatteringSolution s = solve_stationary(barrier, k);
    return {s.a_t, s.a_t, s.a_r, s.a_r};
  }
  const ScatteringSolution up = solve_stationary(barrier.shifted(-0.5 * omega), k);
  const ScatteringSolution down = solve_stationary(barrier.shifted(0.5 * omega), k);
  return {up.a_t, down.a_t, up.a_r, down.a_r};
}

double clock_time_at(const BarrierSpec& barrier, double omega, double k) {
  require(omega != 0.0, ErrorKind::domain, "larmor: omega must be nonzero to read a time");
  const SpinAmplitudes a = spin_resolved_amplitudes(barrier, omega, k);
  return std::arg(a.t_plus * std::conj(a.t_minus)) / omega;
}

ClockReading clock_reading(const BarrierSpec& barrier, const SpectralPacket& packet, double omega) {
  require(omega > 0.0, ErrorKind::domain, "larmor: omega must be positive");
  const std::size_t n = packet.ks.size();
  std::vector<SpinAmplitudes> amps(n);
  parallel_for(n, [&](std::size_t i) {
    if (packet.ks[i] > 0.0) amps[i] = spin_resolved_amplitudes(barrier, omega, packet.ks[i]);
  });

  // For the spinor (c+, c-) the in-plane component is 2 c+ conj(c-) / |c|^2.
  cplx coh_t{}, coh_r{};
  double up_t = 0.0, down_t = 0.0, up_r = 0.0, down_r = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (packet.ks[i] <= 0.0) continue;
    const double w = packet.weights[i] * std::norm(packet.big_g[i]);
    const SpinAmplitudes& a = amps[i];
    coh_t += w * a.t_plus * std::conj(a.t_minus);
    coh_r += w * a.r_plus * std::conj(a.r_minus);
    up_t += w * std::norm(a.t_plus);
    down_t += w * std::norm(a.t_minus);
    up_r += w * std::norm(a.r_plus);
    down_r += w * std::norm(a.r_minus);
  }

  ClockReading r;
  r.omega = omega;
  r.theta_t = std::arg(coh_t);
  r.tau_t = r.theta_t / omega;
  r.sz_t = (up_t - down_t) / (up_t + down_t);
  r.inplane_t = 2.0 * std::abs(coh_t) / (up_t + down_t);
  if (up_r + down_r > 2.0 * kReflectionFloor) {
    r.theta_r = std::arg(coh_r);
    r.tau_r = r.theta_r / omega;
    r.sz_r = (up_r - down_r) / (up_r + down_r);
    r.inplane_r = 2.0 * std::abs(coh_r) / (up_r + down_r);
  } else {
    r.theta_r = r.tau_r = r.sz_r = r.inplane_r = std::numeric_limits<double>::quiet_NaN();
  }
  return r;
}

std::vector<double> default_omega_ladder(double e0) { return {1e-3 * e0, 5e-4 * e0, 2.5e-4 * e0}; }

ClockExtrapolation extrapolate_to_zero(std::span<const double> omegas, std::span<const double> values) {
  require(omegas.size() >= 2 && omegas.size() == values.size(), ErrorKind::domain,
          "larmor: extrapolation needs at least two readings");
  std::vector<double> x(omegas.size());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = omegas[i] * omegas[i];
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = i + 1; j < x.size(); ++j)
      require(x[i] != x[j], ErrorKind::domain, "larmor: omega ladder entries must be distinct in magnitude");

  ClockExtrapolation e;
  const std::size_t n = x.size();
  e.value = neville_at_zero(x, values);
  const double without_first = n > 2 ? neville_at_zero(std::span(x).subspan(1), values.subspan(1)) : values[n - 1];
  e.error = std::abs(e.value - without_first);
  const double head = n > 2 ? neville_at_zero(std::span(x).first(n - 1), values.first(n - 1)) : values[0];
  e.stable = std::abs(head - without_first) <= kStableRelative * std::abs(e.value);

  e.contracting = true;
  double prev = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double d = std::abs(values[i + 1] - values[i]);
    e.largest_change = std::max(e.largest_change, d / std::abs(values[i + 1]));
    const double floor = 1e-13 * std::abs(values[i + 1]);
    if (i > 0 && d > floor && d * kContraction > prev) e.contracting = false;
    prev = d;
  }
  return e;
}

ClockResult clock_times(const BarrierSpec& barrier, const SpectralPacket& packet, std::span<const double> omegas) {
  require(omegas.size() >= 2, ErrorKind::domain, "larmor: the omega ladder needs at least two values");
  ClockResult res;
  for (double w : omegas) res.readings.push_back(clock_reading(barrier, packet, w));

  std::vector<double> tr, ref;
  for (const auto& r : res.readings) {
    tr.push_back(r.tau_t);
    ref.push_back(r.tau_r);
  }
  res.tr = extrapolate_to_zero(omegas, tr);
  // Without field the reflected sub-ensemble must exist for its reading to mean anything.
  std::vector<double> r0(packet.ks.size(), 0.0);
  parallel_for(packet.ks.size(), [&](std::size_t i) {
    if (packet.ks[i] > 0.0)
      r0[i] = packet.weights[i] * std::norm(packet.big_g[i]) * solve_stationary(barrier, packet.ks[i]).r_coef;
  });
  double reflected = 0.0;
  for (double v : r0) reflected += v;
  if (reflected > kReflectionFloor &&
      std::all_of(ref.begin(), ref.end(), [](double v) { return std::isfinite(v); })) {
    res.ref = extrapolate_to_zero(omegas, ref);
  } else {
    res.ref.value = res.ref.error = std::numeric_limits<double>::quiet_NaN();
  }

  auto describe = [&](const char* what, const std::vector<double>& values) {
    std::ostringstream msg;
    msg << what << " clock readings over omega = {";
    for (std::size_t i = 0; i < omegas.size(); ++i) msg << (i ? ", " : "") << omegas[i];
    msg << "}: {";
    for (std::size_t i = 0; i < values.size(); ++i) msg << (i ? ", " : "") << values[i];
    msg << "}";
    return msg.str();
  };
  for (const auto* e : {&res.tr, &res.ref}) {
    if (std::isfinite(e->value) && e->largest_change > kPerturbativeChange) {
      res.perturbative_warning = true;
      res.warnings.push_back(describe(e == &res.tr ? "perturbative regime violated:" : "perturbative regime violated (reflection):",
                                      e == &res.tr ? tr : ref));
    }
  }
  if (!res.tr.contracting) res.warnings.push_back(describe("successive differences do not contract:", tr));
  if (std::isfinite(res.ref.value) && !res.ref.stable)
    res.warnings.push_back(describe("reflection limit not stable:", ref));
  if (!res.tr.stable) fail(ErrorKind::numerical, "larmor: extrapolation did not converge; " + describe("transmission", tr));
  return res;
}

}  // namespace subscat
