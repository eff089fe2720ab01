#include <cmath>

#include "doctest.h"
#include "subscat/error.hpp"
#include "subscat/larmor_clock.hpp"
#include "subscat/times.hpp"

using namespace subscat;

TEST_CASE("zero field leaves the spin alone") {
  const BarrierSpec b = make_rectangular(0.0, 1.0, 2.0);
  const SpinAmplitudes a = spin_resolved_amplitudes(b, 0.0, 1.0);
  CHECK(a.t_plus == a.t_minus);
  CHECK(a.r_plus == a.r_minus);
  const ScatteringSolution s = solve_stationary(b, 1.0);
  CHECK(a.t_plus == s.a_t);
  CHECK(std::abs(std::arg(a.t_plus * std::conj(a.t_minus))) < 1e-12);
  CHECK_THROWS_AS(clock_time_at(b, 0.0, 1.0), Error);
}

TEST_CASE("spin components are each unitary and theta is odd in omega") {
  const BarrierSpec b = make_rectangular(0.0, 1.0, 2.0);
  for (double w : {1e-3, 1e-2, 0.1}) {
    const SpinAmplitudes p = spin_resolved_amplitudes(b, w, 1.0);
    CHECK(std::abs(std::norm(p.t_plus) + std::norm(p.r_plus) - 1.0) < 1e-10);
    CHECK(std::abs(std::norm(p.t_minus) + std::norm(p.r_minus) - 1.0) < 1e-10);
    const SpinAmplitudes m = spin_resolved_amplitudes(b, -w, 1.0);
    const double theta = std::arg(p.t_plus * std::conj(p.t_minus));
    const double theta_neg = std::arg(m.t_plus * std::conj(m.t_minus));
    CHECK(std::abs(theta + theta_neg) < 1e-9);
    CHECK(std::abs(theta) > 0.0);
  }
}

TEST_CASE("single-k clock reading") {
  const BarrierSpec free = make_rectangular(0.0, 2.0, 0.0);
  CHECK(clock_time_at(free, 1e-5, 1.3) == doctest::Approx(2.0 / 1.3).epsilon(1e-8));

  // theta is linear in omega: theta / omega agrees at two small fields.
  const BarrierSpec b = make_rectangular(0.0, 1.0, 2.0);
  const double t1 = clock_time_at(b, 1e-4, 1.0), t2 = clock_time_at(b, 2e-4, 1.0);
  CHECK(t1 == doctest::Approx(t2).epsilon(1e-6));
  CHECK(t1 > 0.0);
}

TEST_CASE("Neville extrapolation in omega squared") {
  const double w[] = {0.4, 0.2, 0.1};
  double v[3];
  for (int i = 0; i < 3; ++i) v[i] = 2.0 + 3.0 * w[i] * w[i];
  const ClockExtrapolation e = extrapolate_to_zero(w, v);
  CHECK(e.value == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(e.stable);

  const double erratic[] = {1.0, 5.0, -3.0};
  const ClockExtrapolation bad = extrapolate_to_zero(w, erratic);
  CHECK_FALSE(bad.stable);
  CHECK_FALSE(bad.contracting);

  const double one[] = {0.1};
  CHECK_THROWS_AS(extrapolate_to_zero(one, one), Error);
}

TEST_CASE("free-flight packet clock") {
  const BarrierSpec b = make_rectangular(0.0, 1.0, 0.0);
  const SpectralPacket p = make_gaussian_packet(b, {-60.0, 10.0, 1.5, 1024});
  const auto ladder = default_omega_ladder(0.5 * 1.5 * 1.5);
  CHECK(ladder.size() == 3);
  const ClockResult r = clock_times(b, p, ladder);
  CHECK(r.tr.value == doctest::Approx(1.0 / 1.5).epsilon(1e-2));
  CHECK(r.tr.stable);
  CHECK(std::isnan(r.ref.value));
  CHECK_FALSE(r.perturbative_warning);
  for (const ClockReading& c : r.readings) CHECK(std::abs(c.sz_t) < 1e-6);

  // The packet clock reads the k-averaged transit time <1/k>, which is what route A reports.
  const RouteAResult a = larmor_time_route_a(PacketEvolution(b, p), Subprocess::transmission);
  CHECK(r.tr.value == doctest::Approx(a.time).epsilon(1e-6));
}

TEST_CASE("opaque barrier clock") {
  const BarrierSpec b = make_rectangular(0.0, 1.0, 8.0);
  const SpectralPacket p = make_gaussian_packet(b, {-60.0, 10.0, 1.5, 512});
  const ClockResult r = clock_times(b, p, default_omega_ladder(0.5 * 1.5 * 1.5));
  CHECK(r.tr.stable);
  CHECK(r.ref.stable);
  CHECK(std::isfinite(r.ref.value));
  CHECK(r.ref.value > 0.0);
  CHECK(r.tr.contracting);

  // Successive readings move by ever smaller amounts.
  REQUIRE(r.readings.size() == 3);
  const double d1 = std::abs(r.readings[0].tau_t - r.readings[1].tau_t);
  const double d2 = std::abs(r.readings[1].tau_t - r.readings[2].tau_t);
  CHECK(d1 >= 1.5 * d2);

  const double single[] = {1e-3};
  CHECK_THROWS_AS(clock_times(b, p, single), Error);
}
