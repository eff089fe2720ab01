#include <cmath>
#include <numbers>

#include "doctest.h"
#include "subscat/error.hpp"
#include "subscat/times.hpp"
#include "support/oracles.hpp"

using namespace subscat;

namespace {

PacketEvolution evolution(const BarrierSpec& b, PacketParams p) { return PacketEvolution(b, make_gaussian_packet(b, p)); }

// Phase derivative of the closed-form A_T by a plain central difference in E.
double analytic_delay(double v0, double len, double k) {
  const double e = 0.5 * k * k, h = 1e-5 * e;
  auto phase = [&](double en) { return std::arg(oracle_ref::rect_amplitude_t(v0, len, std::sqrt(2.0 * en))); };
  double d = phase(e + h) - phase(e - h);
  if (d > std::numbers::pi) d -= 2.0 * std::numbers::pi;
  if (d < -std::numbers::pi) d += 2.0 * std::numbers::pi;
  return d / (2.0 * h);
}

}  // namespace

TEST_CASE("dwell times of single wavenumbers") {
  const BarrierSpec free = make_rectangular(-0.5, 1.5, 0.0);
  for (double k : {0.4, 1.0, 2.5}) CHECK(dwell_time_tr(decompose(free, solve_stationary(free, k))) == doctest::Approx(2.0 / k).epsilon(1e-10));

  const BarrierSpec b = make_rectangular(0.0, 1.0, 2.0);
  const ScatteringSolution s = solve_stationary(b, 1.0);
  const Decomposition d = decompose(b, s);
  const double tr = dwell_time_tr(d), ref = dwell_time_ref(d);
  CHECK(tr > 0.0);
  CHECK(ref > 0.0);
  const double riemann_tr =
      oracle_ref::riemann([&](double x) { return std::norm(d.masked_tr(x).value); }, 0.0, 1.0, 200000) / s.t_coef;
  const double riemann_ref =
      oracle_ref::riemann([&](double x) { return std::norm(d.masked_ref(x).value); }, 0.0, 0.5, 200000) / s.r_coef;
  CHECK(tr == doctest::Approx(riemann_tr).epsilon(1e-8));
  CHECK(ref == doctest::Approx(riemann_ref).epsilon(1e-8));

  const double kr = std::sqrt(std::numbers::pi * std::numbers::pi + 2.0);
  const BarrierSpec r = make_rectangular(0.0, 1.0, 1.0);
  try {
    dwell_time_ref(decompose(r, solve_stationary(r, kr)));
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::undefined);
  }
}

TEST_CASE("phase times") {
  const BarrierSpec free = make_rectangular(0.0, 1.0, 0.0);
  const PhaseTime f = phase_time(free, 1.2);
  CHECK(std::abs(f.transmission_delay) < 1e-9);
  CHECK(f.traversal == doctest::Approx(1.0 / 1.2).epsilon(1e-9));

  for (double len : {1.0, 2.0, 4.0}) {
    const BarrierSpec b = make_rectangular(0.0, len, 2.0);
    const PhaseTime p = phase_time(b, 1.0);
    CHECK(p.transmission_delay == doctest::Approx(analytic_delay(2.0, len, 1.0)).epsilon(1e-7));
    // Symmetric barriers delay reflection and transmission equally.
    CHECK(p.reflection_delay == doctest::Approx(p.traversal).epsilon(1e-8));
  }

  // The traversal time saturates with length while the transmission dwell time keeps growing.
  std::vector<double> phase, dwell;
  for (double len : {2.0, 4.0, 6.0, 8.0}) {
    const BarrierSpec b = make_rectangular(0.0, len, 2.0);
    phase.push_back(phase_time(b, 1.0).traversal);
    dwell.push_back(dwell_time_tr(decompose(b, solve_stationary(b, 1.0))));
  }
  for (std::size_t i = 2; i < phase.size(); ++i)
    CHECK(std::abs(phase[i] - phase[i - 1]) < std::abs(phase[i - 1] - phase[i - 2]));
  CHECK(std::abs(phase[3] - phase[2]) / (2.0 * phase[3]) < 1e-2);
  for (std::size_t i = 1; i < dwell.size(); ++i) CHECK(dwell[i] > 2.0 * dwell[i - 1]);
  CHECK(std::abs(phase.back() - dwell.back()) > 1.0);

  CHECK_THROWS_AS(phase_time(free, -1.0), Error);

  // Next to a reflection zero arg A_R turns by nearly pi within the default step.
  const BarrierSpec r = make_rectangular(0.0, 2.0, 1.0);
  const double kr = std::sqrt(std::numbers::pi * std::numbers::pi / 4.0 + 2.0) * (1.0 + 1e-5);
  const PhaseTime near = phase_time(r, kr);
  CHECK(near.reflection_delay == doctest::Approx(near.traversal).epsilon(1e-6));
  CHECK(near.transmission_delay == doctest::Approx(analytic_delay(1.0, 2.0, kr)).epsilon(1e-6));
}

TEST_CASE("route A and route B agree with squared weights") {
  const BarrierSpec b = make_rectangular(0.0, 1.0, 2.0);
  const PacketEvolution ev = evolution(b, {-30.0, 5.0, 1.5, 1024});
  const TimeReport rep = compute_time_report(ev);
  REQUIRE(rep.larmor_ref.has_value());
  for (const LarmorTimes* lt : {&rep.larmor_tr, &*rep.larmor_ref}) {
    CHECK(lt->route_a.time > 0.0);
    CHECK(lt->route_a.monotone);
    CHECK(lt->route_a.tail < 1e-10);
    CHECK(lt->residual_squared < 1e-3);
    CHECK(std::abs(lt->route_b_squared.weight_norm - 1.0) < 1e-12);
    // The printed weight carries the initial-position phase and averages to nearly nothing.
    CHECK(std::abs(lt->route_b_printed.weight_norm) < 1e-3);
    CHECK(lt->residual_printed > 0.5);
  }
  REQUIRE(rep.ref_full_barrier.has_value());
  CHECK(*rep.ref_full_barrier == doctest::Approx(rep.larmor_ref->route_a.time).epsilon(1e-9));

  for (double t : rep.dwell_tr) CHECK(t > 0.0);
  for (double t : rep.dwell_ref) CHECK(t > 0.0);
}

TEST_CASE("free flight") {
  const BarrierSpec b = make_rectangular(0.0, 1.0, 0.0);
  const PacketEvolution ev = evolution(b, {-60.0, 10.0, 1.5, 1024});
  const RouteAResult a = larmor_time_route_a(ev, Subprocess::transmission);
  CHECK(a.time == doctest::Approx(1.0 / 1.5).epsilon(1e-2));

  // Route B against the analytic weight integral of (b - a) / k under |g|^2.
  const double sigma = 10.0, k0 = 1.5, lo = k0 - 6.5 / sigma, hi = k0 + 6.5 / sigma;
  auto g2 = [&](double k) { return std::exp(-sigma * sigma * (k - k0) * (k - k0)); };
  const double expected = oracle_ref::riemann([&](double k) { return g2(k) / k; }, lo, hi, 100000) /
                          oracle_ref::riemann(g2, lo, hi, 100000);
  const auto dwell = dwell_table(ev, Subprocess::transmission);
  const RouteBResult rb = larmor_time_route_b(ev, Subprocess::transmission, dwell, SpectralWeight::squared);
  CHECK(rb.time.real() == doctest::Approx(expected).epsilon(1e-9));
  CHECK(a.time == doctest::Approx(rb.time.real()).epsilon(1e-6));

  CHECK_THROWS_AS(larmor_time_route_a(ev, Subprocess::reflection), Error);
}

TEST_CASE("route B approaches the single-k dwell time as the packet narrows in k") {
  const BarrierSpec b = make_rectangular(0.0, 1.0, 2.0);
  const double target = dwell_time_tr(decompose(b, solve_stationary(b, 1.5)));
  double previous = INFINITY;
  for (double sigma : {5.0, 10.0, 20.0}) {
    const PacketEvolution ev = evolution(b, {-6.0 * sigma, sigma, 1.5, 512});
    const auto dwell = dwell_table(ev, Subprocess::transmission);
    const double err =
        std::abs(larmor_time_route_b(ev, Subprocess::transmission, dwell, SpectralWeight::squared).time.real() - target);
    CHECK(err < previous);
    previous = err;
  }
  CHECK(previous < 1e-2 * target);
}

TEST_CASE("route A rejects a window that cuts the event") {
  const BarrierSpec b = make_rectangular(0.0, 1.0, 2.0);
  const PacketEvolution ev = evolution(b, {-30.0, 5.0, 1.5, 512});
  RouteAOptions opt;
  opt.window = std::pair{15.0, 25.0};
  try {
    larmor_time_route_a(ev, Subprocess::transmission, opt);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::numerical);
  }
  opt.window.reset();
  opt.domain = std::pair{-1.0, 0.5};
  CHECK_THROWS_AS(larmor_time_route_a(ev, Subprocess::transmission, opt), Error);
}
