#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "subscat/decomposition.hpp"
#include "subscat/error.hpp"
#include "support/oracles.hpp"

using namespace subscat;

namespace {

std::vector<oracle_ref::Piece> pieces_of(const BarrierSpec& b) {
  std::vector<oracle_ref::Piece> out;
  for (std::size_t i = 0; i < b.segments().size(); ++i)
    out.push_back({b.edges()[i], b.edges()[i + 1], b.segments()[i].height});
  return out;
}

BarrierSpec random_barrier(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> width(0.05, 0.8), height(0.0, 4.0), pos(-2.0, 2.0);
  std::uniform_int_distribution<int> count(1, 3);
  std::vector<Segment> half(count(rng));
  for (Segment& s : half) s = {width(rng), height(rng)};
  return make_symmetric(pos(rng), half);
}

}  // namespace

TEST_CASE("candidates") {
  const CandidatePair free = candidates(1.0, 0.0);
  CHECK(free.degenerate);
  CHECK(free.plus == cplx{});
  CHECK(free.minus == cplx{});

  const double h = std::sqrt(0.5);
  const CandidatePair half = candidates(cplx(h, 0.0), cplx(0.0, h));
  for (cplx z : {half.plus, half.minus}) {
    CHECK(std::norm(z) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(std::norm(1.0 - z) == doctest::Approx(0.5).epsilon(1e-14));
  }
  CHECK(std::abs(half.plus - cplx(0.5, 0.5)) < 1e-15);
  CHECK(std::abs(half.minus - cplx(0.5, -0.5)) < 1e-15);

  const ScatteringSolution s = solve_stationary(make_rectangular(0.0, 1.0, 2.0), 1.0);
  const double t = oracle_ref::rect_transmission(2.0, 1.0, 1.0);
  const CandidatePair c = candidates(s.a_t, s.a_r);
  for (cplx z : {c.plus, c.minus}) {
    CHECK(std::abs(std::abs(z) - std::sqrt(1.0 - t)) < 1e-12);
    CHECK(std::abs(std::abs(1.0 - z) - std::sqrt(t)) < 1e-12);
    CHECK(std::abs(z.real() - (1.0 - t)) < 1e-12);
  }

  try {
    candidates(1.0, 0.5);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::domain);
  }
}

TEST_CASE("odd branch for the rectangular barrier") {
  const BarrierSpec b = make_rectangular(0.0, 1.0, 2.0);
  const ScatteringSolution s = solve_stationary(b, 1.0);
  const Decomposition d = decompose(b, s);
  CHECK(d.branch == Branch::odd);
  CHECK_FALSE(d.degenerate);
  CHECK(d.diagnostics.selected_at_center < 1e-8);
  CHECK(d.diagnostics.rejected_at_center > 1e-2);
  CHECK(std::abs(d.ref_state(b.center()).value) < 1e-12);

  // Outward integration of the odd solution from x_c is an independent route to A_ref_In.
  const cplx expected = oracle_ref::odd_incident_amplitude(pieces_of(b), 1.0, s.a_r);
  CHECK(std::abs(d.a_ref_in - expected) < 1e-10);

  // The even branch does not vanish at the centre.
  const Decomposition even = select_even_branch(b, s, candidates(s.a_t, s.a_r));
  CHECK(even.branch == Branch::even);
  CHECK(std::abs(even.ref_state(b.center()).value) > 1e-2);
  CHECK(std::abs(even.a_ref_in - std::conj(d.a_ref_in)) < 1e-12);
}

TEST_CASE("free particle and resonance are degenerate") {
  const BarrierSpec free = make_rectangular(0.0, 1.0, 0.0);
  const Decomposition f = decompose(free, solve_stationary(free, 1.3));
  CHECK(f.degenerate);
  CHECK(f.a_ref_in == cplx{});
  CHECK(f.a_tr_in == cplx(1.0, 0.0));
  CHECK(f.masked_ref(0.2).value == cplx{});

  const BarrierSpec b = make_rectangular(0.0, 1.0, 1.0);
  const double k = std::sqrt(std::numbers::pi * std::numbers::pi + 2.0);
  const Decomposition r = decompose(b, solve_stationary(b, k));
  CHECK(r.degenerate);
  CHECK(r.a_ref_in == cplx{});
}

TEST_CASE("decomposition identities on random barriers") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> kd(0.15, 3.5);
  int checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const BarrierSpec b = random_barrier(rng);
    for (int j = 0; j < 20; ++j) {
      const ScatteringSolution s = solve_stationary(b, kd(rng));
      const Decomposition d = decompose(b, s);
      CHECK(d.a_tr_in + d.a_ref_in == cplx(1.0, 0.0));
      CHECK(std::abs(std::abs(d.a_tr_in) - std::abs(s.a_t)) < 1e-9);
      CHECK(std::abs(std::abs(d.a_ref_in) - std::abs(s.a_r)) < 1e-9);
      CHECK(std::abs(d.a_ref_in.real() - s.r_coef) < 1e-10);
      if (d.degenerate) continue;
      CHECK(d.diagnostics.selected_at_center < 1e-8);
      for (int m = 0; m < 8; ++m) {
        const double x = b.left() + (m + 0.3) / 8.0 * b.length();
        const double r = std::abs(d.ref_state(x).value + d.ref_state(2.0 * b.center() - x).value);
        CHECK(r / d.diagnostics.peak < 1e-8);
      }
      ++checked;
    }
  }
  CHECK(checked > 3000);
}

TEST_CASE("odd branch agrees with the outward-integration oracle on stepped barriers") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> kd(0.3, 3.0);
  for (int trial = 0; trial < 20; ++trial) {
    const BarrierSpec b = random_barrier(rng);
    const ScatteringSolution s = solve_stationary(b, kd(rng));
    const Decomposition d = decompose(b, s);
    if (d.degenerate) continue;
    const cplx expected = oracle_ref::odd_incident_amplitude(pieces_of(b), s.k, s.a_r);
    CHECK(std::abs(d.a_ref_in - expected) < 1e-8);
  }
}

TEST_CASE("selected branch is unchanged by a finer segmentation") {
  const Segment half[] = {{0.3, 1.0}, {0.25, 3.0}};
  const BarrierSpec b = make_symmetric(0.0, half);
  for (double k : {0.5, 1.2, 2.0, 2.9}) {
    const Decomposition coarse = decompose(b, solve_stationary(b, k));
    const BarrierSpec fine = b.refined(5);
    const Decomposition refined = decompose(fine, solve_stationary(fine, k));
    CHECK(std::abs(coarse.a_ref_in - refined.a_ref_in) < 1e-8);
    CHECK(std::abs(coarse.solution().a_t - refined.solution().a_t) < 1e-8);
  }
}

TEST_CASE("masked sub-states") {
  const BarrierSpec b = make_rectangular(0.0, 1.0, 2.0);
  const ScatteringSolution s = solve_stationary(b, 1.0);
  const Decomposition d = decompose(b, s);
  std::vector<double> xs;
  const double dx = 1e-3;
  for (int i = 0; i <= 5000; ++i) xs.push_back(-2.0 + dx * i);
  const MaskedSubstates m = masked_substates(d, xs);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    CHECK(std::abs(m.tr[i] + m.ref[i] - m.full[i]) < 1e-10);
    if (xs[i] > b.center()) CHECK(m.ref[i] == cplx{});
  }

  // Finite-difference currents over the left part, where psi_ref lives.
  std::vector<cplx> left_ref, left_tr;
  for (std::size_t i = 0; i < xs.size() && xs[i] < b.center(); ++i) {
    left_ref.push_back(m.ref[i]);
    left_tr.push_back(m.tr[i]);
  }
  for (double j : probability_current(left_ref, dx)) CHECK(std::abs(j) < 1e-6);
  for (double j : probability_current(left_tr, dx)) CHECK(std::abs(j - s.t_coef) < 1e-5 * s.t_coef);

  // Continuity and equal and opposite derivative jumps at x_c.
  const double xc = b.center();
  CHECK(std::abs(d.masked_ref(xc).value) < 1e-9);
  CHECK(std::abs(d.tr_state(xc).value - s.field(xc)) < 1e-9);
  const cplx jump_tr = d.masked_tr(xc + 1e-12).slope - d.masked_tr(xc).slope;
  const cplx jump_ref = d.masked_ref(xc + 1e-12).slope - d.masked_ref(xc).slope;
  CHECK(std::abs(jump_tr + jump_ref) < 1e-7);
  CHECK(std::abs(jump_ref) > 1e-3);

  const double narrow[] = {0.1, 0.2};
  CHECK_THROWS_AS(masked_substates(d, narrow), Error);
}

TEST_CASE("masked sub-states of the free particle") {
  const BarrierSpec b = make_rectangular(0.0, 1.0, 0.0);
  const Decomposition d = decompose(b, solve_stationary(b, 0.8));
  std::vector<double> xs;
  for (int i = 0; i <= 300; ++i) xs.push_back(-1.0 + 0.01 * i);
  const MaskedSubstates m = masked_substates(d, xs);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    CHECK(m.ref[i] == cplx{});
    CHECK(std::abs(m.tr[i] - m.full[i]) == 0.0);
  }
}
