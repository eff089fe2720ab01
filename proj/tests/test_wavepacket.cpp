#include <cmath>

#include "doctest.h"
#include "subscat/error.hpp"
#include "subscat/wavepacket.hpp"
#include "support/oracles.hpp"

using namespace subscat;

namespace {

PacketEvolution evolution(double v0, PacketParams p) {
  const BarrierSpec b = make_rectangular(0.0, 1.0, v0);
  return PacketEvolution(b, make_gaussian_packet(b, p));
}

}  // namespace

TEST_CASE("packet preconditions") {
  const BarrierSpec b = make_rectangular(0.0, 1.0, 2.0);
  CHECK_NOTHROW(make_gaussian_packet(b, {-30.0, 5.0, 1.5, 1024}));

  // Overlapping the barrier and too narrow a spectrum are both rejected.
  for (PacketParams p : {PacketParams{-1.0, 2.0, 1.0, 1024}, PacketParams{-20.0, 2.0, 1.0, 1024},
                         PacketParams{-30.0, 5.0, 0.9, 1024}}) {
    try {
      make_gaussian_packet(b, p);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::domain);
      CHECK(std::string(e.what()).find("completed") != std::string::npos);
    }
  }
}

TEST_CASE("packet normalisation and tails") {
  const BarrierSpec b = make_rectangular(0.0, 1.0, 2.0);
  const SpectralPacket p = make_gaussian_packet(b, {-30.0, 5.0, 1.5, 1024});
  double norm = 0.0;
  for (std::size_t i = 0; i < p.ks.size(); ++i) norm += p.weights[i] * std::norm(p.big_g[i]);
  CHECK(norm == doctest::Approx(1.0).epsilon(1e-12));
  // The analytic integral of |g|^2 over the line is 1; truncation loses ~erfc(6.5 / sqrt 2).
  CHECK(std::abs(p.raw_norm - 1.0) < 1e-6);
  CHECK(p.tail_ratio < 1e-8);
  CHECK(p.negative_fraction < 1e-10);
  CHECK(p.ks.front() == doctest::Approx(1.5 - 6.5 / 5.0));
  CHECK(p.ks.back() == doctest::Approx(1.5 + 6.5 / 5.0));
}

TEST_CASE("free packet follows the closed form") {
  const PacketParams p{-30.0, 5.0, 1.5, 1024};
  const PacketEvolution ev = evolution(0.0, p);
  CHECK(ev.transmission() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(ev.reflection() < 1e-15);
  const UniformGrid grid = ev.default_grid(30.0, 0.1);
  for (double t : {0.0, 12.0, 30.0}) {
    const Snapshot s = ev.snapshot(t, grid);
    double worst = 0.0;
    for (std::size_t i = 0; i < grid.points; ++i)
      worst = std::max(worst, std::abs(s.full[i] - oracle_ref::free_gaussian(grid.at(i), t, p.x0, p.sigma, p.k0)));
    CHECK(worst < 1e-6);
    const SnapshotScalars sc = norms_and_overlap(s, ev.barrier().center());
    CHECK(sc.norm_full == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(sc.transmitted == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(sc.reflected < 1e-15);
    CHECK(std::abs(sc.overlap_re) < 1e-15);
  }
}

TEST_CASE("scattered packet: sums, support and asymptotic norms") {
  const PacketEvolution ev = evolution(2.0, {-30.0, 5.0, 1.0, 1024});
  const double t_end = 70.0;
  const UniformGrid grid = ev.default_grid(t_end, 0.05);
  const double xc = ev.barrier().center();

  double tr_spectral = 0.0;
  for (std::size_t i = 0; i < ev.ks().size(); ++i)
    tr_spectral += ev.weights()[i] * std::norm(ev.spectrum()[i]) * ev.states()[i].solution().t_coef;
  CHECK(ev.transmission() == doctest::Approx(tr_spectral).epsilon(1e-14));
  CHECK(ev.transmission() + ev.reflection() == doctest::Approx(1.0).epsilon(1e-12));

  std::vector<SnapshotScalars> scalars;
  for (double t : {0.0, 25.0, 30.0, 35.0, t_end}) {
    const Snapshot s = ev.snapshot(t, grid);
    for (std::size_t i = 0; i < grid.points; ++i) {
      CHECK(std::abs(s.tr[i] + s.ref[i] - s.full[i]) < 1e-9);
      if (grid.at(i) > xc) CHECK(s.ref[i] == cplx{});
    }
    scalars.push_back(norms_and_overlap(s, xc));
    const SnapshotScalars& sc = scalars.back();
    CHECK(sc.norm_full == doctest::Approx(1.0).epsilon(1e-6));
    // Norm bookkeeping: |tr + ref|^2 = T_t + R_t + 2 Re<tr|ref>.
    CHECK(std::abs(sc.transmitted + sc.reflected + 2.0 * sc.overlap_re - sc.norm_full) < 1e-9);
    // psi_ref vanishes at x_c for every k, so no probability crosses x_c and R_t stays put.
    CHECK(std::abs(sc.reflected - ev.reflection()) < 1e-6);
  }

  // Before and long after the collision both sub-packets carry their spectral weights.
  for (const SnapshotScalars* sc : {&scalars.front(), &scalars.back()}) {
    CHECK(std::abs(sc->transmitted - ev.transmission()) < 1e-4);
    CHECK(std::abs(sc->overlap_re) < 1e-6);
    CHECK(snapshot_violations(*sc).empty());
  }
  CHECK(std::abs(scalars.back().overlap_im) < 1e-4);

  // Long after the collision the transmitted norm sits right of the barrier.
  const Snapshot late = ev.snapshot(t_end, grid);
  std::vector<double> right;
  for (std::size_t i = grid.nearest(ev.barrier().right()); i < grid.points; ++i) right.push_back(std::norm(late.tr[i]));
  CHECK(std::abs(integrate_uniform(right, grid.dx, 0) - scalars.back().transmitted) < 1e-4);
}

TEST_CASE("synthesis is linear in the sub-states") {
  const PacketEvolution ev = evolution(2.0, {-30.0, 5.0, 1.5, 512});
  std::vector<double> xs;
  for (int i = 0; i < 200; ++i) xs.push_back(-5.0 + 0.05 * i);
  for (double t : {10.0, 20.0}) {
    const auto full = ev.synthesize(Component::full, t, xs);
    const auto tr = ev.synthesize(Component::tr, t, xs);
    const auto ref = ev.synthesize(Component::ref, t, xs);
    for (std::size_t i = 0; i < xs.size(); ++i) CHECK(std::abs(tr[i] + ref[i] - full[i]) < 1e-9);
  }
}

TEST_CASE("truncated grids and coarse spectra are detected") {
  const PacketEvolution ev = evolution(2.0, {-30.0, 5.0, 1.5, 512});
  const UniformGrid narrow = UniformGrid::anchored(-35.0, 5.0, 0.05, 0.5);
  try {
    norms_and_overlap(ev.snapshot(0.0, narrow), 0.5);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::numerical);
  }

  const UniformGrid grid = ev.default_grid(20.0, 0.05);
  CHECK(ev.aliasing_drift(20.0, grid) < 1e-4);
  CHECK_NOTHROW(ev.verify_k_resolution(20.0, grid));

  // 24 nodes over 2.6 / sigma aliases the packet back into a grid this wide.
  const PacketEvolution coarse = evolution(2.0, {-30.0, 5.0, 1.5, 24});
  CHECK_THROWS_AS(coarse.verify_k_resolution(20.0, coarse.default_grid(20.0, 0.05)), Error);
}
