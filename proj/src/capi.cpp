#include "subscat/subscat.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <new>
#include <string>

#include "subscat/decomposition.hpp"
#include "subscat/error.hpp"
#include "subscat/larmor_clock.hpp"
#include "subscat/oracle.hpp"
#include "subscat/parallel.hpp"
#include "subscat/potentials.hpp"
#include "subscat/stationary.hpp"
#include "subscat/times.hpp"
#include "subscat/wavepacket.hpp"

struct subscat_barrier {
  subscat::BarrierSpec spec;
};

struct subscat_evolution {
  subscat::PacketEvolution ev;
};

namespace {

using subscat::cplx;

thread_local std::string g_last_error;

struct ArgumentError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void need(bool ok, const char* what) {
  if (!ok) throw ArgumentError(what);
}

int status_of(subscat::ErrorKind kind) {
  switch (kind) {
    case subscat::ErrorKind::domain:
      return SUBSCAT_DOMAIN;
    case subscat::ErrorKind::numerical:
      return SUBSCAT_NUMERICAL;
    case subscat::ErrorKind::ambiguous:
      return SUBSCAT_AMBIGUOUS;
    case subscat::ErrorKind::undefined:
      return SUBSCAT_UNDEFINED;
    case subscat::ErrorKind::internal:
      return SUBSCAT_INTERNAL;
  }
  return SUBSCAT_INTERNAL;
}

template <class F>
int guarded(F&& body) {
  try {
    body();
    g_last_error.clear();
    return SUBSCAT_OK;
  } catch (const ArgumentError& e) {
    g_last_error = e.what();
    return SUBSCAT_INVALID_ARGUMENT;
  } catch (const subscat::Error& e) {
    g_last_error = e.what();
    return status_of(e.kind());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return SUBSCAT_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return SUBSCAT_INTERNAL;
  } catch (...) {
    g_last_error = "unknown failure";
    return SUBSCAT_INTERNAL;
  }
}

std::vector<subscat::Segment> segments_of(const double* widths, const double* heights, size_t count) {
  need(widths && heights && count > 0, "segment arrays must be non-null and non-empty");
  std::vector<subscat::Segment> segs(count);
  for (size_t i = 0; i < count; ++i) segs[i] = {widths[i], heights[i]};
  return segs;
}

subscat::PacketParams packet_of(const subscat_packet* p) {
  need(p != nullptr, "packet must be non-null");
  subscat::PacketParams params;
  params.x0 = p->x0;
  params.sigma = p->sigma;
  params.k0 = p->k0;
  if (p->k_points != 0) params.k_points = p->k_points;
  return params;
}

subscat::UniformGrid grid_of(const subscat_grid* g) {
  need(g != nullptr && g->points >= 3 && g->dx > 0.0, "grid must be non-null with dx > 0 and at least 3 points");
  return {g->origin, g->dx, g->points};
}

subscat::Subprocess subprocess_of(int which) {
  need(which == SUBSCAT_TRANSMISSION || which == SUBSCAT_REFLECTION, "subprocess must be 0 or 1");
  return which == SUBSCAT_TRANSMISSION ? subscat::Subprocess::transmission : subscat::Subprocess::reflection;
}

void fill(const subscat::ScatteringSolution& s, subscat_amplitudes* out) {
  *out = {s.a_t.real(), s.a_t.imag(), s.a_r.real(), s.a_r.imag(), s.t_coef, s.r_coef, s.unitarity_residual()};
}

void split(const std::vector<cplx>& v, double* re, double* im) {
  for (size_t i = 0; i < v.size(); ++i) {
    if (re) re[i] = v[i].real();
    if (im) im[i] = v[i].imag();
  }
}

}  // namespace

extern "C" {

const char* subscat_version(void) { return SUBSCAT_VERSION_STRING; }

const char* subscat_last_error(void) { return g_last_error.c_str(); }

void subscat_set_workers(unsigned workers) { subscat::set_worker_count(workers); }

int subscat_barrier_rectangular(double a, double b, double height, subscat_barrier** out) {
  return guarded([&] {
    need(out != nullptr, "out must be non-null");
    *out = new subscat_barrier{subscat::make_rectangular(a, b, height)};
  });
}

int subscat_barrier_segments(double a, const double* widths, const double* heights, size_t count,
                             subscat_barrier** out) {
  return guarded([&] {
    need(out != nullptr, "out must be non-null");
    *out = new subscat_barrier{subscat::BarrierSpec::from_segments(a, segments_of(widths, heights, count))};
  });
}

int subscat_barrier_symmetric(double a, const double* widths, const double* heights, size_t count,
                              subscat_barrier** out) {
  return guarded([&] {
    need(out != nullptr, "out must be non-null");
    const auto half = segments_of(widths, heights, count);
    *out = new subscat_barrier{subscat::make_symmetric(a, half)};
  });
}

void subscat_barrier_free(subscat_barrier* barrier) { delete barrier; }

int subscat_barrier_describe(const subscat_barrier* barrier, subscat_barrier_info* out) {
  return guarded([&] {
    need(barrier && out, "arguments must be non-null");
    const auto& s = barrier->spec;
    *out = {s.left(), s.right(), s.center(), s.min_height(), s.max_height(), s.segments().size(), s.has_wells()};
  });
}

int subscat_solve(const subscat_barrier* barrier, double k, subscat_amplitudes* out) {
  return guarded([&] {
    need(barrier && out, "arguments must be non-null");
    fill(subscat::solve_stationary(barrier->spec, k), out);
  });
}

int subscat_numerov(const subscat_barrier* barrier, double k, double points_per_wavelength, subscat_amplitudes* out) {
  return guarded([&] {
    need(barrier && out, "arguments must be non-null");
    const auto r = subscat::numerov_solve(barrier->spec, k, subscat::numerov_grid(barrier->spec, k, points_per_wavelength));
    *out = {r.a_t.real(), r.a_t.imag(), r.a_r.real(), r.a_r.imag(), r.t_coef, r.r_coef,
            std::abs(r.t_coef + r.r_coef - 1.0)};
  });
}

int subscat_field(const subscat_barrier* barrier, double k, const double* xs, size_t n, double* re, double* im) {
  return guarded([&] {
    need(barrier && xs && re && im, "arguments must be non-null");
    const auto sol = subscat::solve_stationary(barrier->spec, k);
    split(subscat::evaluate_full(sol, {xs, n}), re, im);
  });
}

int subscat_decompose(const subscat_barrier* barrier, double k, subscat_decomposition* out) {
  return guarded([&] {
    need(barrier && out, "arguments must be non-null");
    const auto sol = subscat::solve_stationary(barrier->spec, k);
    const auto d = subscat::decompose(barrier->spec, sol);
    out->k = k;
    out->a_tr_in_re = d.a_tr_in.real();
    out->a_tr_in_im = d.a_tr_in.imag();
    out->a_ref_in_re = d.a_ref_in.real();
    out->a_ref_in_im = d.a_ref_in.imag();
    out->a_ref_r_re = d.a_ref_r.real();
    out->a_ref_r_im = d.a_ref_r.imag();
    out->transmission = sol.t_coef;
    out->reflection = sol.r_coef;
    out->selected_at_center = d.diagnostics.selected_at_center;
    out->rejected_at_center = d.diagnostics.rejected_at_center;
    out->propagation_mismatch = d.diagnostics.propagation_mismatch;
    out->sum_residual = std::abs(d.a_tr_in + d.a_ref_in - 1.0);
    out->modulus_residual = std::max(std::abs(std::abs(d.a_tr_in) - std::abs(sol.a_t)),
                                     std::abs(std::abs(d.a_ref_in) - std::abs(sol.a_r)));
    out->degenerate = d.degenerate;
  });
}

int subscat_substates(const subscat_barrier* barrier, double k, const double* xs, size_t n, double* full_re,
                      double* full_im, double* tr_re, double* tr_im, double* ref_re, double* ref_im) {
  return guarded([&] {
    need(barrier && xs, "arguments must be non-null");
    const auto sol = subscat::solve_stationary(barrier->spec, k);
    const auto d = subscat::decompose(barrier->spec, sol);
    const auto m = subscat::masked_substates(d, {xs, n});
    split(m.full, full_re, full_im);
    split(m.tr, tr_re, tr_im);
    split(m.ref, ref_re, ref_im);
  });
}

int subscat_packet_validate(const subscat_barrier* barrier, const subscat_packet* packet, subscat_evolution_info* info) {
  return guarded([&] {
    need(barrier != nullptr, "barrier must be non-null");
    const auto p = subscat::make_gaussian_packet(barrier->spec, packet_of(packet));
    if (info) {
      *info = {};
      info->k_nodes = static_cast<size_t>(std::count_if(p.ks.begin(), p.ks.end(), [](double k) { return k > 0.0; }));
      info->dk = p.dk;
      info->raw_norm = p.raw_norm;
      info->negative_fraction = p.negative_fraction;
      info->tail_ratio = p.tail_ratio;
      info->center = barrier->spec.center();
    }
  });
}

int subscat_evolution_create(const subscat_barrier* barrier, const subscat_packet* packet, subscat_evolution** out) {
  return guarded([&] {
    need(barrier && out, "arguments must be non-null");
    auto spectral = subscat::make_gaussian_packet(barrier->spec, packet_of(packet));
    *out = new subscat_evolution{subscat::PacketEvolution(barrier->spec, std::move(spectral))};
  });
}

void subscat_evolution_free(subscat_evolution* evolution) { delete evolution; }

int subscat_evolution_info_get(const subscat_evolution* evolution, subscat_evolution_info* out) {
  return guarded([&] {
    need(evolution && out, "arguments must be non-null");
    const auto& ev = evolution->ev;
    const auto& p = ev.packet();
    *out = {ev.ks().size(),      p.dk,           p.raw_norm,      p.negative_fraction,   p.tail_ratio,
            ev.transmission(), ev.reflection(), ev.max_speed(), ev.barrier().center()};
  });
}

int subscat_evolution_ks(const subscat_evolution* evolution, double* out) {
  return guarded([&] {
    need(evolution && out, "arguments must be non-null");
    std::copy(evolution->ev.ks().begin(), evolution->ev.ks().end(), out);
  });
}

int subscat_evolution_grid(const subscat_evolution* evolution, double t_max, double dx, subscat_grid* out) {
  return guarded([&] {
    need(evolution && out, "arguments must be non-null");
    const auto g = evolution->ev.default_grid(t_max, dx);
    *out = {g.origin, g.dx, g.points};
  });
}

int subscat_evolution_snapshot(const subscat_evolution* evolution, double t, const subscat_grid* grid, double* full_re,
                               double* full_im, double* tr_re, double* tr_im, double* ref_re, double* ref_im,
                               subscat_snapshot_scalars* out) {
  return guarded([&] {
    need(evolution != nullptr, "evolution must be non-null");
    const auto snap = evolution->ev.snapshot(t, grid_of(grid));
    split(snap.full, full_re, full_im);
    split(snap.tr, tr_re, tr_im);
    split(snap.ref, ref_re, ref_im);
    if (out) {
      const auto s = subscat::norms_and_overlap(snap, evolution->ev.barrier().center());
      *out = {s.t, s.norm_full, s.transmitted, s.reflected, s.overlap_re, s.overlap_im};
    }
  });
}

int subscat_evolution_check_resolution(const subscat_evolution* evolution, double t, const subscat_grid* grid,
                                       double* drift) {
  return guarded([&] {
    need(evolution != nullptr, "evolution must be non-null");
    const auto g = grid_of(grid);
    if (drift) *drift = evolution->ev.aliasing_drift(t, g);
    evolution->ev.verify_k_resolution(t, g);
  });
}

int subscat_evolution_oracle_compare(const subscat_evolution* evolution, double t_begin, double t_end, double dx,
                                     double dt, size_t checkpoints, double* times, double* l2) {
  return guarded([&] {
    need(evolution && times && l2, "arguments must be non-null");
    const auto c = subscat::compare_with_crank_nicolson(evolution->ev, t_begin, t_end, dx, dt, checkpoints);
    std::copy(c.times.begin(), c.times.end(), times);
    std::copy(c.l2.begin(), c.l2.end(), l2);
  });
}

int subscat_dwell_time(const subscat_barrier* barrier, double k, int subprocess, double* out) {
  return guarded([&] {
    need(barrier && out, "arguments must be non-null");
    const auto which = subprocess_of(subprocess);
    const auto sol = subscat::solve_stationary(barrier->spec, k);
    const auto d = subscat::decompose(barrier->spec, sol);
    *out = which == subscat::Subprocess::transmission ? subscat::dwell_time_tr(d) : subscat::dwell_time_ref(d);
  });
}

int subscat_evolution_dwell_table(const subscat_evolution* evolution, int subprocess, double* out) {
  return guarded([&] {
    need(evolution && out, "arguments must be non-null");
    const auto t = subscat::dwell_table(evolution->ev, subprocess_of(subprocess));
    std::copy(t.begin(), t.end(), out);
  });
}

int subscat_phase_time_at(const subscat_barrier* barrier, double k, subscat_phase_time* out) {
  return guarded([&] {
    need(barrier && out, "arguments must be non-null");
    const auto p = subscat::phase_time(barrier->spec, k);
    *out = {p.k, p.transmission_delay, p.traversal, p.reflection_delay};
  });
}

int subscat_larmor_time(const subscat_evolution* evolution, int subprocess, const subscat_time_options* options,
                        subscat_larmor_result* out) {
  return guarded([&] {
    need(evolution && out, "arguments must be non-null");
    const auto which = subprocess_of(subprocess);
    subscat::RouteAOptions opt;
    if (options) {
      if (options->has_domain) opt.domain = std::pair{options->x_lo, options->x_hi};
      if (options->has_window) opt.window = std::pair{options->t_lo, options->t_hi};
      if (options->rel_tol > 0.0) opt.rel_tol = options->rel_tol;
      if (options->threshold > 0.0) opt.threshold = options->threshold;
    }
    const auto& ev = evolution->ev;
    const auto a = subscat::larmor_time_route_a(ev, which, opt);
    const auto dwell = subscat::dwell_table(ev, which);
    const auto printed = subscat::larmor_time_route_b(ev, which, dwell, subscat::SpectralWeight::printed);
    const auto squared = subscat::larmor_time_route_b(ev, which, dwell, subscat::SpectralWeight::squared);
    out->norm = which == subscat::Subprocess::transmission ? ev.transmission() : ev.reflection();
    out->route_a = a.time;
    out->t_lo = a.t_lo;
    out->t_hi = a.t_hi;
    out->tail = a.tail;
    out->evaluations = a.evaluations;
    out->monotone = a.monotone;
    out->route_b_printed_re = printed.time.real();
    out->route_b_printed_im = printed.time.imag();
    out->weight_norm_printed_re = printed.weight_norm.real();
    out->weight_norm_printed_im = printed.weight_norm.imag();
    out->route_b_squared = squared.time.real();
    out->weight_norm_squared = squared.weight_norm.real();
    out->residual_printed = std::abs(a.time - printed.time) / std::abs(printed.time);
    out->residual_squared = std::abs(a.time - squared.time) / std::abs(squared.time);
  });
}

int subscat_clock(const subscat_barrier* barrier, const subscat_packet* packet, const double* omegas, size_t count,
                  subscat_clock_reading* readings, subscat_clock_result* out) {
  return guarded([&] {
    need(barrier && omegas && readings && out, "arguments must be non-null");
    const auto spectral = subscat::make_gaussian_packet(barrier->spec, packet_of(packet));
    const auto r = subscat::clock_times(barrier->spec, spectral, {omegas, count});
    for (size_t i = 0; i < count; ++i) {
      const auto& c = r.readings[i];
      readings[i] = {c.omega, c.theta_t, c.theta_r, c.tau_t, c.tau_r, c.sz_t, c.sz_r, c.inplane_t, c.inplane_r};
    }
    *out = {r.tr.value,  r.tr.error,       r.tr.stable, r.tr.contracting,       r.tr.largest_change,
            r.ref.value, r.ref.error,      r.ref.stable, r.ref.contracting,     r.ref.largest_change,
            r.perturbative_warning};
  });
}

int subscat_clock_time_at(const subscat_barrier* barrier, double omega, double k, double* out) {
  return guarded([&] {
    need(barrier && out, "arguments must be non-null");
    *out = subscat::clock_time_at(barrier->spec, omega, k);
  });
}

}  // extern "C"
