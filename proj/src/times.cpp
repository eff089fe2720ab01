#include "subscat/times.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "subscat/error.hpp"
#include "subscat/parallel.hpp"

namespace subscat {

namespace {

constexpr double kDwellTolerance = 1e-8;
constexpr double kUndefinedNorm = 1e-12;

// Segment edges and x_c strictly inside (lo, hi), plus lo and hi, sorted.
std::vector<double> breakpoints(const ScatteringSolution& sol, double lo, double hi) {
  std::vector<double> pts{lo, hi};
  for (const SegmentField& s : sol.segments())
    for (double e : {s.left, s.right})
      if (e > lo && e < hi) pts.push_back(e);
  if (sol.center() > lo && sol.center() < hi) pts.push_back(sol.center());
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

double density_integral(const Decomposition& dec, Subprocess which, double lo, double hi) {
  const auto pts = breakpoints(dec.solution(), lo, hi);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    total += integrate_smooth(
        [&](double x) {
          const auto s = dec.sample(x);
          return std::norm(which == Subprocess::transmission ? s.tr : s.ref);
        },
        pts[i], pts[i + 1], kDwellTolerance);
  }
  return total;
}

double subprocess_coef(const ScatteringSolution& sol, Subprocess which) {
  return which == Subprocess::transmission ? sol.t_coef : sol.r_coef;
}

double spectral_norm(const PacketEvolution& ev, Subprocess which) {
  return which == Subprocess::transmission ? ev.transmission() : ev.reflection();
}

const char* name(Subprocess which) { return which == Subprocess::transmission ? "transmission" : "reflection"; }

// f(t) = int |psi(x, t)|^2 dx over a fixed Gauss-Legendre rule, with the
// stationary sub-state sampled once at every node.
class DensityInRegion {
 public:
  DensityInRegion(const PacketEvolution& ev, Subprocess which, double lo, double hi) : ev_(ev) {
    const auto ks = ev.ks();
    const BarrierSpec& bar = ev.barrier();
    double local_k = ks.back();
    for (const Segment& s : bar.segments())
      local_k = std::max(local_k, std::sqrt(ks.back() * ks.back() + 2.0 * std::abs(s.height)));
    const auto pts = breakpoints(ev.states().front().solution(), lo, hi);
    rule_ = composite_gauss_legendre(pts, 2.0 * std::numbers::pi / local_k);

    nk_ = ks.size();
    basis_.resize(rule_.nodes.size() * nk_);
    const auto states = ev.states();
    parallel_for(rule_.nodes.size(), [&](std::size_t j) {
      for (std::size_t i = 0; i < nk_; ++i) {
        const auto s = states[i].sample(rule_.nodes[j]);
        basis_[j * nk_ + i] = which == Subprocess::transmission ? s.tr : s.ref;
      }
    });
  }

  double operator()(double t) const {
    const auto c = ev_.coefficients(t);
    double total = 0.0;
    for (std::size_t j = 0; j < rule_.nodes.size(); ++j) {
      const cplx* row = &basis_[j * nk_];
      cplx psi{};
      for (std::size_t i = 0; i < nk_; ++i) psi += c[i] * row[i];
      total += rule_.weights[j] * std::norm(psi);
    }
    return total;
  }

 private:
  const PacketEvolution& ev_;
  QuadratureRule rule_;
  std::size_t nk_ = 0;
  std::vector<cplx> basis_;
};

// Scan outward from the arrival time until the integrand has dropped below
// threshold * peak on both sides of its maximum.
std::pair<double, double> detect_window(const DensityInRegion& f, const PacketEvolution& ev, double threshold) {
  const auto& p = ev.packet().params;
  const double k0 = p.k0;
  const double step = 0.25 * std::min(p.sigma, ev.barrier().length() + p.sigma) / ev.max_speed();
  const double arrival = (ev.barrier().left() - p.x0) / k0;
  constexpr std::size_t kMaxSteps = 200000;

  double peak = 0.0;
  double t_hi = arrival;
  std::size_t steps = 0;
  // Forward: past the peak and down to threshold * peak.
  for (;; t_hi += step) {
    const double v = f(t_hi);
    peak = std::max(peak, v);
    if (t_hi > arrival && peak > 0.0 && v < threshold * peak) break;
    if (++steps > kMaxSteps) fail(ErrorKind::numerical, "route A: event window did not close; integrand decays too slowly");
  }
  double t_lo = arrival;
  steps = 0;
  for (;; t_lo -= step) {
    const double v = f(t_lo);
    if (v > peak) peak = v;
    if (v < threshold * peak) break;
    if (++steps > kMaxSteps) fail(ErrorKind::numerical, "route A: event window did not open before the arrival time");
  }
  return {t_lo, t_hi};
}

}  // namespace

double dwell_time_tr(const Decomposition& dec) {
  const ScatteringSolution& sol = dec.solution();
  require(sol.t_coef > kUndefinedNorm, ErrorKind::undefined, "dwell time (transmission): T(k) vanishes");
  return density_integral(dec, Subprocess::transmission, sol.left(), sol.right()) / (dec.k * sol.t_coef);
}

double dwell_time_ref(const Decomposition& dec) {
  const ScatteringSolution& sol = dec.solution();
  if (sol.r_coef <= kUndefinedNorm) {
    std::ostringstream msg;
    msg << "dwell time (reflection): undefined at k = " << dec.k << ", R(k) = " << sol.r_coef;
    fail(ErrorKind::undefined, msg.str());
  }
  return density_integral(dec, Subprocess::reflection, sol.left(), sol.center()) / (dec.k * sol.r_coef);
}

RouteAResult larmor_time_route_a(const PacketEvolution& ev, Subprocess which, const RouteAOptions& options) {
  const BarrierSpec& bar = ev.barrier();
  const double norm = spectral_norm(ev, which);
  if (norm <= kUndefinedNorm) {
    std::ostringstream msg;
    msg << "route A (" << name(which) << "): sub-process norm " << norm << " vanishes";
    fail(ErrorKind::undefined, msg.str());
  }
  const auto [lo, hi] = options.domain.value_or(
      which == Subprocess::transmission ? std::pair{bar.left(), bar.right()} : std::pair{bar.left(), bar.center()});
  require(hi > lo && lo >= bar.left() && hi <= bar.right(), ErrorKind::domain,
          "route A: spatial domain must be a non-empty interval inside [a, b]");
  require(options.rel_tol > 0.0 && options.threshold > 0.0, ErrorKind::domain, "route A: tolerances must be positive");

  const DensityInRegion f(ev, which, lo, hi);
  RouteAResult res;
  if (options.window) {
    std::tie(res.t_lo, res.t_hi) = *options.window;
    require(res.t_hi > res.t_lo, ErrorKind::domain, "route A: empty time window");
  } else {
    std::tie(res.t_lo, res.t_hi) = detect_window(f, ev, options.threshold);
  }

  // A fixed number of time slices, integrated independently and summed in
  // order, keeps the result independent of the worker count.
  constexpr std::size_t slices = 16;
  const double width = (res.t_hi - res.t_lo) / static_cast<double>(slices);
  std::vector<SimpsonResult> parts(slices);
  parallel_for(slices, [&](std::size_t s) {
    const double a = res.t_lo + width * static_cast<double>(s);
    const double b = s + 1 == slices ? res.t_hi : a + width;
    parts[s] = adaptive_simpson(f, a, b, options.rel_tol, 8);
  });
  double total = 0.0;
  for (const auto& p : parts) {
    total += p.value;
    res.evaluations += p.evaluations;
    res.monotone = res.monotone && p.partial_sums_monotone;
  }

  double peak = 0.0;
  for (std::size_t s = 0; s <= 4 * slices; ++s) peak = std::max(peak, f(res.t_lo + 0.25 * width * static_cast<double>(s)));
  res.tail = peak > 0.0 ? std::max(f(res.t_lo), f(res.t_hi)) / peak : 0.0;
  if (options.window && res.tail > options.threshold) {
    std::ostringstream msg;
    msg << "route A: time window [" << res.t_lo << ", " << res.t_hi << "] too small, integrand at the ends is "
        << res.tail << " of its peak; extend the window";
    fail(ErrorKind::numerical, msg.str());
  }
  res.time = total / norm;
  return res;
}

std::vector<double> dwell_table(const PacketEvolution& ev, Subprocess which) {
  const auto states = ev.states();
  std::vector<double> out(states.size());
  parallel_for(states.size(), [&](std::size_t i) {
    const Decomposition& d = states[i];
    if (subprocess_coef(d.solution(), which) <= kUndefinedNorm) {
      out[i] = std::numeric_limits<double>::quiet_NaN();
      return;
    }
    out[i] = which == Subprocess::transmission ? dwell_time_tr(d) : dwell_time_ref(d);
  });
  return out;
}

RouteBResult larmor_time_route_b(const PacketEvolution& ev, Subprocess which, std::span<const double> dwell,
                                 SpectralWeight weight) {
  const auto states = ev.states();
  require(dwell.size() == states.size(), ErrorKind::domain, "route B: dwell table does not match the k-grid");
  const double norm = spectral_norm(ev, which);
  if (norm <= kUndefinedNorm) {
    std::ostringstream msg;
    msg << "route B (" << name(which) << "): sub-process norm " << norm << " vanishes";
    fail(ErrorKind::undefined, msg.str());
  }
  const auto w = ev.weights();
  const auto g = ev.spectrum();
  RouteBResult res;
  for (std::size_t i = 0; i < states.size(); ++i) {
    const double p = subprocess_coef(states[i].solution(), which);
    if (p <= kUndefinedNorm) continue;
    const cplx wk = weight == SpectralWeight::printed ? g[i] : cplx{std::norm(g[i])};
    res.weight_norm += w[i] * wk * p;
    res.time += w[i] * wk * p * dwell[i];
  }
  res.time /= norm;
  res.weight_norm /= norm;
  return res;
}

PhaseTime phase_time(const BarrierSpec& barrier, double k, double rel_step) {
  require(k > 0.0 && rel_step > 0.0 && rel_step < 0.1, ErrorKind::domain, "phase time: need k > 0 and 0 < step < 0.1");
  const double energy = 0.5 * k * k;
  const ScatteringSolution centre = solve_stationary(barrier, k);

  const bool with_reflection = centre.r_coef > kUndefinedNorm;
  struct Pair {
    double t;
    double r;
  };
  // Returns false when a neighbouring phase differs from the centre by pi/2 or more.
  auto diffs = [&](double h, Pair& out) {
    double dt[5] = {}, dr[5] = {};
    for (int m : {-2, -1, 1, 2}) {
      const ScatteringSolution s = solve_stationary(barrier, std::sqrt(2.0 * (energy + m * h)));
      dt[m + 2] = std::arg(s.a_t * std::conj(centre.a_t));
      dr[m + 2] = std::arg(s.a_r * std::conj(centre.a_r));
      const bool jump_r = with_reflection && std::abs(dr[m + 2]) >= 0.5 * std::numbers::pi;
      if (std::abs(dt[m + 2]) >= 0.5 * std::numbers::pi || jump_r) return false;
    }
    auto d = [h](const double* v) { return (8.0 * (v[3] - v[1]) - (v[4] - v[0])) / (12.0 * h); };
    out = {d(dt), d(dr)};
    return true;
  };
  require(centre.t_coef > kUndefinedNorm, ErrorKind::undefined, "phase time: transmission amplitude vanishes");

  // Close to a zero of A_R the phase turns quickly; shrink the step until the
  // stencil no longer straddles it.
  constexpr int kRefinements = 10;
  double h = rel_step * energy;
  Pair coarse{}, fine{};
  int level = 0;
  for (; level <= kRefinements; ++level, h *= 0.25)
    if (diffs(h, coarse) && diffs(0.5 * h, fine)) break;
  if (level > kRefinements) {
    std::ostringstream msg;
    msg << "phase time: phase jumps by pi/2 or more between neighbouring energies at k = " << k
        << " even with energy step " << h / energy << " E; densify the energy grid";
    fail(ErrorKind::numerical, msg.str());
  }
  // Fourth-order differences: one Richardson step with factor 2^4.
  const double dphi_t = fine.t + (fine.t - coarse.t) / 15.0;
  const double dphi_r = with_reflection ? fine.r + (fine.r - coarse.r) / 15.0
                                                        : std::numeric_limits<double>::quiet_NaN();
  PhaseTime out;
  out.k = k;
  out.transmission_delay = dphi_t;
  out.traversal = dphi_t + barrier.length() / k;
  out.reflection_delay = dphi_r - 2.0 * barrier.left() / k;
  return out;
}

std::vector<PhaseTime> phase_time_table(const BarrierSpec& barrier, std::span<const double> ks, double rel_step) {
  std::vector<PhaseTime> out(ks.size());
  parallel_for(ks.size(), [&](std::size_t i) { out[i] = phase_time(barrier, ks[i], rel_step); });
  return out;
}

namespace {

LarmorTimes larmor_times(const PacketEvolution& ev, Subprocess which, std::span<const double> dwell,
                         const RouteAOptions& options) {
  LarmorTimes lt;
  lt.norm = spectral_norm(ev, which);
  lt.route_a = larmor_time_route_a(ev, which, options);
  lt.route_b_printed = larmor_time_route_b(ev, which, dwell, SpectralWeight::printed);
  lt.route_b_squared = larmor_time_route_b(ev, which, dwell, SpectralWeight::squared);
  auto rel = [&](cplx b) { return std::abs(lt.route_a.time - b) / std::abs(b); };
  lt.residual_printed = rel(lt.route_b_printed.time);
  lt.residual_squared = rel(lt.route_b_squared.time);
  return lt;
}

}  // namespace

TimeReport compute_time_report(const PacketEvolution& ev, const RouteAOptions& options) {
  require(!options.domain, ErrorKind::domain, "time report: the spatial domain is fixed per sub-process");
  TimeReport rep;
  rep.ks.assign(ev.ks().begin(), ev.ks().end());
  rep.dwell_tr = dwell_table(ev, Subprocess::transmission);
  rep.dwell_ref = dwell_table(ev, Subprocess::reflection);
  rep.larmor_tr = larmor_times(ev, Subprocess::transmission, rep.dwell_tr, options);
  if (ev.reflection() > kUndefinedNorm) {
    rep.larmor_ref = larmor_times(ev, Subprocess::reflection, rep.dwell_ref, options);
    RouteAOptions whole = options;
    whole.domain = std::pair{ev.barrier().left(), ev.barrier().right()};
    rep.ref_full_barrier = larmor_time_route_a(ev, Subprocess::reflection, whole).time;
  }
  rep.phase = phase_time_table(ev.barrier(), rep.ks);
  return rep;
}

}  // namespace subscat
