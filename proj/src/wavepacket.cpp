#include "subscat/wavepacket.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>

#include "subscat/error.hpp"
#include "subscat/parallel.hpp"

namespace subscat {

namespace {

constexpr std::size_t kBlock = 256;
constexpr std::size_t kReseed = 32;  // plane-wave recurrence is re-anchored this often

cplx gaussian_g(const PacketParams& p, double k) {
  const double amp = std::pow(p.sigma * p.sigma / std::numbers::pi, 0.25);
  const double dk = k - p.k0;
  return std::polar(amp * std::exp(-0.5 * p.sigma * p.sigma * dk * dk), -k * p.x0);
}

}  // namespace

SpectralPacket make_gaussian_packet(const BarrierSpec& barrier, const PacketParams& params) {
  require(std::isfinite(params.x0) && std::isfinite(params.sigma) && std::isfinite(params.k0), ErrorKind::domain,
          "packet: parameters must be finite");
  require(params.sigma > 0.0 && params.k0 > 0.0, ErrorKind::domain, "packet: sigma and k0 must be positive");
  require(params.k_points >= 16, ErrorKind::domain, "packet: k-grid needs at least 16 points");
  require(params.half_width_sigmas > 0.0, ErrorKind::domain, "packet: k-grid half width must be positive");
  {
    std::ostringstream msg;
    msg << "packet: completed-scattering criterion violated, x0 + 5 sigma = " << params.x0 + 5.0 * params.sigma
        << " must lie left of the barrier edge a = " << barrier.left();
    require(params.x0 + 5.0 * params.sigma < barrier.left(), ErrorKind::domain, msg.str());
  }
  {
    std::ostringstream msg;
    msg << "packet: completed-scattering criterion violated, k0 - 5/sigma = " << params.k0 - 5.0 / params.sigma
        << " is negative (non-negligible k <= 0 content)";
    require(params.k0 * params.sigma >= 5.0, ErrorKind::domain, msg.str());
  }

  SpectralPacket p;
  p.params = params;
  const double k_lo = std::max(0.0, params.k0 - params.half_width_sigmas / params.sigma);
  const double k_hi = params.k0 + params.half_width_sigmas / params.sigma;
  const std::size_t n = params.k_points;
  p.dk = (k_hi - k_lo) / static_cast<double>(n - 1);
  p.ks.resize(n);
  p.weights.assign(n, p.dk);
  p.weights.front() = p.weights.back() = 0.5 * p.dk;
  p.g.resize(n);
  p.big_g.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double k = i + 1 == n ? k_hi : k_lo + p.dk * static_cast<double>(i);
    p.ks[i] = k;
    p.g[i] = gaussian_g(params, k);
    p.big_g[i] = p.g[i] - gaussian_g(params, -k);
  }
  for (std::size_t i = 0; i < n; ++i) p.raw_norm += p.weights[i] * std::norm(p.big_g[i]);
  const double scale = 1.0 / std::sqrt(p.raw_norm);
  double peak = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    p.g[i] *= scale;
    p.big_g[i] *= scale;
    peak = std::max(peak, std::abs(p.big_g[i]));
  }
  p.tail_ratio = std::max(std::abs(p.big_g.front()), std::abs(p.big_g.back())) / peak;
  p.negative_fraction = 0.5 * std::erfc(params.k0 * params.sigma);

  std::ostringstream msg;
  msg << "packet: spectral tails not negligible (cutoff ratio " << p.tail_ratio << ", k<=0 fraction "
      << p.negative_fraction << ")";
  require(p.tail_ratio < 1e-8 && p.negative_fraction < 1e-10, ErrorKind::numerical, msg.str());
  return p;
}

PacketEvolution::PacketEvolution(BarrierSpec barrier, SpectralPacket packet)
    : barrier_(std::move(barrier)), packet_(std::move(packet)) {
  for (std::size_t i = 0; i < packet_.ks.size(); ++i) {
    if (packet_.ks[i] <= 0.0) continue;
    ks_.push_back(packet_.ks[i]);
    weights_.push_back(packet_.weights[i]);
    big_g_.push_back(packet_.big_g[i]);
  }
  require(ks_.size() >= 2, ErrorKind::domain, "packet: fewer than two positive k-nodes");

  SolutionCache cache(barrier_);
  std::vector<std::optional<Decomposition>> slots(ks_.size());
  parallel_for(ks_.size(), [&](std::size_t j) {
    const auto sol = cache.get(ks_[j]);
    slots[j] = decompose(barrier_, *sol);
  });
  states_.reserve(ks_.size());
  for (auto& s : slots) states_.push_back(std::move(*s));

  for (std::size_t j = 0; j < ks_.size(); ++j) {
    const double w = weights_[j] * std::norm(big_g_[j]);
    transmission_ += w * states_[j].solution().t_coef;
    reflection_ += w * states_[j].solution().r_coef;
  }
}

std::vector<cplx> PacketEvolution::coefficients(double t) const {
  const double inv = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  std::vector<cplx> c(ks_.size());
  for (std::size_t j = 0; j < ks_.size(); ++j)
    c[j] = weights_[j] * big_g_[j] * std::polar(inv, -0.5 * ks_[j] * ks_[j] * t);
  return c;
}

PacketEvolution::Fields PacketEvolution::synthesize_all(std::span<const cplx> coeffs,
                                                        std::span<const std::size_t> nodes,
                                                        std::span<const double> xs, bool substates) const {
  const std::size_t m = nodes.size();
  std::vector<double> kk(m);
  std::vector<cplx> c(m), c_r(m), c_tr(m), c_ref(m), c_t(m);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t j = nodes[i];
    const Decomposition& d = states_[j];
    kk[i] = ks_[j];
    c[i] = coeffs[i];
    c_r[i] = coeffs[i] * d.solution().a_r;
    c_tr[i] = coeffs[i] * d.a_tr_in;
    c_ref[i] = coeffs[i] * d.a_ref_in;
    c_t[i] = coeffs[i] * d.solution().a_t;
  }
  const double step = m > 1 ? kk[1] - kk[0] : 0.0;
  const double a = barrier_.left();
  const double b = barrier_.right();

  Fields out;
  out.full.resize(xs.size());
  if (substates) {
    out.tr.resize(xs.size());
    out.ref.resize(xs.size());
  }
  const std::size_t blocks = (xs.size() + kBlock - 1) / kBlock;
  parallel_for(blocks, [&](std::size_t blk) {
    const std::size_t end = std::min(xs.size(), (blk + 1) * kBlock);
    for (std::size_t p = blk * kBlock; p < end; ++p) {
      const double x = xs[p];
      cplx full{}, tr{}, ref{};
      if (x < a || x > b) {
        // Outside the barrier every component is a plane-wave sum over a
        // uniform k-grid: exp(i k_i x) advances by exp(i step x).
        const cplx advance = std::polar(1.0, step * x);
        cplx e;
        cplx s_in{}, s_out{}, s_tr{}, s_ref{};
        for (std::size_t i = 0; i < m; ++i) {
          e = i % kReseed == 0 ? std::polar(1.0, kk[i] * x) : e * advance;
          if (x > b) {
            s_in += c_t[i] * e;
          } else {
            s_in += c[i] * e;
            s_out += c_r[i] * std::conj(e);
            s_tr += c_tr[i] * e;
            s_ref += c_ref[i] * e;
          }
        }
        if (x > b) {
          full = tr = s_in;
        } else {
          full = s_in + s_out;
          tr = s_tr;
          ref = s_ref + s_out;
        }
      } else {
        for (std::size_t i = 0; i < m; ++i) {
          const Decomposition::Sample s = states_[nodes[i]].sample(x);
          full += c[i] * s.full;
          tr += c[i] * s.tr;
          ref += c[i] * s.ref;
        }
      }
      out.full[p] = full;
      if (substates) {
        out.tr[p] = tr;
        out.ref[p] = ref;
      }
    }
  });
  return out;
}

namespace {

std::vector<std::size_t> all_nodes(std::size_t n) {
  std::vector<std::size_t> nodes(n);
  for (std::size_t i = 0; i < n; ++i) nodes[i] = i;
  return nodes;
}

}  // namespace

std::vector<cplx> PacketEvolution::synthesize(Component component, double t, std::span<const double> xs) const {
  const auto coeffs = coefficients(t);
  const auto nodes = all_nodes(ks_.size());
  Fields f = synthesize_all(coeffs, nodes, xs, component != Component::full);
  switch (component) {
    case Component::full:
      return std::move(f.full);
    case Component::tr:
      return std::move(f.tr);
    case Component::ref:
      return std::move(f.ref);
  }
  return {};
}

Snapshot PacketEvolution::snapshot(double t, const UniformGrid& grid) const {
  const auto xs = grid.samples();
  const auto coeffs = coefficients(t);
  const auto nodes = all_nodes(ks_.size());
  Fields f = synthesize_all(coeffs, nodes, xs, true);
  return {t, grid, std::move(f.full), std::move(f.tr), std::move(f.ref)};
}

UniformGrid PacketEvolution::default_grid(double t_max, double dx) const {
  const double reach = max_speed() * std::abs(t_max);
  const double lo = packet_.params.x0 - 10.0 * packet_.params.sigma - reach;
  const double hi = barrier_.right() + reach + 10.0 * packet_.params.sigma;
  return UniformGrid::anchored(lo, hi, dx, barrier_.center());
}

double PacketEvolution::aliasing_drift(double t, const UniformGrid& grid) const {
  const auto xs = grid.samples();
  const std::size_t split = grid.nearest(barrier_.center());

  const auto coeffs = coefficients(t);
  const auto nodes = all_nodes(ks_.size());
  const Fields fine = synthesize_all(coeffs, nodes, xs, false);

  std::vector<std::size_t> half_nodes;
  std::vector<cplx> half_coeffs;
  for (std::size_t j = 0; j < ks_.size(); j += 2) {
    half_nodes.push_back(j);
    const double w = j + 1 == ks_.size() ? weights_[j] : 2.0 * packet_.dk;
    half_coeffs.push_back(coeffs[j] * (w / weights_[j]));
  }
  const Fields coarse = synthesize_all(half_coeffs, half_nodes, xs, false);

  auto norm = [&](const std::vector<cplx>& f) {
    std::vector<double> dens(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) dens[i] = std::norm(f[i]);
    return integrate_uniform(dens, grid.dx, split);
  };
  return std::abs(norm(fine.full) - norm(coarse.full));
}

void PacketEvolution::verify_k_resolution(double t, const UniformGrid& grid) const {
  const double drift = aliasing_drift(t, grid);
  if (drift > 1e-4) {
    std::ostringstream msg;
    msg << "packet: k-grid too coarse, norm drifts by " << drift << " between resolutions at t = " << t
        << "; refine the k-grid";
    fail(ErrorKind::numerical, msg.str());
  }
}

SnapshotScalars norms_and_overlap(const Snapshot& snap, double center) {
  const UniformGrid& g = snap.grid;
  require(g.points >= 3 && snap.full.size() == g.points && snap.tr.size() == g.points && snap.ref.size() == g.points,
          ErrorKind::domain, "norms_and_overlap: snapshot arrays do not match the grid");
  const double edge_density = std::max(std::norm(snap.full.front()), std::norm(snap.full.back()));
  if (edge_density > 1e-10) {
    std::ostringstream msg;
    msg << "norms_and_overlap: packet support truncated (density " << edge_density
        << " at the grid edge); widen the grid";
    fail(ErrorKind::numerical, msg.str());
  }
  const std::size_t split = g.nearest(center);

  std::vector<double> full(g.points), tr(g.points), ref(g.points);
  std::vector<cplx> cross(g.points);
  for (std::size_t i = 0; i < g.points; ++i) {
    full[i] = std::norm(snap.full[i]);
    tr[i] = std::norm(snap.tr[i]);
    ref[i] = std::norm(snap.ref[i]);
    cross[i] = std::conj(snap.tr[i]) * snap.ref[i];
  }
  SnapshotScalars s;
  s.t = snap.t;
  s.norm_full = integrate_uniform(full, g.dx, split);
  s.transmitted = integrate_uniform(tr, g.dx, split);
  s.reflected = integrate_uniform(ref, g.dx, split);
  const cplx overlap = integrate_uniform(std::span<const cplx>(cross), g.dx, split);
  s.overlap_re = overlap.real();
  s.overlap_im = overlap.imag();
  return s;
}

std::vector<std::string> snapshot_violations(const SnapshotScalars& s, const SnapshotTolerances& tol) {
  std::vector<std::string> out;
  auto add = [&](const char* what, double value, double limit) {
    std::ostringstream msg;
    msg << "t = " << s.t << ": " << what << " = " << value << " exceeds " << limit;
    out.push_back(msg.str());
  };
  if (std::abs(s.norm_full - 1.0) > tol.norm) add("|norm - 1|", std::abs(s.norm_full - 1.0), tol.norm);
  if (std::abs(s.transmitted + s.reflected - 1.0) > tol.sum)
    add("|T_t + R_t - 1|", std::abs(s.transmitted + s.reflected - 1.0), tol.sum);
  if (std::abs(s.overlap_re) > tol.overlap) add("|Re<psi_tr|psi_ref>|", std::abs(s.overlap_re), tol.overlap);
  return out;
}

}  // namespace subscat
