#include "subscat/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "subscat/error.hpp"

namespace subscat {

void GridSpec::validate(bool need_dt) const {
  require(points >= 3, ErrorKind::domain, "grid: at least 3 points required");
  require(std::isfinite(x_min) && std::isfinite(x_max) && x_max > x_min, ErrorKind::domain,
          "grid: x_max must exceed x_min");
  if (need_dt) require(dt > 0.0 && std::isfinite(dt), ErrorKind::domain, "grid: dt must be positive");
}

namespace {

constexpr double kMinPointsPerWavelength = 50.0;
constexpr double kRescale = 1e100;

struct Node {
  double x;
  double h_left;   // distance to the next node on the left
  double f_left;   // 2 (E - V) on the left
  double h_right;
  double f_right;
};

// cos(q h) and sin(q h) / (q h) to fourth order in h, with q^2 = f.
double taylor_c(double f, double h) {
  const double u = f * h * h;
  return 1.0 - u / 2.0 + u * u / 24.0;
}
double taylor_s(double f, double h) {
  const double u = f * h * h;
  return 1.0 - u / 6.0 + u * u / 120.0;
}

}  // namespace

GridSpec numerov_grid(const BarrierSpec& barrier, double k, double points_per_wavelength) {
  require(k > 0.0 && points_per_wavelength > 0.0, ErrorKind::domain, "numerov: k and resolution must be positive");
  const double e = 0.5 * k * k;
  double rate = k;
  for (const Segment& s : barrier.segments()) rate = std::max(rate, std::sqrt(2.0 * std::abs(e - s.height)));
  const double h = 2.0 * std::numbers::pi / rate / points_per_wavelength;
  GridSpec g;
  g.x_min = barrier.left();
  g.x_max = barrier.right();
  g.points = static_cast<std::size_t>(std::ceil(barrier.length() / h)) + 1;
  return g;
}

NumerovResult numerov_solve(const BarrierSpec& barrier, double k, const GridSpec& grid) {
  grid.validate(false);
  require(k > 0.0 && std::isfinite(k), ErrorKind::domain, "numerov: k must be positive");
  require(grid.x_min <= barrier.left() && grid.x_max >= barrier.right(), ErrorKind::domain,
          "numerov: grid must span the barrier");
  const double e = 0.5 * k * k;
  const double h = grid.step();
  const auto segs = barrier.segments();
  const auto edges = barrier.edges();

  // Nodes from b + h_out down to a - h_out, right to left.
  std::vector<Node> nodes;
  double rate = k;
  const double f_out = 2.0 * e;
  std::vector<double> seg_h(segs.size());
  std::vector<int> seg_n(segs.size());
  for (std::size_t i = 0; i < segs.size(); ++i) {
    const double w = edges[i + 1] - edges[i];
    seg_n[i] = std::max(2, static_cast<int>(std::ceil(w / h)));
    seg_h[i] = w / seg_n[i];
    rate = std::max(rate, std::sqrt(2.0 * std::abs(e - segs[i].height)));
  }
  const double finest = *std::max_element(seg_h.begin(), seg_h.end());
  NumerovResult res;
  res.points_per_wavelength = 2.0 * std::numbers::pi / rate / std::max(finest, h);
  if (res.points_per_wavelength < kMinPointsPerWavelength) {
    std::ostringstream msg;
    msg << "numerov: resolution check failed, " << res.points_per_wavelength
        << " points per shortest wavelength (need " << kMinPointsPerWavelength << ")";
    fail(ErrorKind::numerical, msg.str());
  }

  const std::size_t last = segs.size() - 1;
  nodes.push_back({barrier.right() + seg_h[last], 0.0, f_out, 0.0, f_out});
  for (std::size_t ii = segs.size(); ii-- > 0;) {
    const double f_seg = 2.0 * (e - segs[ii].height);
    const double f_right = ii == last ? f_out : 2.0 * (e - segs[ii + 1].height);
    const double h_right = ii == last ? seg_h[last] : seg_h[ii + 1];
    nodes.push_back({edges[ii + 1], seg_h[ii], f_seg, h_right, f_right});
    for (int j = seg_n[ii] - 1; j >= 1; --j)
      nodes.push_back({edges[ii] + seg_h[ii] * j, seg_h[ii], f_seg, seg_h[ii], f_seg});
  }
  nodes.push_back({barrier.left(), seg_h[0], f_out, seg_h[0], 2.0 * (e - segs[0].height)});
  nodes.push_back({barrier.left() - seg_h[0], 0.0, f_out, 0.0, f_out});

  std::vector<cplx> psi(nodes.size());
  psi[0] = std::polar(1.0, k * seg_h[last]);
  psi[1] = 1.0;
  double log_scale = 0.0;
  for (std::size_t n = 1; n + 1 < nodes.size(); ++n) {
    const Node& nd = nodes[n];
    if (nd.f_left == nd.f_right && nd.h_left == nd.h_right) {
      const double u = nd.h_left * nd.h_left * nd.f_left / 12.0;
      psi[n + 1] = (2.0 * (1.0 - 5.0 * u) * psi[n] - (1.0 + u) * psi[n - 1]) / (1.0 + u);
    } else {
      const cplx slope = (psi[n - 1] - taylor_c(nd.f_right, nd.h_right) * psi[n]) /
                         (nd.h_right * taylor_s(nd.f_right, nd.h_right));
      psi[n + 1] = taylor_c(nd.f_left, nd.h_left) * psi[n] - nd.h_left * taylor_s(nd.f_left, nd.h_left) * slope;
    }
    if (std::abs(psi[n + 1]) > kRescale) {
      for (std::size_t j = 0; j <= n + 1; ++j) psi[j] /= kRescale;
      log_scale += std::log(kRescale);
    }
  }

  // psi = alpha exp(ikx) + beta exp(-ikx) from the two nodes at a and a - h.
  const std::size_t ia = nodes.size() - 2;
  const double xa = nodes[ia].x;
  const double xm = nodes[ia + 1].x;
  const cplx det = std::polar(1.0, k * (xa - xm)) - std::polar(1.0, -k * (xa - xm));
  const cplx alpha = (psi[ia] * std::polar(1.0, -k * xm) - psi[ia + 1] * std::polar(1.0, -k * xa)) / det;
  const cplx beta = (psi[ia + 1] * std::polar(1.0, k * xa) - psi[ia] * std::polar(1.0, k * xm)) / det;

  res.a_t = std::polar(std::exp(-log_scale), -k * barrier.right()) / alpha;
  res.a_r = beta / alpha;
  res.t_coef = std::norm(res.a_t);
  res.r_coef = std::norm(res.a_r);
  res.xs.resize(nodes.size());
  res.field.resize(nodes.size());
  for (std::size_t n = 0; n < nodes.size(); ++n) {
    res.xs[nodes.size() - 1 - n] = nodes[n].x;
    res.field[nodes.size() - 1 - n] = psi[n] / alpha;
  }
  return res;
}

namespace {

// Average of V over [x - dx/2, x + dx/2].
double cell_average(const BarrierSpec& barrier, double x, double dx) {
  const double lo = x - 0.5 * dx;
  const double hi = x + 0.5 * dx;
  const auto edges = barrier.edges();
  const auto segs = barrier.segments();
  double total = 0.0;
  for (std::size_t i = 0; i < segs.size(); ++i) {
    const double overlap = std::min(hi, edges[i + 1]) - std::max(lo, edges[i]);
    if (overlap > 0.0) total += segs[i].height * overlap;
  }
  return total / dx;
}

}  // namespace

CrankNicolson::CrankNicolson(const BarrierSpec& barrier, const GridSpec& grid, std::vector<cplx> initial,
                             CrankNicolsonOptions options)
    : grid_(grid), options_(options), psi_(std::move(initial)) {
  grid_.validate(true);
  require(psi_.size() == grid_.points, ErrorKind::domain, "crank-nicolson: initial field does not match the grid");
  const double dx = grid_.step();
  if (grid_.dt > options_.c_acc * dx * dx) {
    std::ostringstream msg;
    msg << "crank-nicolson: dt = " << grid_.dt << " exceeds the accuracy bound c_acc * dx^2 = "
        << options_.c_acc * dx * dx;
    fail(ErrorKind::domain, msg.str());
  }
  psi_.front() = psi_.back() = 0.0;

  const std::size_t m = grid_.points - 2;
  const cplx half_i_dt{0.0, 0.5 * grid_.dt};
  off_ = -half_i_dt * (0.5 / (dx * dx));
  diag_.resize(m);
  pivot_inv_.resize(m);
  for (std::size_t j = 0; j < m; ++j) {
    const double v = cell_average(barrier, grid_.at(j + 1), dx);
    diag_[j] = 1.0 + half_i_dt * (1.0 / (dx * dx) + v);
    const cplx pivot = j == 0 ? diag_[0] : diag_[j] - off_ * off_ * pivot_inv_[j - 1];
    pivot_inv_[j] = 1.0 / pivot;
  }
  norm_ = norm();
  require(norm_ > 0.0, ErrorKind::domain, "crank-nicolson: initial field vanishes");
  check_edges();
}

double CrankNicolson::norm() const {
  double s = 0.0;
  for (const cplx& v : psi_) s += std::norm(v);
  return s * grid_.step();
}

void CrankNicolson::check_edges() const {
  const double edge = std::max(std::norm(psi_[1]), std::norm(psi_[psi_.size() - 2]));
  if (edge > options_.edge_threshold) {
    std::ostringstream msg;
    msg << "crank-nicolson: boundary contamination at t = " << time_ << " after " << steps_
        << " steps, density next to the wall " << edge << " > " << options_.edge_threshold;
    fail(ErrorKind::numerical, msg.str());
  }
}

void CrankNicolson::step() {
  const std::size_t m = diag_.size();
  // rhs = (1 - i dt H / 2) psi; the explicit operator has conjugate coefficients.
  std::vector<cplx>& d = scratch_;
  d.resize(m);
  for (std::size_t j = 0; j < m; ++j) {
    const cplx rhs = std::conj(diag_[j]) * psi_[j + 1] + std::conj(off_) * (psi_[j] + psi_[j + 2]);
    d[j] = (j == 0 ? rhs : rhs - off_ * d[j - 1]) * pivot_inv_[j];
  }
  for (std::size_t j = m - 1; j-- > 0;) d[j] -= off_ * pivot_inv_[j] * d[j + 1];
  std::copy(d.begin(), d.end(), psi_.begin() + 1);

  time_ += grid_.dt;
  ++steps_;
  const double before = norm_;
  norm_ = norm();
  const double drift = std::abs(norm_ - before) / before;
  max_drift_ = std::max(max_drift_, drift);
  if (drift > options_.norm_drift) {
    std::ostringstream msg;
    msg << "crank-nicolson: norm drift " << drift << " in one step at t = " << time_;
    fail(ErrorKind::numerical, msg.str());
  }
  check_edges();
}

void CrankNicolson::advance(std::size_t steps) {
  for (std::size_t i = 0; i < steps; ++i) step();
}

std::vector<cplx> crank_nicolson_step(std::span<const cplx> field, const BarrierSpec& barrier, const GridSpec& grid,
                                      double dt) {
  GridSpec g = grid;
  g.dt = dt;
  CrankNicolson cn(barrier, g, std::vector<cplx>(field.begin(), field.end()));
  cn.step();
  return {cn.field().begin(), cn.field().end()};
}

OracleComparison compare_with_crank_nicolson(const PacketEvolution& ev, double t_begin, double t_end, double dx,
                                             double dt, std::size_t checkpoints) {
  require(t_end > t_begin && dt > 0.0 && checkpoints >= 1, ErrorKind::domain,
          "oracle comparison: need t_end > t_begin, dt > 0 and at least one checkpoint");
  const UniformGrid ug = ev.default_grid(std::max(std::abs(t_begin), std::abs(t_end)), dx);
  const auto xs = ug.samples();

  const double span = t_end - t_begin;
  const std::size_t per = static_cast<std::size_t>(std::ceil(span / (dt * static_cast<double>(checkpoints))));
  GridSpec grid{ug.origin, ug.back(), ug.points, span / static_cast<double>(per * checkpoints)};

  CrankNicolson cn(ev.barrier(), grid, ev.synthesize(Component::full, t_begin, xs));
  OracleComparison out;
  for (std::size_t c = 1; c <= checkpoints; ++c) {
    cn.advance(per);
    const double t = t_begin + span * static_cast<double>(c) / static_cast<double>(checkpoints);
    const auto ref = ev.synthesize(Component::full, t, xs);
    double s = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) s += std::norm(ref[i] - cn.field()[i]);
    out.times.push_back(t);
    out.l2.push_back(std::sqrt(s * ug.dx));
    out.max_l2 = std::max(out.max_l2, out.l2.back());
  }
  out.steps = cn.steps_taken();
  out.max_norm_drift = cn.max_norm_drift();
  return out;
}

}  // namespace subscat
