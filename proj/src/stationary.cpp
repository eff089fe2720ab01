#include "subscat/stationary.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <mutex>
#include <string>

#include "subscat/error.hpp"

namespace subscat {

namespace {

constexpr cplx I{0.0, 1.0};

struct EdgeState {
  cplx value;
  cplx slope;
  double log_scale;  // true value = stored * exp(log_scale)
};

Regime classify(double energy, double height, double& rate) {
  const double gap = energy - height;
  if (std::abs(gap) < degenerate_energy_window(height)) {
    rate = 0.0;
    return Regime::linear;
  }
  if (gap > 0.0) {
    rate = std::sqrt(2.0 * gap);
    return Regime::oscillatory;
  }
  rate = std::sqrt(-2.0 * gap);
  return Regime::evanescent;
}

bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

}  // namespace

FieldPoint SegmentField::evaluate(double x) const {
  switch (regime) {
    case Regime::oscillatory: {
      const cplx e = std::polar(1.0, rate * (x - left));
      const cplx fwd = first * e;
      const cplx bwd = second * std::conj(e);
      return {fwd + bwd, I * rate * (fwd - bwd)};
    }
    case Regime::evanescent: {
      const double decay = std::exp(-rate * (x - left));
      const double grow = std::exp(rate * (x - right));
      return {first * decay + second * grow, rate * (second * grow - first * decay)};
    }
    case Regime::linear:
      return {first + second * (x - left), second};
  }
  return {};
}

FieldPoint ScatteringSolution::field_and_slope(double x) const {
  if (x < left_) {
    const cplx in = std::polar(1.0, k * x);
    const cplx out = a_r * std::conj(in);
    return {in + out, I * k * (in - out)};
  }
  if (x > right_) {
    const cplx v = a_t * std::polar(1.0, k * x);
    return {v, I * k * v};
  }
  auto it = std::upper_bound(segments_.begin(), segments_.end(), x,
                             [](double value, const SegmentField& s) { return value < s.left; });
  const std::size_t idx = it == segments_.begin() ? 0 : static_cast<std::size_t>(it - segments_.begin()) - 1;
  return segments_[idx].evaluate(x);
}

ScatteringSolution solve_stationary(const BarrierSpec& barrier, double k) {
  require(std::isfinite(k) && k > 0.0, ErrorKind::domain,
          "solve_stationary: wavenumber must be positive and finite, got " + std::to_string(k));
  const double energy = 0.5 * k * k;
  const auto segs = barrier.segments();
  const auto edges = barrier.edges();
  const std::size_t n = segs.size();

  std::vector<double> rates(n);
  std::vector<Regime> regimes(n);
  for (std::size_t i = 0; i < n; ++i) regimes[i] = classify(energy, segs[i].height, rates[i]);

  // Right-to-left propagation of u with u = exp(ik(x-b)) for x >= b. The
  // physical solution grows towards the left inside opaque segments, so this
  // direction is the stable one; growth is folded into log_scale.
  std::vector<EdgeState> state(n + 1);
  state[n] = {1.0, I * k, 0.0};
  for (std::size_t i = n; i-- > 0;) {
    const EdgeState& r = state[i + 1];
    const double w = edges[i + 1] - edges[i];
    const double q = rates[i];
    EdgeState l{r.value, r.slope, r.log_scale};
    switch (regimes[i]) {
      case Regime::oscillatory: {
        const double c = std::cos(q * w);
        const double s = std::sin(q * w);
        l.value = r.value * c - r.slope * (s / q);
        l.slope = r.value * (q * s) + r.slope * c;
        break;
      }
      case Regime::evanescent: {
        // cosh and sinh with exp(q w) factored out.
        const double e2 = std::exp(-2.0 * q * w);
        const double ch = 0.5 * (1.0 + e2);
        const double sh = 0.5 * (1.0 - e2);
        l.value = r.value * ch - r.slope * (sh / q);
        l.slope = -r.value * (q * sh) + r.slope * ch;
        l.log_scale += q * w;
        break;
      }
      case Regime::linear:
        l.value = r.value - r.slope * w;
        l.slope = r.slope;
        break;
    }
    const double mag = std::max(std::abs(l.value), std::abs(l.slope) / k);
    if (mag > 0.0 && std::isfinite(mag)) {
      l.value /= mag;
      l.slope /= mag;
      l.log_scale += std::log(mag);
    }
    state[i] = l;
  }

  const EdgeState& at_a = state[0];
  const double a = barrier.left();
  const double b = barrier.right();
  const cplx alpha = 0.5 * (at_a.value + at_a.slope / (I * k));
  const cplx beta = 0.5 * (at_a.value - at_a.slope / (I * k));
  if (!finite(alpha) || std::abs(alpha) == 0.0)
    fail(ErrorKind::numerical,
         "solve_stationary: transfer-matrix composition lost precision (incident amplitude " +
             std::to_string(std::abs(alpha)) + "); the scaled propagation path cannot represent this barrier");

  ScatteringSolution sol;
  sol.k = k;
  sol.energy = energy;
  sol.left_ = a;
  sol.right_ = b;
  sol.a_r = beta / alpha * std::polar(1.0, 2.0 * k * a);
  sol.a_t = std::polar(std::exp(-at_a.log_scale), -k * (b - a)) / alpha;
  sol.t_coef = std::norm(sol.a_t);
  sol.r_coef = std::norm(sol.a_r);

  // Normalised edge values: Psi = exp(ika) u / alpha_true.
  const cplx norm = std::polar(1.0, k * a) / alpha;
  std::vector<FieldPoint> edge_field(n + 1);
  for (std::size_t e = 0; e <= n; ++e) {
    const double rel = std::exp(state[e].log_scale - at_a.log_scale);
    edge_field[e] = {state[e].value * rel * norm, state[e].slope * rel * norm};
  }

  sol.segments_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    SegmentField& f = sol.segments_[i];
    f.left = edges[i];
    f.right = edges[i + 1];
    f.regime = regimes[i];
    f.rate = rates[i];
    const FieldPoint& l = edge_field[i];
    const FieldPoint& r = edge_field[i + 1];
    switch (f.regime) {
      case Regime::oscillatory:
        f.first = 0.5 * (l.value + l.slope / (I * f.rate));
        f.second = 0.5 * (l.value - l.slope / (I * f.rate));
        break;
      case Regime::evanescent:
        f.first = 0.5 * (l.value - l.slope / f.rate);
        f.second = 0.5 * (r.value + r.slope / f.rate);
        break;
      case Regime::linear:
        f.first = l.value;
        f.second = l.slope;
        break;
    }
    if (!finite(f.first) || !finite(f.second))
      fail(ErrorKind::numerical, "solve_stationary: non-finite interior coefficients in segment " + std::to_string(i));
  }
  if (!finite(sol.a_t) || !finite(sol.a_r))
    fail(ErrorKind::numerical, "solve_stationary: non-finite scattering amplitudes");
  return sol;
}

std::vector<cplx> evaluate_full(const ScatteringSolution& sol, std::span<const double> xs) {
  require(std::is_sorted(xs.begin(), xs.end()), ErrorKind::domain, "evaluate_full: grid must be sorted");
  std::vector<cplx> out(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) out[i] = sol.field(xs[i]);
  return out;
}

std::vector<double> probability_current(std::span<const cplx> field, double dx) {
  require(field.size() >= 3, ErrorKind::domain, "probability_current: need at least 3 grid points");
  require(dx > 0.0 && std::isfinite(dx), ErrorKind::domain, "probability_current: spacing must be positive");
  std::vector<double> j(field.size() - 2);
  for (std::size_t i = 1; i + 1 < field.size(); ++i) {
    const cplx slope = (field[i + 1] - field[i - 1]) / (2.0 * dx);
    j[i - 1] = std::imag(std::conj(field[i]) * slope);
  }
  return j;
}

std::shared_ptr<const ScatteringSolution> SolutionCache::get(double k) {
  const auto key = std::bit_cast<std::uint64_t>(k);
  {
    std::shared_lock lock(mutex_);
    if (auto it = entries_.find(key); it != entries_.end()) return it->second;
  }
  auto sol = std::make_shared<const ScatteringSolution>(solve_stationary(barrier_, k));
  std::unique_lock lock(mutex_);
  auto [it, inserted] = entries_.emplace(key, std::move(sol));
  return it->second;
}

std::size_t SolutionCache::size() const {
  std::shared_lock lock(mutex_);
  return entries_.size();
}

}  // namespace subscat
