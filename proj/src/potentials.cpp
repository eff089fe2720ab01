#include "subscat/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "subscat/error.hpp"

namespace subscat {

namespace {

bool widths_match(double lhs, double rhs) {
  return std::abs(lhs - rhs) <= 1e-12 * std::max(std::abs(lhs), std::abs(rhs));
}

}  // namespace

bool is_mirror_symmetric(std::span<const Segment> segments) {
  const std::size_t n = segments.size();
  for (std::size_t i = 0; i < n / 2 + 1 && i < n; ++i) {
    const Segment& lhs = segments[i];
    const Segment& rhs = segments[n - 1 - i];
    if (lhs.height != rhs.height || !widths_match(lhs.width, rhs.width)) return false;
  }
  return true;
}

BarrierSpec::BarrierSpec(double a, double b, std::vector<Segment> segments) : a_(a), b_(b), segments_(std::move(segments)) {
  require(std::isfinite(a), ErrorKind::domain, "barrier: left edge must be finite");
  require(!segments_.empty(), ErrorKind::domain, "barrier: segment list is empty");
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    const Segment& s = segments_[i];
    require(std::isfinite(s.width) && s.width > 0.0, ErrorKind::domain,
            "barrier: segment " + std::to_string(i) + " has non-positive or non-finite width");
    require(std::isfinite(s.height), ErrorKind::domain,
            "barrier: segment " + std::to_string(i) + " has non-finite height");
  }
  require(is_mirror_symmetric(segments_), ErrorKind::domain,
          "barrier: segment list is not mirror symmetric");

  // Left half accumulates from a; the right half mirrors it about the
  // centre so edge positions are symmetric to rounding.
  const std::size_t n = segments_.size();
  require(std::isfinite(b_), ErrorKind::domain, "barrier: right edge must be finite");
  center_ = 0.5 * (a_ + b_);
  require(b_ > a_, ErrorKind::domain, "barrier: b must exceed a");

  edges_.assign(n + 1, 0.0);
  edges_.front() = a_;
  edges_.back() = b_;
  double x = a_;
  for (std::size_t i = 1; i <= n / 2; ++i) {
    x += segments_[i - 1].width;
    edges_[i] = x;
    edges_[n - i] = 2.0 * center_ - x;
  }
  if (n % 2 == 0) edges_[n / 2] = center_;
  // The last width is whatever closes the interval exactly.
  for (std::size_t i = 0; i < n; ++i) segments_[i].width = edges_[i + 1] - edges_[i];
}

BarrierSpec BarrierSpec::from_segments(double a, std::vector<Segment> segments) {
  double total = 0.0;
  for (const Segment& s : segments) total += s.width;
  return BarrierSpec(a, a + total, std::move(segments));
}

double BarrierSpec::potential(double x) const {
  if (x < a_ || x > b_) return 0.0;
  auto it = std::upper_bound(edges_.begin(), edges_.end(), x);
  std::size_t idx = static_cast<std::size_t>(it - edges_.begin());
  idx = idx == 0 ? 0 : idx - 1;
  idx = std::min(idx, segments_.size() - 1);
  return segments_[idx].height;
}

double BarrierSpec::min_height() const {
  return std::min_element(segments_.begin(), segments_.end(),
                          [](const Segment& l, const Segment& r) { return l.height < r.height; })
      ->height;
}

double BarrierSpec::max_height() const {
  return std::max_element(segments_.begin(), segments_.end(),
                          [](const Segment& l, const Segment& r) { return l.height < r.height; })
      ->height;
}

BarrierSpec BarrierSpec::shifted(double dv) const {
  std::vector<Segment> out = segments_;
  for (Segment& s : out) s.height += dv;
  return BarrierSpec(a_, b_, std::move(out));
}

BarrierSpec BarrierSpec::refined(int parts) const {
  require(parts >= 1, ErrorKind::domain, "barrier: refinement factor must be >= 1");
  std::vector<Segment> out;
  out.reserve(segments_.size() * static_cast<std::size_t>(parts));
  for (const Segment& s : segments_)
    for (int p = 0; p < parts; ++p) out.push_back({s.width / parts, s.height});
  return BarrierSpec(a_, b_, std::move(out));
}

BarrierSpec make_rectangular(double a, double b, double v0) {
  require(std::isfinite(a) && std::isfinite(b), ErrorKind::domain, "rectangular barrier: edges must be finite");
  require(b > a, ErrorKind::domain, "rectangular barrier: b must exceed a");
  require(std::isfinite(v0), ErrorKind::domain, "rectangular barrier: height must be finite");
  return BarrierSpec(a, b, {{b - a, v0}});
}

BarrierSpec make_symmetric(double a, std::span<const Segment> half_profile) {
  require(!half_profile.empty(), ErrorKind::domain, "symmetric barrier: half profile is empty");
  std::vector<Segment> full(half_profile.begin(), half_profile.end());
  full.insert(full.end(), half_profile.rbegin(), half_profile.rend());
  return BarrierSpec::from_segments(a, std::move(full));
}

}  // namespace subscat
