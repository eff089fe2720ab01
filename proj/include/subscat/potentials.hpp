#pragma once

#include <span>
#include <vector>

namespace subscat {

/// Units throughout: hbar = m = 1, so E = k^2 / 2.

/// One piece of a piecewise-constant potential.
struct Segment {
  double width;
  double height;
};

/// A mirror-symmetric barrier supported on [a, b]. Outside [a, b] the
/// potential is zero. Instances are immutable once built and can be shared
/// freely between threads.
class BarrierSpec {
 public:
  /// Builds a barrier from an explicit segment list. The list must read the
  /// same forwards and backwards (heights compared exactly, widths to 1e-12
  /// relative); anything else is rejected with ErrorKind::domain.
  static BarrierSpec from_segments(double a, std::vector<Segment> segments);

  double left() const { return a_; }
  double right() const { return b_; }
  double center() const { return center_; }
  double length() const { return b_ - a_; }

  std::span<const Segment> segments() const { return segments_; }

  /// Segment edges, size segments().size() + 1; front() == left(), back() == right().
  std::span<const double> edges() const { return edges_; }

  /// V(x). Points exactly on an interior edge take the height of the segment to the right.
  double potential(double x) const;

  double min_height() const;
  double max_height() const;

  /// Negative heights are accepted but fall outside the tested regime.
  bool has_wells() const { return min_height() < 0.0; }

  /// Same geometry with every segment height shifted by dv (field confined to [a, b]).
  BarrierSpec shifted(double dv) const;

  /// Same potential with every segment split into `parts` equal pieces.
  BarrierSpec refined(int parts) const;

 private:
  BarrierSpec(double a, double b, std::vector<Segment> segments);
  friend BarrierSpec make_rectangular(double a, double b, double v0);

  double a_ = 0.0;
  double b_ = 0.0;
  double center_ = 0.0;
  std::vector<Segment> segments_;
  std::vector<double> edges_;
};

/// Single-segment barrier of height v0 on [a, b].
BarrierSpec make_rectangular(double a, double b, double v0);

/// Barrier starting at a made of half_profile followed by its mirror image.
BarrierSpec make_symmetric(double a, std::span<const Segment> half_profile);

/// True when the segment list is its own mirror image.
bool is_mirror_symmetric(std::span<const Segment> segments);

}  // namespace subscat
