#include "subscat/decomposition.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "subscat/error.hpp"

namespace subscat {

namespace {

constexpr cplx I{0.0, 1.0};

// Left-to-right propagation of (value, slope) across distance d inside a segment.
FieldPoint advance(const FieldPoint& p, const SegmentField& seg, double d) {
  const double q = seg.rate;
  switch (seg.regime) {
    case Regime::oscillatory: {
      const double c = std::cos(q * d), s = std::sin(q * d);
      return {p.value * c + p.slope * (s / q), -p.value * (q * s) + p.slope * c};
    }
    case Regime::evanescent: {
      const double c = std::cosh(q * d), s = std::sinh(q * d);
      return {p.value * c + p.slope * (s / q), p.value * (q * s) + p.slope * c};
    }
    case Regime::linear:
      return {p.value + p.slope * d, p.slope};
  }
  return p;
}

struct Propagated {
  std::vector<double> xs;
  std::vector<cplx> values;  // last entry is at x_c
};

// Psi_ref = z exp(ikx) + A_R exp(-ikx) for x < a, carried through the segments to x_c.
Propagated propagate_to_center(const ScatteringSolution& sol, cplx z, int samples_per_piece) {
  const double k = sol.k;
  const double a = sol.left();
  const double xc = sol.center();
  const cplx in = z * std::polar(1.0, k * a);
  const cplx out = sol.a_r * std::polar(1.0, -k * a);
  FieldPoint p{in + out, I * k * (in - out)};

  Propagated res;
  res.xs.push_back(a);
  res.values.push_back(p.value);
  for (const SegmentField& seg : sol.segments()) {
    if (seg.left >= xc) break;
    const double end = std::min(seg.right, xc);
    const double span = end - seg.left;
    for (int j = 1; j <= samples_per_piece; ++j) {
      const double d = span * j / samples_per_piece;
      res.xs.push_back(seg.left + d);
      res.values.push_back(advance(p, seg, d).value);
    }
    p = advance(p, seg, span);
    res.values.back() = p.value;
  }
  res.xs.back() = xc;
  return res;
}

double peak_of(const std::vector<cplx>& values) {
  double peak = 0.0;
  for (const cplx& v : values) peak = std::max(peak, std::abs(v));
  return peak;
}

}  // namespace

CandidatePair candidates(cplx a_full_t, cplx a_full_r) {
  const double t = std::norm(a_full_t);
  const double r = std::norm(a_full_r);
  if (!(std::abs(t + r - 1.0) <= 1e-9)) {
    std::ostringstream msg;
    msg << "candidates: amplitudes violate unitarity, |T + R - 1| = " << std::abs(t + r - 1.0);
    fail(ErrorKind::domain, msg.str());
  }
  const double im = std::sqrt(std::max(0.0, t * r));
  CandidatePair out{{r, im}, {r, -im}, false};
  out.degenerate = im == 0.0;
  return out;
}

Decomposition make_branch(const BarrierSpec& barrier, const ScatteringSolution& sol, cplx z, Branch branch,
                          bool degenerate) {
  (void)barrier;
  Decomposition d;
  d.k = sol.k;
  d.a_ref_in = z;
  d.a_tr_in = 1.0 - z;
  d.a_ref_r = sol.a_r;
  d.branch = branch;
  d.degenerate = degenerate;
  d.sol_ = sol;
  d.mirror_sign_ = branch == Branch::odd ? -1.0 : 1.0;
  return d;
}

FieldPoint Decomposition::ref_state(double x) const {
  if (a_ref_in == cplx{}) return {};
  const double mirror = 2.0 * center() - x;
  const FieldPoint direct = sol_.field_and_slope(x);
  const FieldPoint image = sol_.field_and_slope(mirror);
  return {a_ref_in * (direct.value + mirror_sign_ * image.value),
          a_ref_in * (direct.slope - mirror_sign_ * image.slope)};
}

FieldPoint Decomposition::tr_state(double x) const {
  const FieldPoint full = sol_.field_and_slope(x);
  const FieldPoint ref = ref_state(x);
  return {full.value - ref.value, full.slope - ref.slope};
}

FieldPoint Decomposition::masked_ref(double x) const {
  if (x > center()) return {};
  return ref_state(x);
}

Decomposition::Sample Decomposition::sample(double x) const {
  const cplx full = sol_.field(x);
  if (x > center() || a_ref_in == cplx{}) return {full, full, cplx{}};
  const cplx ref = a_ref_in * (full + mirror_sign_ * sol_.field(2.0 * center() - x));
  return {full, full - ref, ref};
}

FieldPoint Decomposition::masked_tr(double x) const {
  if (x > center()) return sol_.field_and_slope(x);
  return tr_state(x);
}

namespace {

struct BranchEvaluation {
  Propagated plus;
  Propagated minus;
  double plus_at_center;
  double minus_at_center;
};

BranchEvaluation evaluate_candidates(const ScatteringSolution& sol, const CandidatePair& cands) {
  BranchEvaluation ev{propagate_to_center(sol, cands.plus, 16), propagate_to_center(sol, cands.minus, 16), 0.0, 0.0};
  ev.plus_at_center = std::abs(ev.plus.values.back());
  ev.minus_at_center = std::abs(ev.minus.values.back());
  return ev;
}

double mismatch(const Decomposition& d, const Propagated& p, double peak) {
  double worst = 0.0;
  for (std::size_t i = 0; i < p.xs.size(); ++i)
    worst = std::max(worst, std::abs(d.ref_state(p.xs[i]).value - p.values[i]));
  return peak > 0.0 ? worst / peak : worst;
}

}  // namespace

Decomposition select_odd_branch(const BarrierSpec& barrier, const ScatteringSolution& sol,
                                const CandidatePair& cands) {
  if (sol.r_coef < kDegenerateReflection) return make_branch(barrier, sol, cplx{}, Branch::odd, true);

  const BranchEvaluation ev = evaluate_candidates(sol, cands);
  const bool plus_wins = ev.plus_at_center <= ev.minus_at_center;
  const Propagated& chosen = plus_wins ? ev.plus : ev.minus;
  const double peak = peak_of(chosen.values);
  const double selected = (plus_wins ? ev.plus_at_center : ev.minus_at_center) / peak;
  const double rejected = (plus_wins ? ev.minus_at_center : ev.plus_at_center) / peak;

  std::ostringstream residuals;
  residuals.precision(3);
  residuals << "k = " << sol.k << ", |Psi_ref(x_c)|/peak = " << selected << " (selected) and " << rejected
            << " (rejected)";
  if (!(selected < kBranchTolerance))
    fail(ErrorKind::numerical,
         "select_odd_branch: neither candidate vanishes at the barrier centre; unitarity or symmetry failed: " +
             residuals.str());
  if (rejected < kBranchTolerance)
    fail(ErrorKind::ambiguous, "select_odd_branch: both candidates vanish at the barrier centre: " + residuals.str());

  Decomposition d = make_branch(barrier, sol, plus_wins ? cands.plus : cands.minus, Branch::odd, false);
  d.diagnostics = {selected, rejected, peak, mismatch(d, chosen, peak)};
  if (!(d.diagnostics.propagation_mismatch < kBranchTolerance)) {
    std::ostringstream msg;
    msg << "select_odd_branch: propagated Psi_ref disagrees with its odd projection by "
        << d.diagnostics.propagation_mismatch << " (relative) at k = " << sol.k;
    fail(ErrorKind::numerical, msg.str());
  }
  return d;
}

Decomposition select_even_branch(const BarrierSpec& barrier, const ScatteringSolution& sol,
                                 const CandidatePair& cands) {
  if (sol.r_coef < kDegenerateReflection) return make_branch(barrier, sol, cplx{}, Branch::even, true);
  const BranchEvaluation ev = evaluate_candidates(sol, cands);
  const bool plus_is_odd = ev.plus_at_center <= ev.minus_at_center;
  const Propagated& chosen = plus_is_odd ? ev.minus : ev.plus;
  const double peak = peak_of(chosen.values);
  Decomposition d = make_branch(barrier, sol, plus_is_odd ? cands.minus : cands.plus, Branch::even, false);
  d.diagnostics = {std::abs(chosen.values.back()) / peak, std::abs((plus_is_odd ? ev.plus : ev.minus).values.back()) / peak,
                   peak, 0.0};
  d.diagnostics.propagation_mismatch = mismatch(d, chosen, peak);
  return d;
}

Decomposition decompose(const BarrierSpec& barrier, const ScatteringSolution& sol) {
  return select_odd_branch(barrier, sol, candidates(sol.a_t, sol.a_r));
}

MaskedSubstates masked_substates(const Decomposition& dec, std::span<const double> xs) {
  const ScatteringSolution& sol = dec.solution();
  require(!xs.empty() && xs.front() < sol.left() && xs.back() > sol.right(), ErrorKind::domain,
          "masked_substates: grid must extend beyond [a, b] on both sides");
  require(std::is_sorted(xs.begin(), xs.end()), ErrorKind::domain, "masked_substates: grid must be sorted");

  MaskedSubstates out;
  out.xs.assign(xs.begin(), xs.end());
  out.full.resize(xs.size());
  out.tr.resize(xs.size());
  out.ref.resize(xs.size());

  const double xc = dec.center();
  const double k = dec.k;
  const double flux_tr = k * sol.t_coef;
  double worst_sum = 0.0, worst_tr_current = 0.0, worst_ref_current = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const FieldPoint full = sol.field_and_slope(xs[i]);
    const FieldPoint tr = dec.masked_tr(xs[i]);
    const FieldPoint ref = dec.masked_ref(xs[i]);
    out.full[i] = full.value;
    out.tr[i] = tr.value;
    out.ref[i] = ref.value;
    worst_sum = std::max(worst_sum, std::abs(tr.value + ref.value - full.value));
    if (xs[i] > xc && ref.value != cplx{}) fail(ErrorKind::internal, "masked_substates: psi_ref nonzero beyond x_c");
    const double j_tr = std::imag(std::conj(tr.value) * tr.slope);
    const double j_ref = std::imag(std::conj(ref.value) * ref.slope);
    worst_tr_current = std::max(worst_tr_current, std::abs(j_tr - flux_tr));
    worst_ref_current = std::max(worst_ref_current, std::abs(j_ref));
  }

  const double left_tr = std::abs(dec.tr_state(xc).value - sol.field(xc));
  const double ref_at_center = std::abs(dec.ref_state(xc).value);
  const double scale = std::max(1.0, dec.diagnostics.peak);

  std::ostringstream msg;
  msg.precision(3);
  if (worst_sum > 1e-10) msg << " sum identity residual " << worst_sum << ';';
  if (left_tr > 1e-9 * scale || ref_at_center > 1e-9 * scale)
    msg << " discontinuity at x_c (" << left_tr << ", " << ref_at_center << ");";
  if (worst_tr_current > 1e-6 * std::max(flux_tr, 1e-300) && worst_tr_current > 1e-12)
    msg << " psi_tr current varies by " << worst_tr_current << ';';
  if (worst_ref_current > 1e-6 * k) msg << " psi_ref current " << worst_ref_current << ';';
  if (!msg.str().empty()) fail(ErrorKind::numerical, "masked_substates:" + msg.str());
  return out;
}

}  // namespace subscat
