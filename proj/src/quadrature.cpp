#include "subscat/quadrature.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

#include "subscat/error.hpp"

namespace subscat {

std::vector<double> UniformGrid::samples() const {
  std::vector<double> xs(points);
  for (std::size_t i = 0; i < points; ++i) xs[i] = at(i);
  return xs;
}

UniformGrid UniformGrid::anchored(double lo, double hi, double dx, double anchor) {
  require(hi > lo && dx > 0.0 && std::isfinite(lo) && std::isfinite(hi), ErrorKind::domain,
          "UniformGrid: invalid extent or spacing");
  const double below = std::ceil((anchor - lo) / dx);
  const double above = std::ceil((hi - anchor) / dx);
  UniformGrid g;
  g.dx = dx;
  g.origin = anchor - below * dx;
  g.points = static_cast<std::size_t>(below + above) + 1;
  return g;
}

std::size_t UniformGrid::nearest(double x) const {
  const double idx = std::round((x - origin) / dx);
  return static_cast<std::size_t>(std::clamp(idx, 0.0, static_cast<double>(points - 1)));
}

std::vector<double> uniform_weights(std::size_t points, double dx) {
  std::vector<double> w(points, dx);
  if (points < 2) {
    std::fill(w.begin(), w.end(), 0.0);
    return w;
  }
  if (points < 8) {
    w.front() = w.back() = 0.5 * dx;
    return w;
  }
  constexpr double closure[3] = {3.0 / 8.0, 7.0 / 6.0, 23.0 / 24.0};
  for (std::size_t i = 0; i < 3; ++i) {
    w[i] = closure[i] * dx;
    w[points - 1 - i] = closure[i] * dx;
  }
  return w;
}

namespace {

template <class T>
T integrate_split(std::span<const T> values, double dx, std::size_t split) {
  T total{};
  auto piece = [&](std::size_t begin, std::size_t end) {  // inclusive range of nodes
    if (end <= begin) return;
    const auto w = uniform_weights(end - begin + 1, dx);
    for (std::size_t i = begin; i <= end; ++i) total += w[i - begin] * values[i];
  };
  if (split == 0 || split + 1 >= values.size()) {
    piece(0, values.size() - 1);
  } else {
    piece(0, split);
    piece(split, values.size() - 1);
  }
  return total;
}

}  // namespace

double integrate_uniform(std::span<const double> values, double dx, std::size_t split) {
  return integrate_split(values, dx, split);
}

std::complex<double> integrate_uniform(std::span<const std::complex<double>> values, double dx, std::size_t split) {
  return integrate_split(values, dx, split);
}

namespace {

struct SimpsonState {
  const std::function<double(double)>& f;
  std::size_t evaluations = 0;
  int max_depth;

  double eval(double x) {
    ++evaluations;
    return f(x);
  }

  double refine(double a, double b, double fa, double fm, double fb, double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = eval(lm);
    const double frm = eval(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double both = left + right;
    if (depth >= max_depth || std::abs(both - whole) <= 15.0 * tol) return both + (both - whole) / 15.0;
    return refine(a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) + refine(m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
  }
};

}  // namespace

SimpsonResult adaptive_simpson(const std::function<double(double)>& f, double a, double b, double rel_tol,
                               std::size_t panels, int max_depth) {
  require(b > a && panels >= 1, ErrorKind::domain, "adaptive_simpson: empty interval");
  SimpsonState st{f, 0, max_depth};
  const double h = (b - a) / static_cast<double>(panels);

  // Coarse pass fixes the absolute tolerance from the integral's scale.
  std::vector<double> node_values(2 * panels + 1);
  for (std::size_t i = 0; i < node_values.size(); ++i) node_values[i] = st.eval(a + 0.5 * h * static_cast<double>(i));
  std::vector<double> coarse(panels);
  double coarse_total = 0.0;
  for (std::size_t p = 0; p < panels; ++p) {
    coarse[p] = h / 6.0 * (node_values[2 * p] + 4.0 * node_values[2 * p + 1] + node_values[2 * p + 2]);
    coarse_total += std::abs(coarse[p]);
  }
  const double tol = std::max(rel_tol * coarse_total, 1e-300) / static_cast<double>(panels);

  SimpsonResult res;
  double running = 0.0;
  for (std::size_t p = 0; p < panels; ++p) {
    const double lo = a + h * static_cast<double>(p);
    const double piece = st.refine(lo, lo + h, node_values[2 * p], node_values[2 * p + 1], node_values[2 * p + 2],
                                   coarse[p], tol, 0);
    if (piece < -tol) res.partial_sums_monotone = false;
    running += piece;
  }
  res.value = running;
  res.evaluations = st.evaluations;
  return res;
}

double integrate_smooth(const std::function<double(double)>& f, double a, double b, double rel_tol) {
  if (b <= a) return 0.0;
  double error = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 15, rel_tol, &error);
}

QuadratureRule gauss_legendre(double a, double b) {
  using Rule = boost::math::quadrature::gauss<double, 20>;
  const auto& abscissa = Rule::abscissa();
  const auto& weight = Rule::weights();
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  QuadratureRule rule;
  // boost stores the non-negative abscissae only (20 is even: no zero node).
  for (std::size_t i = 0; i < abscissa.size(); ++i) {
    rule.nodes.push_back(mid - half * abscissa[i]);
    rule.weights.push_back(half * weight[i]);
    rule.nodes.push_back(mid + half * abscissa[i]);
    rule.weights.push_back(half * weight[i]);
  }
  return rule;
}

QuadratureRule composite_gauss_legendre(std::span<const double> breakpoints, double max_piece) {
  QuadratureRule out;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    const double lo = breakpoints[i];
    const double hi = breakpoints[i + 1];
    if (hi <= lo) continue;
    const int parts = std::max(1, static_cast<int>(std::ceil((hi - lo) / max_piece)));
    for (int p = 0; p < parts; ++p) {
      const QuadratureRule piece = gauss_legendre(lo + (hi - lo) * p / parts, lo + (hi - lo) * (p + 1) / parts);
      out.nodes.insert(out.nodes.end(), piece.nodes.begin(), piece.nodes.end());
      out.weights.insert(out.weights.end(), piece.weights.begin(), piece.weights.end());
    }
  }
  return out;
}

}  // namespace subscat
