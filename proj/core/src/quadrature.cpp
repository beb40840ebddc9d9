#include "coexist/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace coexist {

namespace {

struct Simpson {
  const std::function<double(double)>& f;
  int evaluations = 0;
  bool converged = true;

  double eval(double x) {
    ++evaluations;
    return f(x);
  }

  double recurse(double a, double b, double fa, double fm, double fb, double whole, double tol,
                 int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = eval(lm);
    const double frm = eval(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    if (depth <= 0) {
      converged = false;
      return left + right + delta / 15.0;
    }
    return recurse(a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           recurse(m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
  }
};

}  // namespace

QuadratureResult adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                                  double abs_tol, int max_depth) {
  if (!(b > a)) return {0.0, true, 0};
  Simpson s{f};
  const double fa = s.eval(a);
  const double fb = s.eval(b);
  const double m = 0.5 * (a + b);
  const double fm = s.eval(m);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  const double v = s.recurse(a, b, fa, fm, fb, whole, abs_tol, max_depth);
  return {v, s.converged, s.evaluations};
}

QuadratureResult integrate_piecewise(const std::function<double(double)>& f, double a, double b,
                                     std::span<const double> breaks, double abs_tol,
                                     int max_depth) {
  if (!(b > a)) return {0.0, true, 0};
  std::vector<double> edges{a, b};
  for (double x : breaks) {
    if (x > a && x < b) edges.push_back(x);
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  QuadratureResult total;
  for (std::size_t k = 1; k < edges.size(); ++k) {
    const double lo = edges[k - 1];
    const double hi = edges[k];
    const double nudge = 1e-12 * (hi - lo);
    auto inner = [&](double x) { return f(std::clamp(x, lo + nudge, hi - nudge)); };
    auto piece = adaptive_simpson(inner, lo, hi, abs_tol * (hi - lo) / (b - a), max_depth);
    total.value += piece.value;
    total.converged = total.converged && piece.converged;
    total.evaluations += piece.evaluations;
  }
  return total;
}

}  // namespace coexist
