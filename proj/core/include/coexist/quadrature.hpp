#pragma once

#include <functional>
#include <span>

namespace coexist {

struct QuadratureResult {
  double value = 0.0;
  bool converged = true;
  int evaluations = 0;
};

/**
 * Adaptive Simpson quadrature with Richardson correction.
 *
 * Each subinterval is accepted once |S(left)+S(right)-S(whole)| <= 15*tol,
 * where tol is halved on every split. Subintervals still unresolved at
 * `max_depth` are accepted and flag the result as not converged.
 */
QuadratureResult adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                                  double abs_tol, int max_depth = 40);

/**
 * Integrates f over [a, b] split at `breaks` (any order, out-of-range
 * values ignored). Inside each piece f is evaluated strictly away from
 * the piece ends, so jumps located exactly at a break do not pollute the
 * neighbouring piece. The tolerance is shared out by piece length.
 */
QuadratureResult integrate_piecewise(const std::function<double(double)>& f, double a, double b,
                                     std::span<const double> breaks, double abs_tol,
                                     int max_depth = 40);

}  // namespace coexist
