#include "coexist/overlap.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "coexist/errors.hpp"
#include "coexist/quadrature.hpp"

namespace coexist {

namespace {

void check_query(const OverlapQuery& q) {
  if (!(q.ref_bandwidth > 0.0) || !(q.int_bandwidth > 0.0)) {
    throw InputError("overlap query bandwidths must be positive");
  }
}

// Survival function of the overlap length at x, the integrand of the
// expected-overlap formula.
double overlap_survival(const OverlapQuery& q, double x) {
  const double half = 0.5 * (q.ref_bandwidth + q.int_bandwidth);
  const auto& law = q.int_carrier_law;
  return law.cdf(q.ref_carrier + half - x) - law.cdf(q.ref_carrier - half + x);
}

}  // namespace

double deterministic_overlap(double f1, double w1, double f2, double w2) {
  const double hi = std::min(f1 + 0.5 * w1, f2 + 0.5 * w2);
  const double lo = std::max(f1 - 0.5 * w1, f2 - 0.5 * w2);
  return std::max(0.0, hi - lo);
}

double overlap_cdf(const OverlapQuery& q, double x) {
  check_query(q);
  const double cap = std::min(q.ref_bandwidth, q.int_bandwidth);
  if (!(x >= 0.0 && x <= cap * (1.0 + 1e-12))) throw InputError("overlap_cdf: x outside [0, min(w1, w2)]");
  // the overlap never exceeds cap, whatever the carrier law
  if (x >= cap) return 1.0;
  const double half = 0.5 * (q.ref_bandwidth + q.int_bandwidth);
  const auto& law = q.int_carrier_law;
  const double v = 1.0 - law.cdf(q.ref_carrier + half - x) + law.cdf(q.ref_carrier - half + x);
  return std::clamp(v, 0.0, 1.0);
}

double expected_overlap_ratio(const OverlapQuery& q) {
  check_query(q);
  const double cap = std::min(q.ref_bandwidth, q.int_bandwidth);
  const double half = 0.5 * (q.ref_bandwidth + q.int_bandwidth);

  // The integrand kinks wherever either CDF argument crosses a breakpoint
  // of the carrier law.
  std::vector<double> breaks;
  for (double b : q.int_carrier_law.breakpoints()) {
    breaks.push_back(q.ref_carrier + half - b);
    breaks.push_back(b - q.ref_carrier + half);
  }
  auto res = integrate_piecewise([&](double x) { return overlap_survival(q, x); }, 0.0, cap, breaks,
                                 1e-9 * q.ref_bandwidth);
  if (!res.converged) throw NumericalError("expected_overlap_ratio: quadrature did not converge");
  return std::clamp(res.value / q.ref_bandwidth, 0.0, 1.0);
}

bool uniform_closed_form_applies(const OverlapQuery& q) {
  const auto& law = q.int_carrier_law;
  const double half = 0.5 * (q.ref_bandwidth + q.int_bandwidth);
  return law.kind == CarrierDistribution::Kind::uniform && law.f_max > q.ref_carrier + half &&
         law.f_min < q.ref_carrier - half;
}

double uniform_overlap_ratio(const OverlapQuery& q) {
  check_query(q);
  if (!uniform_closed_form_applies(q)) {
    throw InputError(
        "uniform_overlap_ratio: interferer law must be uniform with support strictly containing "
        "the exclusion zone; use expected_overlap_ratio");
  }
  const auto& law = q.int_carrier_law;
  return q.int_bandwidth / (law.f_max - law.f_min);
}

}  // namespace coexist
