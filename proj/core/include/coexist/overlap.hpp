#pragma once

#include "coexist/model.hpp"

namespace coexist {

/// Spectral supports of a reference packet and one interferer whose
/// carrier is random.
struct OverlapQuery {
  double ref_carrier = 0.0;    ///< Hz
  double ref_bandwidth = 0.0;  ///< Hz
  double int_bandwidth = 0.0;  ///< Hz
  CarrierDistribution int_carrier_law;
};

/// Length (Hz) of the intersection of [f1 - w1/2, f1 + w1/2] and
/// [f2 - w2/2, f2 + w2/2].
double deterministic_overlap(double f1, double w1, double f2, double w2);

/// P(overlap <= x) for 0 <= x <= min(w1, w2). Throws InputError otherwise.
double overlap_cdf(const OverlapQuery& q, double x);

/**
 * Expected overlap length divided by the reference bandwidth, by
 * integrating the overlap survival function over [0, min(w1, w2)].
 * Absolute error target 1e-9. Throws NumericalError if quadrature does
 * not converge.
 */
double expected_overlap_ratio(const OverlapQuery& q);

/// True when the interferer law is uniform and its support strictly
/// contains the exclusion zone f1 +- (w1 + w2)/2.
bool uniform_closed_form_applies(const OverlapQuery& q);

/// Closed form w2 / (f_max - f_min), valid only when
/// uniform_closed_form_applies(q); throws InputError otherwise.
double uniform_overlap_ratio(const OverlapQuery& q);

}  // namespace coexist
