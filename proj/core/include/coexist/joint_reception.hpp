#pragma once

#include <cstddef>
#include <vector>

#include "coexist/model.hpp"

namespace coexist {

/// The M access points that overhear a class-j device and forward their
/// copies for maximum ratio combining.
struct JointReceptionConfig {
  std::vector<double> ap_distances;    ///< m, one per AP
  std::vector<double> availabilities;  ///< fraction of time each AP listens
  double grid_max = 0.0;               ///< linear SINR; 0 selects it automatically
  /// Nodes over [0, grid_max]. The step is also capped at threshold / 2048.
  std::size_t grid_points = std::size_t{1} << 14;
};

std::vector<Violation> validate_joint_reception(const JointReceptionConfig& cfg);

/// P(p_av * SINR_m > x) for one AP at distance d_m, class j on carrier f_j.
double per_ap_sinr_ccdf(std::size_t j, double d_m, double p_av, double x, double f_j, const Scenario& s);

/// Discretisation diagnostics of one MRC evaluation at a fixed carrier.
struct MrcEvaluation {
  double success_probability = 0.0;
  double grid_max = 0.0;
  double grid_step = 0.0;
  double max_truncated_mass = 0.0;  ///< largest per-AP CCDF at grid_max
};

/// Combining at one carrier frequency of the reference device.
MrcEvaluation mrc_success_at_carrier(const JointReceptionConfig& cfg, std::size_t j, double threshold, double f_j,
                                     const Scenario& s);

/**
 * Success probability when the serving network combines the copies
 * received by all APs (sum of availability-scaled SINRs must reach the
 * threshold), averaged over the device carrier law.
 *
 * Per-AP SINRs are taken as independent. Throws NumericalError when a
 * user-supplied grid_max truncates more than 1e-4 of any per-AP law.
 */
double mrc_success_probability(const JointReceptionConfig& cfg, std::size_t j, double threshold,
                               const Scenario& s);

}  // namespace coexist
