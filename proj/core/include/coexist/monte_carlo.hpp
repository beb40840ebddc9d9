#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "coexist/joint_reception.hpp"
#include "coexist/model.hpp"
#include "coexist/random_stream.hpp"

namespace coexist {

/// How an interferer's spectral overlap weights its received power.
enum class OverlapSampling {
  actual,    ///< draw the interferer carrier, use its true overlap fraction
  expected,  ///< use the expected overlap fraction for every interferer
};

/// Whether co-located APs see the same interferer field.
enum class InterferenceCoupling {
  shared,       ///< one interferer point set for all APs
  independent,  ///< a fresh point set and fades per AP
};

struct SimConfig {
  std::uint64_t trials = 100000;
  /// Radius (m) of the simulated disc; 0 selects default_region_radius().
  double region_radius = 0.0;
  std::uint64_t seed = 42;
  /// Pair trial 2k+1 with trial 2k through mirrored uniforms.
  bool antithetic = false;
  /// Worker threads, 0 = hardware concurrency. Never changes results.
  unsigned threads = 0;
  OverlapSampling overlap = OverlapSampling::actual;
  /// Keep one interferer layout for all attempts of a session.
  bool frozen_topology = false;
  /// Bound on the expected relative success-probability loss from ignoring
  /// interferers outside the disc.
  double tail_tolerance = 1e-4;
};

struct Estimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::uint64_t trials_used = 0;
};

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

/// Homogeneous PPP on the disc of `radius` centred at the origin.
std::vector<Point2> sample_ppp(double intensity, double radius, RandomStream& rng);

/**
 * Disc radius for a device at distance d: max(1000 m, 10 d, R_tail) where
 * R_tail makes the mean interference from beyond the disc, scaled by
 * threshold * d^alpha / P_j, at most `tail_tolerance`. That product
 * bounds the relative bias of the success probability.
 */
double default_region_radius(std::size_t j, double d, double threshold, const Scenario& s, double tail_tolerance);

/**
 * Fraction of snapshots in which a class-j device at distance d from its
 * AP reaches the SINR threshold. Every snapshot draws a fresh PPP of active
 * interferers per class (intensity xi_ij * lambda_i), their carriers,
 * and unit-mean exponential fades.
 */
Estimate snapshot_success(std::size_t j, double d, double threshold, const Scenario& s, const SimConfig& cfg);

struct SessionOptions {
  /// Replace the snapshot uplink outcome by Bernoulli(q).
  std::optional<double> forced_uplink_success;
  /// Replace the scenario ACK probability.
  std::optional<double> forced_ack;
};

struct SessionEstimates {
  Estimate session_success;          ///< uplink and ACK succeeded within N_tx
  Estimate transmissions_all;        ///< attempts used, failed sessions count N_tx
  Estimate transmissions_success;    ///< attempts, successful sessions only
  Estimate delay_all;                ///< s
  Estimate delay_success;            ///< s, successful sessions only
  Estimate energy_per_report;        ///< J, all sessions
  Estimate battery_lifetime;         ///< s, capacity * period / mean energy
};

/// Retransmission sessions: attempts until uplink and ACK both succeed or
/// N_tx attempts are spent.
SessionEstimates simulate_session(std::size_t j, double d, const Scenario& s, const SimConfig& cfg,
                                  const SessionOptions& options = {});

/**
 * Fraction of snapshots in which the sum of SINRs over the available APs
 * reaches the threshold. The device sits at the origin and AP m at
 * distance d_m, spread evenly in angle. Desired-link and interferer fades
 * are independent per AP; `coupling` selects whether the APs share one
 * interferer point set. AP m listens with probability p_av_m.
 */
Estimate snapshot_mrc_success(const JointReceptionConfig& jr, std::size_t j, double threshold, const Scenario& s,
                              const SimConfig& cfg, InterferenceCoupling coupling = InterferenceCoupling::shared);

}  // namespace coexist
