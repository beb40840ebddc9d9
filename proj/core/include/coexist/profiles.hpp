#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "coexist/model.hpp"

namespace coexist {

/// LoRa-like class: ALOHA on `channels` carriers with `spreading_factors`
/// quasi-orthogonal codes, and a two-window downlink acknowledgement.
struct LoRaProfile {
  int channels = 3;
  int spreading_factors = 7;
  double packet_time = 1.0;                       ///< s
  double mean_inter_packet_time = 1.0 / 0.21;     ///< s
  /// Downlink model of the first and second receive window.
  std::array<AckModel, 2> ack_windows{};
};

std::vector<Violation> validate_profile(const LoRaProfile& p);

/// (1 / channels) * (1 / spreading_factors) * T / period.
double lora_time_activity(const LoRaProfile& p);

/// The ACK is lost only if both windows fail.
double lora_ack_probability(double p1, double p2);

/// ACK probability of class j at distance d with the two windows of `p`.
double lora_ack_probability(const LoRaProfile& p, std::size_t j, double d, const Scenario& s);

/// Two classes: LoRa-like reference (index 0) and a generic interferer
/// (index 1) whose carrier is uniform over ten bandwidths.
Scenario reference_scenario();

/// Values of reference_scenario() that are assumptions rather than
/// published parameters.
std::vector<std::string> reference_scenario_notes();

/// reference_scenario() without the interfering technology.
Scenario single_technology_scenario();

/// Serving-AP distance ratios of the k nearest APs of a planar PPP,
/// E[r_k] / E[r_1] = Gamma(k + 1/2) / (Gamma(k) Gamma(3/2)).
std::vector<double> nearest_ap_distance_ratios(std::size_t count);

/// `count` AP distances with the nearest one at d.
std::vector<double> nearest_ap_distances(double d, std::size_t count);

}  // namespace coexist
