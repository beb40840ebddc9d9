#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace coexist {

/**
 * Law of a device's carrier frequency. Cheap oscillators drift inside
 * [f_min, f_max]; frequency-hopping technologies pick a carrier at random.
 *
 * A tabulated law is a piecewise-linear CDF through the table nodes; the
 * first node is (f_min, 0) and the last (f_max, 1).
 */
struct CarrierDistribution {
  enum class Kind { uniform, point_mass, tabulated_cdf };

  struct Node {
    double frequency;
    double cdf;

    bool operator==(const Node&) const = default;
  };

  Kind kind = Kind::point_mass;
  double f_min = 0.0;
  double f_max = 0.0;
  std::vector<Node> table;

  static CarrierDistribution point_mass(double frequency);
  static CarrierDistribution uniform(double f_min, double f_max);
  static CarrierDistribution tabulated(std::vector<Node> table);

  /// P(F <= x); right-continuous, clamped to 0/1 outside the support.
  double cdf(double x) const;
  /// Density on the interior of a linear piece; zero for a point mass.
  double pdf(double x) const;
  /// Inverse CDF for u in (0,1).
  double quantile(double u) const;
  double mean() const;
  /// Abscissae where the CDF has a kink or jump, ascending.
  std::vector<double> breakpoints() const;

  bool operator==(const CarrierDistribution&) const = default;
};

struct TechnologyClass {
  std::string name;
  std::string technology_id;
  double tx_power = 0.0;                ///< W
  double bandwidth = 0.0;               ///< Hz
  CarrierDistribution carrier;
  double packet_time = 0.0;             ///< s, time on air per packet
  double mean_inter_packet_time = 0.0;  ///< s, reporting period
  double device_density = 0.0;          ///< devices / m^2
  double ap_density = 0.0;              ///< APs / m^2
  int orthogonal_channels = 1;
  int orthogonal_codes = 1;

  bool operator==(const TechnologyClass&) const = default;
};

struct Fading {
  enum class Kind { rayleigh_unit_mean, general };
  Kind kind = Kind::rayleigh_unit_mean;
  /// E[h^sigma]; only read for Kind::general.
  double fractional_moment = 1.0;

  bool operator==(const Fading&) const = default;
};

struct ChannelModel {
  double pathloss_exponent = 4.0;
  Fading fading;
  double noise_density = 0.0;  ///< W/Hz

  double sigma() const { return 2.0 / pathloss_exponent; }
  /// E[h^sigma] for the configured fading law.
  double fractional_moment() const;

  bool operator==(const ChannelModel&) const = default;
};

struct EnergyModel {
  double circuit_power = 0.0;      ///< W
  double inv_pa_efficiency = 1.0;  ///< eta
  double rx_power = 0.0;           ///< W
  double active_time = 0.0;        ///< s, sensing/processing per report
  double ack_time = 0.0;           ///< s
  double wait_time = 0.0;          ///< s, listening for an ACK
  double battery_capacity = 0.0;   ///< J

  bool operator==(const EnergyModel&) const = default;
};

enum class TruncationMode { paper_literal, normalized_conditional, with_failure_tail };

struct RetransmissionPolicy {
  int max_transmissions = 1;
  double retry_wait = 0.0;  ///< s between attempts
  TruncationMode truncation_mode = TruncationMode::paper_literal;

  bool operator==(const RetransmissionPolicy&) const = default;
};

struct AckModel {
  enum class Kind { ideal, fixed_probability, computed_from_ap_density };
  Kind kind = Kind::ideal;
  double probability = 1.0;  ///< fixed_probability only
  /// Downlink parameters for computed_from_ap_density: the AP transmit
  /// power (W) and the fraction of time a neighbouring AP transmits.
  double ap_tx_power = 0.0;
  double ap_activity = 0.0;

  bool operator==(const AckModel&) const = default;
};

struct Scenario {
  std::vector<TechnologyClass> classes;
  std::size_t reference_class = 0;
  ChannelModel channel;
  EnergyModel energy;
  RetransmissionPolicy retransmission;
  double sinr_threshold = 1.0;  ///< linear, post-despreading
  AckModel ack_model;

  const TechnologyClass& reference() const { return classes.at(reference_class); }

  bool operator==(const Scenario&) const = default;
};

/// Provenance-tagged bundle of per-device KPIs.
struct KpiResult {
  enum class Provenance { analytic, monte_carlo };

  struct HalfWidths {
    double success_probability = 0.0;
    double mean_transmissions = 0.0;
    double expected_delay = 0.0;
    double energy_per_report = 0.0;
    double battery_lifetime = 0.0;
  };

  double success_probability = 0.0;
  double mean_transmissions = 1.0;
  double expected_delay = 0.0;     ///< s
  double energy_per_report = 0.0;  ///< J
  double battery_lifetime = 0.0;   ///< s
  Provenance provenance = Provenance::analytic;
  /// 95% half-widths, Monte Carlo only.
  std::optional<HalfWidths> ci_halfwidth;
};

struct Violation {
  std::string path;
  std::string message;

  bool operator==(const Violation&) const = default;
};

/// Every invariant violation in `s`; empty when the scenario is valid.
std::vector<Violation> validate_scenario(const Scenario& s);

/// Throws InputError listing all violations if `s` is not valid.
void require_valid(const Scenario& s);

/// Fraction of time a class-i device is on air and not orthogonal to class j.
double time_activity_factor(std::size_t i, std::size_t j, const Scenario& s);

/// Receiver noise power for class j: noise density times that class's bandwidth.
double noise_power(std::size_t j, const Scenario& s);

const char* to_string(TruncationMode mode);
const char* to_string(CarrierDistribution::Kind kind);
const char* to_string(AckModel::Kind kind);

}  // namespace coexist
