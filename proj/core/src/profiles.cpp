#include "coexist/profiles.hpp"

#include <cmath>

#include "coexist/analytic.hpp"
#include "coexist/errors.hpp"
#include "coexist/units.hpp"

namespace coexist {

std::vector<Violation> validate_profile(const LoRaProfile& p) {
  std::vector<Violation> out;
  if (p.channels < 1) out.push_back({"channels", "channels must be at least 1"});
  if (p.spreading_factors < 1) out.push_back({"spreading_factors", "spreading_factors must be at least 1"});
  if (!(p.packet_time > 0.0)) out.push_back({"packet_time", "packet_time must be positive"});
  if (!(p.mean_inter_packet_time >= p.packet_time)) {
    out.push_back({"mean_inter_packet_time", "packet_time must not exceed mean_inter_packet_time (duty cycle above 1)"});
  }
  return out;
}

double lora_time_activity(const LoRaProfile& p) {
  if (auto v = validate_profile(p); !v.empty()) throw InputError(v.front().path + ": " + v.front().message);
  return p.packet_time / p.mean_inter_packet_time / p.channels / p.spreading_factors;
}

double lora_ack_probability(double p1, double p2) {
  if (!(p1 >= 0.0 && p1 <= 1.0 && p2 >= 0.0 && p2 <= 1.0)) {
    throw InputError("lora_ack_probability: probabilities must lie in [0, 1]");
  }
  return p1 + p2 - p1 * p2;
}

double lora_ack_probability(const LoRaProfile& p, std::size_t j, double d, const Scenario& s) {
  double window[2];
  for (int w = 0; w < 2; ++w) {
    Scenario sw = s;
    sw.ack_model = p.ack_windows[w];
    window[w] = ack_success_probability(j, d, sw);
  }
  return lora_ack_probability(window[0], window[1]);
}

Scenario reference_scenario() {
  const LoRaProfile lora;
  const double bandwidth = 125e3;
  const double centre = 868.1e6;

  TechnologyClass rt;
  rt.name = "reference";
  rt.technology_id = "lora";
  rt.tx_power = dbm_to_watts(20.0);
  rt.bandwidth = bandwidth;
  rt.carrier = CarrierDistribution::point_mass(centre);
  rt.packet_time = lora.packet_time;
  rt.mean_inter_packet_time = lora.mean_inter_packet_time;
  rt.device_density = 1e-2;
  rt.ap_density = 1e-5;
  rt.orthogonal_channels = lora.channels;
  rt.orthogonal_codes = lora.spreading_factors;

  TechnologyClass it;
  it.name = "interferer";
  it.technology_id = "generic";
  it.tx_power = dbm_to_watts(14.0);
  it.bandwidth = bandwidth;
  it.carrier = CarrierDistribution::uniform(centre - 5.0 * bandwidth, centre + 5.0 * bandwidth);
  it.packet_time = 1.0;
  it.mean_inter_packet_time = 100.0;
  it.device_density = 1e-2;
  it.ap_density = 1e-5;

  Scenario s;
  s.classes = {rt, it};
  s.reference_class = 0;
  s.channel.pathloss_exponent = 4.0;
  s.channel.fading.kind = Fading::Kind::rayleigh_unit_mean;
  s.channel.noise_density = dbm_to_watts(-174.0);
  s.energy.circuit_power = 0.1;
  s.energy.inv_pa_efficiency = 0.7;
  s.energy.rx_power = 0.1;
  s.energy.active_time = 2.0;
  s.energy.ack_time = 1.0;
  s.energy.wait_time = 1.0;
  s.energy.battery_capacity = 4000.0;
  s.retransmission.max_transmissions = 7;
  s.retransmission.retry_wait = 1.0;
  s.retransmission.truncation_mode = TruncationMode::with_failure_tail;
  s.sinr_threshold = db_to_linear(3.0);
  s.ack_model.kind = AckModel::Kind::ideal;
  return s;
}

std::vector<std::string> reference_scenario_notes() {
  return {
      "assumption: rx_power_w defaults to circuit_power_w",
      "assumption: packet_time_s = 1 and mean_inter_packet_time_s = 1/0.21 give a reference time activity of 0.01 "
      "with 3 channels and 7 spreading factors",
      "assumption: interferer mean_inter_packet_time_s = 100 gives an interferer time activity of 0.01",
      "assumption: interferer carrier uniform over ten bandwidths gives a frequency activity of 0.1",
      "assumption: reference device density 1e-2 per m2, ap_density_per_m2 = 1e-5 for both classes",
      "assumption: wait_time_s = retry_wait_s = 1",
      "assumption: truncation_mode with-failure-tail so that failed sessions count every attempt",
  };
}

Scenario single_technology_scenario() {
  Scenario s = reference_scenario();
  s.classes.resize(1);
  return s;
}

std::vector<double> nearest_ap_distance_ratios(std::size_t count) {
  std::vector<double> out;
  for (std::size_t k = 1; k <= count; ++k) {
    const double kk = static_cast<double>(k);
    out.push_back(std::exp(std::lgamma(kk + 0.5) - std::lgamma(kk) - std::lgamma(1.5)));
  }
  return out;
}

std::vector<double> nearest_ap_distances(double d, std::size_t count) {
  auto out = nearest_ap_distance_ratios(count);
  for (auto& r : out) r *= d;
  return out;
}

}  // namespace coexist
