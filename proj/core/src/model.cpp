#include "coexist/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "coexist/errors.hpp"

namespace coexist {

CarrierDistribution CarrierDistribution::point_mass(double frequency) {
  return {Kind::point_mass, frequency, frequency, {}};
}

CarrierDistribution CarrierDistribution::uniform(double f_min, double f_max) {
  return {Kind::uniform, f_min, f_max, {}};
}

CarrierDistribution CarrierDistribution::tabulated(std::vector<Node> table) {
  CarrierDistribution law;
  law.kind = Kind::tabulated_cdf;
  if (!table.empty()) {
    law.f_min = table.front().frequency;
    law.f_max = table.back().frequency;
  }
  law.table = std::move(table);
  return law;
}

double CarrierDistribution::cdf(double x) const {
  switch (kind) {
    case Kind::point_mass:
      return x >= f_min ? 1.0 : 0.0;
    case Kind::uniform:
      if (x <= f_min) return 0.0;
      if (x >= f_max) return 1.0;
      return (x - f_min) / (f_max - f_min);
    case Kind::tabulated_cdf: {
      if (table.empty() || x <= table.front().frequency) return 0.0;
      if (x >= table.back().frequency) return 1.0;
      auto hi = std::upper_bound(table.begin(), table.end(), x,
                                 [](double v, const Node& n) { return v < n.frequency; });
      auto lo = hi - 1;
      double t = (x - lo->frequency) / (hi->frequency - lo->frequency);
      return lo->cdf + t * (hi->cdf - lo->cdf);
    }
  }
  return 0.0;
}

double CarrierDistribution::pdf(double x) const {
  switch (kind) {
    case Kind::point_mass:
      return 0.0;
    case Kind::uniform:
      return (x < f_min || x > f_max) ? 0.0 : 1.0 / (f_max - f_min);
    case Kind::tabulated_cdf: {
      if (table.size() < 2 || x < table.front().frequency || x > table.back().frequency) return 0.0;
      auto hi = std::upper_bound(table.begin(), table.end(), x,
                                 [](double v, const Node& n) { return v < n.frequency; });
      if (hi == table.end()) --hi;
      auto lo = hi - 1;
      return (hi->cdf - lo->cdf) / (hi->frequency - lo->frequency);
    }
  }
  return 0.0;
}

double CarrierDistribution::quantile(double u) const {
  switch (kind) {
    case Kind::point_mass:
      return f_min;
    case Kind::uniform:
      return f_min + u * (f_max - f_min);
    case Kind::tabulated_cdf: {
      auto hi = std::upper_bound(table.begin(), table.end(), u,
                                 [](double v, const Node& n) { return v < n.cdf; });
      if (hi == table.begin()) return table.front().frequency;
      if (hi == table.end()) return table.back().frequency;
      auto lo = hi - 1;
      double t = (u - lo->cdf) / (hi->cdf - lo->cdf);
      return lo->frequency + t * (hi->frequency - lo->frequency);
    }
  }
  return f_min;
}

double CarrierDistribution::mean() const {
  switch (kind) {
    case Kind::point_mass:
      return f_min;
    case Kind::uniform:
      return 0.5 * (f_min + f_max);
    case Kind::tabulated_cdf: {
      double m = 0.0;
      for (std::size_t k = 1; k < table.size(); ++k) {
        m += (table[k].cdf - table[k - 1].cdf) * 0.5 * (table[k].frequency + table[k - 1].frequency);
      }
      return m;
    }
  }
  return f_min;
}

std::vector<double> CarrierDistribution::breakpoints() const {
  switch (kind) {
    case Kind::point_mass:
      return {f_min};
    case Kind::uniform:
      return {f_min, f_max};
    case Kind::tabulated_cdf: {
      std::vector<double> out;
      out.reserve(table.size());
      for (const auto& n : table) out.push_back(n.frequency);
      return out;
    }
  }
  return {};
}

double ChannelModel::fractional_moment() const {
  if (fading.kind == Fading::Kind::rayleigh_unit_mean) return std::tgamma(1.0 + sigma());
  return fading.fractional_moment;
}

namespace {

class Collector {
 public:
  void require(bool ok, std::string path, std::string message) {
    if (!ok) out_.push_back({std::move(path), std::move(message)});
  }
  std::vector<Violation> take() { return std::move(out_); }

 private:
  std::vector<Violation> out_;
};

bool finite(double v) { return std::isfinite(v); }

void check_carrier(Collector& c, const CarrierDistribution& law, const std::string& path) {
  using Kind = CarrierDistribution::Kind;
  c.require(finite(law.f_min) && finite(law.f_max), path, "carrier bounds must be finite");
  c.require(law.f_min <= law.f_max, path + ".f_min", "f_min must not exceed f_max");
  switch (law.kind) {
    case Kind::uniform:
      c.require(law.f_min < law.f_max, path + ".f_max", "uniform carrier requires f_min < f_max");
      break;
    case Kind::point_mass:
      c.require(law.f_min == law.f_max, path + ".f_max", "point-mass carrier requires f_min = f_max");
      break;
    case Kind::tabulated_cdf: {
      const auto& t = law.table;
      if (t.size() < 2) {
        c.require(false, path + ".table", "tabulated cdf needs at least two nodes");
        break;
      }
      for (std::size_t k = 1; k < t.size(); ++k) {
        if (!(t[k].frequency > t[k - 1].frequency) || !(t[k].cdf > t[k - 1].cdf)) {
          c.require(false, path + ".table[" + std::to_string(k) + "]",
                    "table must be strictly increasing in frequency and cdf");
        }
      }
      c.require(t.front().cdf == 0.0, path + ".table[0]", "tabulated cdf must start at 0");
      c.require(t.back().cdf == 1.0, path + ".table[" + std::to_string(t.size() - 1) + "]",
                "tabulated cdf must end at 1");
      c.require(t.front().frequency == law.f_min && t.back().frequency == law.f_max, path + ".table",
                "table must span [f_min, f_max]");
      break;
    }
  }
}

}  // namespace

std::vector<Violation> validate_scenario(const Scenario& s) {
  Collector c;
  c.require(!s.classes.empty(), "classes", "at least one technology class is required");
  c.require(s.reference_class < s.classes.size(), "reference_class", "reference class index out of range");

  for (std::size_t i = 0; i < s.classes.size(); ++i) {
    const auto& k = s.classes[i];
    const std::string p = "classes[" + std::to_string(i) + "]";
    c.require(k.tx_power > 0.0, p + ".tx_power", "tx_power must be positive");
    c.require(k.bandwidth > 0.0, p + ".bandwidth", "bandwidth must be positive");
    c.require(k.packet_time > 0.0, p + ".packet_time", "packet_time must be positive");
    c.require(k.mean_inter_packet_time >= k.packet_time, p + ".mean_inter_packet_time",
              "packet_time must not exceed mean_inter_packet_time (duty cycle above 1)");
    c.require(k.device_density >= 0.0 && finite(k.device_density), p + ".device_density",
              "device_density must be finite and non-negative");
    c.require(k.ap_density >= 0.0 && finite(k.ap_density), p + ".ap_density",
              "ap_density must be finite and non-negative");
    c.require(k.orthogonal_channels >= 1, p + ".orthogonal_channels", "orthogonal_channels must be at least 1");
    c.require(k.orthogonal_codes >= 1, p + ".orthogonal_codes", "orthogonal_codes must be at least 1");
    check_carrier(c, k.carrier, p + ".carrier");
  }

  c.require(s.channel.pathloss_exponent > 2.0, "channel.pathloss_exponent", "pathloss_exponent must exceed 2");
  c.require(s.channel.noise_density >= 0.0 && finite(s.channel.noise_density), "channel.noise_density",
            "noise_density must be finite and non-negative");
  if (s.channel.fading.kind == Fading::Kind::general) {
    c.require(s.channel.fading.fractional_moment > 0.0, "channel.fading.fractional_moment",
              "fractional moment must be positive");
  }

  const auto& e = s.energy;
  c.require(e.circuit_power >= 0.0, "energy.circuit_power", "circuit_power must be non-negative");
  c.require(e.inv_pa_efficiency >= 0.0, "energy.inv_pa_efficiency", "inv_pa_efficiency must be non-negative");
  c.require(e.rx_power >= 0.0, "energy.rx_power", "rx_power must be non-negative");
  c.require(e.active_time >= 0.0, "energy.active_time", "active_time must be non-negative");
  c.require(e.ack_time >= 0.0, "energy.ack_time", "ack_time must be non-negative");
  c.require(e.wait_time >= 0.0, "energy.wait_time", "wait_time must be non-negative");
  c.require(e.battery_capacity > 0.0, "energy.battery_capacity", "battery_capacity must be positive");

  c.require(s.retransmission.max_transmissions >= 1, "retransmission.max_transmissions",
            "max_transmissions must be at least 1");
  c.require(s.retransmission.retry_wait >= 0.0, "retransmission.retry_wait", "retry_wait must be non-negative");

  c.require(s.sinr_threshold > 0.0 && finite(s.sinr_threshold), "sinr_threshold",
            "sinr_threshold must be positive");

  const auto& a = s.ack_model;
  switch (a.kind) {
    case AckModel::Kind::ideal:
      break;
    case AckModel::Kind::fixed_probability:
      c.require(a.probability >= 0.0 && a.probability <= 1.0, "ack_model.probability",
                "ack probability must lie in [0, 1]");
      break;
    case AckModel::Kind::computed_from_ap_density:
      c.require(a.ap_tx_power > 0.0, "ack_model.ap_tx_power", "computed ack model needs a positive ap_tx_power");
      c.require(a.ap_activity > 0.0 && a.ap_activity <= 1.0, "ack_model.ap_activity",
                "computed ack model needs ap_activity in (0, 1]");
      break;
  }
  return c.take();
}

void require_valid(const Scenario& s) {
  auto v = validate_scenario(s);
  if (v.empty()) return;
  std::ostringstream msg;
  msg << "invalid scenario:";
  for (const auto& x : v) msg << "\n  " << x.path << ": " << x.message;
  throw InputError(msg.str());
}

double time_activity_factor(std::size_t i, std::size_t j, const Scenario& s) {
  if (i >= s.classes.size() || j >= s.classes.size()) {
    throw InputError("time_activity_factor: class index out of range");
  }
  const auto& ci = s.classes[i];
  const auto& cj = s.classes[j];
  double same_tech = 1.0;
  if (ci.technology_id == cj.technology_id) {
    same_tech = 1.0 / (static_cast<double>(ci.orthogonal_channels) * ci.orthogonal_codes);
  }
  return same_tech * ci.packet_time / ci.mean_inter_packet_time;
}

double noise_power(std::size_t j, const Scenario& s) {
  return s.channel.noise_density * s.classes.at(j).bandwidth;
}

const char* to_string(TruncationMode mode) {
  switch (mode) {
    case TruncationMode::paper_literal:
      return "paper-literal";
    case TruncationMode::normalized_conditional:
      return "normalized-conditional";
    case TruncationMode::with_failure_tail:
      return "with-failure-tail";
  }
  return "?";
}

const char* to_string(CarrierDistribution::Kind kind) {
  switch (kind) {
    case CarrierDistribution::Kind::uniform:
      return "uniform";
    case CarrierDistribution::Kind::point_mass:
      return "point-mass";
    case CarrierDistribution::Kind::tabulated_cdf:
      return "tabulated-cdf";
  }
  return "?";
}

const char* to_string(AckModel::Kind kind) {
  switch (kind) {
    case AckModel::Kind::ideal:
      return "ideal";
    case AckModel::Kind::fixed_probability:
      return "fixed-probability";
    case AckModel::Kind::computed_from_ap_density:
      return "computed-from-ap-density";
  }
  return "?";
}

}  // namespace coexist
