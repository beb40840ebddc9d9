#include "coexist/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "coexist/errors.hpp"
#include "coexist/overlap.hpp"
#include "coexist/quadrature.hpp"

namespace coexist {

namespace {

constexpr double kPi = std::numbers::pi;

double sinc(double x) { return std::sin(kPi * x) / (kPi * x); }

double fading_factor(const Scenario& s, FadingFormula formula) {
  const double sigma = s.channel.sigma();
  if (formula == FadingFormula::rayleigh) return 1.0 / sinc(sigma);
  return s.channel.fractional_moment() * std::tgamma(1.0 - sigma);
}

void check_index(std::size_t j, const Scenario& s) {
  if (j >= s.classes.size()) throw InputError("class index out of range");
}

// 1 - (1-q)^n without cancellation.
double prob_any(double q, int n) {
  if (q >= 1.0) return 1.0;
  return -std::expm1(n * std::log1p(-q));
}

double prob_none(double q, int n) {
  if (q >= 1.0) return 0.0;
  return std::exp(n * std::log1p(-q));
}

// sum_{n=1}^{N} n q (1-q)^{n-1}. The closed form (1-r^N)/q - N r^N
// cancels badly as q -> 0; below the cutoff the sum is short anyway.
double first_moment_sum(double q, int n_max) {
  if (q < 1e-3) {
    double acc = 0.0;
    double r_pow = 1.0;
    for (int n = 1; n <= n_max; ++n) {
      acc += n * q * r_pow;
      r_pow *= (1.0 - q);
    }
    return acc;
  }
  return prob_any(q, n_max) / q - n_max * prob_none(q, n_max);
}

}  // namespace

double SuccessExponents::probability(double distance, double threshold) const {
  if (distance == 0.0) return 1.0;
  const double noise = threshold * std::pow(distance, alpha) * noise_coeff;
  const double interference = std::pow(threshold, sigma) * distance * distance * interference_coeff;
  return std::exp(-(noise + interference));
}

double frequency_activity_factor(std::size_t i, std::size_t j, double f_j, const Scenario& s) {
  check_index(i, s);
  check_index(j, s);
  OverlapQuery q{f_j, s.classes[j].bandwidth, s.classes[i].bandwidth, s.classes[i].carrier};
  return expected_overlap_ratio(q);
}

SuccessExponents success_exponents(std::size_t j, double f_j, const Scenario& s, FadingFormula formula) {
  check_index(j, s);
  const auto& ref = s.classes[j];
  SuccessExponents e;
  e.alpha = s.channel.pathloss_exponent;
  e.sigma = s.channel.sigma();
  e.noise_coeff = noise_power(j, s) / ref.tx_power;

  const double fading = fading_factor(s, formula);
  double sum = 0.0;
  for (std::size_t i = 0; i < s.classes.size(); ++i) {
    const auto& c = s.classes[i];
    const double xi = time_activity_factor(i, j, s);
    if (xi == 0.0 || c.device_density == 0.0) continue;
    const double upsilon = frequency_activity_factor(i, j, f_j, s);
    if (upsilon == 0.0) continue;
    sum += xi * c.device_density * kPi * std::pow(upsilon * c.tx_power / ref.tx_power, e.sigma) * fading;
  }
  e.interference_coeff = sum;
  return e;
}

FadingFormula default_formula(const Scenario& s) {
  return s.channel.fading.kind == Fading::Kind::rayleigh_unit_mean ? FadingFormula::rayleigh
                                                                    : FadingFormula::general;
}

double success_probability_general(const SuccessQuery& q, const Scenario& s) {
  if (!q.carrier) throw InputError("success_probability_general requires a carrier frequency");
  if (q.distance < 0.0 || !(q.sinr_threshold > 0.0)) throw InputError("invalid success query");
  return success_exponents(q.ref_class, *q.carrier, s, FadingFormula::general)
      .probability(q.distance, q.sinr_threshold);
}

double success_probability_rayleigh(const SuccessQuery& q, const Scenario& s) {
  if (s.channel.fading.kind != Fading::Kind::rayleigh_unit_mean) {
    throw InputError("success_probability_rayleigh requires Rayleigh unit-mean fading");
  }
  if (!q.carrier) throw InputError("success_probability_rayleigh requires a carrier frequency");
  if (q.distance < 0.0 || !(q.sinr_threshold > 0.0)) throw InputError("invalid success query");
  return success_exponents(q.ref_class, *q.carrier, s, FadingFormula::rayleigh)
      .probability(q.distance, q.sinr_threshold);
}

std::vector<double> carrier_breakpoints(std::size_t j, const Scenario& s) {
  check_index(j, s);
  const double wj = s.classes[j].bandwidth;
  std::vector<double> out;
  for (const auto& c : s.classes) {
    const double half = 0.5 * (wj + c.bandwidth);
    const double nest = 0.5 * std::abs(wj - c.bandwidth);
    for (double b : c.carrier.breakpoints()) {
      out.insert(out.end(), {b - half, b + half, b - nest, b + nest});
    }
  }
  return out;
}

double average_over_carrier(const CarrierDistribution& law, const std::function<double(double)>& f,
                            std::span<const double> extra_breaks, double abs_tol) {
  if (law.kind == CarrierDistribution::Kind::point_mass) return f(law.f_min);
  std::vector<double> breaks(extra_breaks.begin(), extra_breaks.end());
  for (double b : law.breakpoints()) breaks.push_back(b);
  auto res = integrate_piecewise([&](double x) { return law.pdf(x) * f(x); }, law.f_min, law.f_max, breaks,
                                 abs_tol);
  if (!res.converged) throw NumericalError("carrier average: quadrature did not converge");
  return res.value;
}

double success_probability_avg(const SuccessQuery& q, const Scenario& s) {
  check_index(q.ref_class, s);
  if (q.distance < 0.0 || !(q.sinr_threshold > 0.0)) throw InputError("invalid success query");
  const auto formula = default_formula(s);
  auto at = [&](double f) {
    return success_exponents(q.ref_class, f, s, formula).probability(q.distance, q.sinr_threshold);
  };
  if (q.carrier) return at(*q.carrier);
  const auto breaks = carrier_breakpoints(q.ref_class, s);
  return std::clamp(average_over_carrier(s.classes[q.ref_class].carrier, at, breaks, 1e-8), 0.0, 1.0);
}

double ack_success_probability(std::size_t j, double d, const Scenario& s) {
  check_index(j, s);
  const auto& a = s.ack_model;
  switch (a.kind) {
    case AckModel::Kind::ideal:
      return 1.0;
    case AckModel::Kind::fixed_probability:
      return a.probability;
    case AckModel::Kind::computed_from_ap_density: {
      if (!(a.ap_tx_power > 0.0) || !(a.ap_activity > 0.0)) {
        throw InputError("computed ACK model needs ap_tx_power and ap_activity");
      }
      // Downlink: the AP is the transmitter and neighbouring APs of the same
      // class, on the dedicated ACK channel, are the only interferers.
      SuccessExponents e;
      e.alpha = s.channel.pathloss_exponent;
      e.sigma = s.channel.sigma();
      e.noise_coeff = noise_power(j, s) / a.ap_tx_power;
      e.interference_coeff = a.ap_activity * s.classes[j].ap_density * kPi * fading_factor(s, default_formula(s));
      return e.probability(d, s.sinr_threshold);
    }
  }
  return 1.0;
}

double mean_transmissions(double q, int max_tx, TruncationMode mode) {
  if (max_tx < 1) throw InputError("max_transmissions must be at least 1");
  q = std::clamp(q, 0.0, 1.0);
  switch (mode) {
    case TruncationMode::paper_literal:
      return first_moment_sum(q, max_tx);
    case TruncationMode::normalized_conditional:
      if (q == 0.0) return 0.5 * (max_tx + 1);
      return first_moment_sum(q, max_tx) / prob_any(q, max_tx);
    case TruncationMode::with_failure_tail:
      return first_moment_sum(q, max_tx) + max_tx * prob_none(q, max_tx);
  }
  return 0.0;
}

double expected_delay(double p_sc, int max_tx, double packet_time, double retry_wait, TruncationMode mode) {
  if (max_tx < 1) throw InputError("max_transmissions must be at least 1");
  const double p = std::clamp(p_sc, 0.0, 1.0);
  // sum [n T + (n-1) W] p (1-p)^{n-1} = (T + W) S1 - W S0
  const double s0 = prob_any(p, max_tx);
  const double s1 = first_moment_sum(p, max_tx);
  const double literal = (packet_time + retry_wait) * s1 - retry_wait * s0;
  switch (mode) {
    case TruncationMode::paper_literal:
      return literal;
    case TruncationMode::normalized_conditional:
      if (p == 0.0) return (packet_time + retry_wait) * 0.5 * (max_tx + 1) - retry_wait;
      return literal / s0;
    case TruncationMode::with_failure_tail:
      return literal + (max_tx * packet_time + (max_tx - 1) * retry_wait) * prob_none(p, max_tx);
  }
  return 0.0;
}

double mean_transmissions(std::size_t j, double d, const Scenario& s) {
  const double p_sc = success_probability_avg({j, d, s.sinr_threshold, std::nullopt}, s);
  const double q = p_sc * ack_success_probability(j, d, s);
  return mean_transmissions(q, s.retransmission.max_transmissions, s.retransmission.truncation_mode);
}

double expected_delay(std::size_t j, double d, const Scenario& s) {
  const double p_sc = success_probability_avg({j, d, s.sinr_threshold, std::nullopt}, s);
  const auto& r = s.retransmission;
  return expected_delay(p_sc, r.max_transmissions, s.classes[j].packet_time, r.retry_wait, r.truncation_mode);
}

double energy_for_transmissions(double mean_tx, std::size_t j, const Scenario& s) {
  check_index(j, s);
  const auto& e = s.energy;
  const auto& c = s.classes[j];
  return e.circuit_power * e.active_time + (e.circuit_power + e.inv_pa_efficiency * c.tx_power) * c.packet_time * mean_tx +
         (mean_tx - 1.0) * (e.circuit_power * e.wait_time + e.rx_power * e.ack_time) + e.rx_power * e.ack_time;
}

double energy_per_report(std::size_t j, double d, const Scenario& s) {
  return energy_for_transmissions(mean_transmissions(j, d, s), j, s);
}

double battery_lifetime_for_energy(double energy_per_report, std::size_t j, const Scenario& s) {
  check_index(j, s);
  if (!(energy_per_report > 0.0)) throw InputError("battery_lifetime: energy per report must be positive");
  return s.energy.battery_capacity * s.classes[j].mean_inter_packet_time / energy_per_report;
}

double battery_lifetime(std::size_t j, double d, const Scenario& s) {
  return battery_lifetime_for_energy(energy_per_report(j, d, s), j, s);
}

KpiResult analytic_kpis(std::size_t j, double d, const Scenario& s) {
  check_index(j, s);
  const auto& r = s.retransmission;
  KpiResult k;
  k.provenance = KpiResult::Provenance::analytic;
  k.success_probability = success_probability_avg({j, d, s.sinr_threshold, std::nullopt}, s);
  const double q = k.success_probability * ack_success_probability(j, d, s);
  k.mean_transmissions = mean_transmissions(q, r.max_transmissions, r.truncation_mode);
  k.expected_delay = expected_delay(k.success_probability, r.max_transmissions, s.classes[j].packet_time,
                                    r.retry_wait, r.truncation_mode);
  k.energy_per_report = energy_for_transmissions(k.mean_transmissions, j, s);
  k.battery_lifetime = battery_lifetime_for_energy(k.energy_per_report, j, s);
  return k;
}

}  // namespace coexist
