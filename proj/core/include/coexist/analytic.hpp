#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "coexist/model.hpp"

namespace coexist {

struct SuccessQuery {
  std::size_t ref_class = 0;
  double distance = 0.0;        ///< m, device to serving AP
  double sinr_threshold = 1.0;  ///< linear
  std::optional<double> carrier;  ///< Hz; absent means average over the carrier law
};

/// Which closed form supplies the E[h^sigma] * Gamma(1 - sigma) factor.
enum class FadingFormula {
  general,   ///< channel fractional moment times Gamma(1 - sigma)
  rayleigh,  ///< 1 / sinc(sigma)
};

/**
 * The two exponents of the closed-form success probability for one
 * reference class at one carrier:
 *
 *   P_sc(d, g) = exp(-g * d^alpha * noise_coeff - g^sigma * d^2 * interference_coeff)
 *
 * noise_coeff is N / P_j; interference_coeff sums the Laplace-functional
 * exponents of every class. Precomputing them makes repeated CCDF
 * evaluation (joint reception grids) cheap.
 */
struct SuccessExponents {
  double alpha = 4.0;
  double sigma = 0.5;
  double noise_coeff = 0.0;
  double interference_coeff = 0.0;

  double probability(double distance, double threshold) const;
};

/// Expected overlapped fraction of class j's band caused by one class-i
/// interferer when class j transmits on carrier f_j.
double frequency_activity_factor(std::size_t i, std::size_t j, double f_j, const Scenario& s);

SuccessExponents success_exponents(std::size_t j, double f_j, const Scenario& s, FadingFormula formula);

/// The formula matching the scenario's fading law.
FadingFormula default_formula(const Scenario& s);

/// Success probability with a general fading law. Requires q.carrier.
double success_probability_general(const SuccessQuery& q, const Scenario& s);

/// Rayleigh specialisation. Requires q.carrier and Rayleigh fading.
double success_probability_rayleigh(const SuccessQuery& q, const Scenario& s);

/// Carrier-averaged success probability. A carrier in `q` pins the
/// carrier; otherwise the reference class's carrier law is integrated
/// (tolerance 1e-8). Throws NumericalError on quadrature failure.
double success_probability_avg(const SuccessQuery& q, const Scenario& s);

/// Probability of receiving the ACK for a class-j device at distance d.
double ack_success_probability(std::size_t j, double d, const Scenario& s);

// Truncated geometric sums with per-attempt success probability q and at
// most `max_tx` attempts.
double mean_transmissions(double q, int max_tx, TruncationMode mode);
double expected_delay(double p_sc, int max_tx, double packet_time, double retry_wait, TruncationMode mode);

/// Uses q = P_sc * P_ack.
double mean_transmissions(std::size_t j, double d, const Scenario& s);
/// Uses P_sc alone (no ACK factor).
double expected_delay(std::size_t j, double d, const Scenario& s);

double energy_for_transmissions(double mean_tx, std::size_t j, const Scenario& s);
double energy_per_report(std::size_t j, double d, const Scenario& s);

double battery_lifetime_for_energy(double energy_per_report, std::size_t j, const Scenario& s);
double battery_lifetime(std::size_t j, double d, const Scenario& s);

/// All KPIs at distance d in one pass (single carrier average).
KpiResult analytic_kpis(std::size_t j, double d, const Scenario& s);

/// Average of f over a carrier law; breakpoints mark kinks of f.
double average_over_carrier(const CarrierDistribution& law, const std::function<double(double)>& f,
                            std::span<const double> extra_breaks, double abs_tol);

/// Kinks of f_j -> P_sc(j, ., f_j) induced by the interferer carrier laws.
std::vector<double> carrier_breakpoints(std::size_t j, const Scenario& s);

}  // namespace coexist
