#include <doctest.h>

#include <cmath>
#include <random>

#include "coexist/analytic.hpp"
#include "coexist/errors.hpp"
#include "coexist/profiles.hpp"
#include "coexist/units.hpp"
#include "oracles.hpp"

using namespace coexist;

namespace {

constexpr double kRef = 868.1e6;

SuccessQuery at(double d, double g, std::optional<double> f = kRef) { return {0, d, g, f}; }

// Energy-model example scenario: P_c = 0.1 W, T_a = 2 s, eta = 0.7,
// P_j = 0.1 W, T_j = 1 s, P_r = 0.1 W, T_ack = 1 s.
Scenario energy_example() {
  auto s = reference_scenario();
  s.energy.circuit_power = 0.1;
  s.energy.active_time = 2.0;
  s.energy.inv_pa_efficiency = 0.7;
  s.energy.rx_power = 0.1;
  s.energy.ack_time = 1.0;
  s.energy.wait_time = 1.0;
  s.classes[0].tx_power = 0.1;
  s.classes[0].packet_time = 1.0;
  return s;
}

oracle::Mode to_oracle(TruncationMode m) {
  switch (m) {
    case TruncationMode::paper_literal: return oracle::Mode::literal;
    case TruncationMode::normalized_conditional: return oracle::Mode::normalized;
    case TruncationMode::with_failure_tail: return oracle::Mode::tail;
  }
  return oracle::Mode::literal;
}

}  // namespace

TEST_SUITE("analytic") {
  TEST_CASE("zero distance succeeds surely") {
    const auto s = reference_scenario();
    CHECK(success_probability_general(at(0.0, 2.0), s) == 1.0);
    CHECK(success_probability_rayleigh(at(0.0, 2.0), s) == 1.0);
  }

  TEST_CASE("no interferers leaves the noise term") {
    auto s = reference_scenario();
    for (auto& c : s.classes) c.device_density = 0.0;
    const double n = noise_power(0, s);
    for (double d : {100.0, 1000.0, 3000.0}) {
      const double expected = std::exp(-s.sinr_threshold * std::pow(d, 4) * n / 0.1);
      CHECK(success_probability_general(at(d, s.sinr_threshold), s) == doctest::Approx(expected).epsilon(1e-13));
    }
  }

  TEST_CASE("closed form matches a term-by-term oracle") {
    const auto s = reference_scenario();
    const std::vector<oracle::InterfererTerm> terms = {{0.01, 1e-2, 1.0, 0.1},
                                                       {0.01, 1e-2, 0.1, dbm_to_watts(14.0)}};
    for (double d : {5.0, 20.0, 50.0, 120.0}) {
      for (double g : {0.5, 2.0, 10.0}) {
        const double o = oracle::rayleigh_success(d, g, 4.0, noise_power(0, s), 0.1, terms);
        CHECK(success_probability_rayleigh(at(d, g), s) == doctest::Approx(o).epsilon(1e-7));
      }
    }
  }

  TEST_CASE("alpha = 4 uses 1/sinc(1/2) = pi/2") {
    auto s = reference_scenario();
    s.classes.resize(1);
    s.channel.noise_density = 0.0;
    const double d = 30.0, g = 2.0;
    // single class, unit overlap: xi lambda pi sqrt(g) d^2 pi/2
    const double expected = std::exp(-0.01 * 1e-2 * oracle::pi * std::sqrt(g) * d * d * oracle::pi / 2.0);
    CHECK(success_probability_rayleigh(at(d, g), s) == doctest::Approx(expected).epsilon(1e-12));
  }

  TEST_CASE("Rayleigh form equals the general form with the Gamma(1 + sigma) moment") {
    auto s = reference_scenario();
    for (double alpha : {3.0, 4.0, 6.0}) {
      s.channel.pathloss_exponent = alpha;
      for (double d = 1.0; d < 300.0; d *= 1.7) {
        for (double g = 0.1; g < 100.0; g *= 3.0) {
          const double r = success_probability_rayleigh(at(d, g), s);
          const double gen = success_probability_general(at(d, g), s);
          if (r > 0.0) CHECK(std::abs(r - gen) <= 1e-12 * r);
        }
      }
    }
  }

  TEST_CASE("general fading with an explicit moment") {
    auto s = reference_scenario();
    s.channel.fading = {Fading::Kind::general, 0.5};
    const double e = success_probability_general(at(40.0, 2.0), s);
    CHECK(e > 0.0);
    CHECK(e < 1.0);
    CHECK_THROWS_AS(success_probability_rayleigh(at(40.0, 2.0), s), InputError);
    // a smaller moment means weaker interference
    s.channel.fading.fractional_moment = 0.25;
    CHECK(success_probability_general(at(40.0, 2.0), s) > e);
  }

  TEST_CASE("huge threshold gives zero") {
    const auto s = reference_scenario();
    CHECK(success_probability_rayleigh(at(30.0, 1e12), s) == doctest::Approx(0.0));
  }

  TEST_CASE("carrier is required for the pointwise forms") {
    const auto s = reference_scenario();
    CHECK_THROWS_AS(success_probability_general(at(30.0, 2.0, std::nullopt), s), InputError);
  }

  TEST_CASE("carrier average") {
    auto s = reference_scenario();
    // point mass: the pointwise value
    CHECK(success_probability_avg(at(40.0, 2.0, std::nullopt), s) ==
          doctest::Approx(success_probability_rayleigh(at(40.0, 2.0), s)).epsilon(1e-14));
    // silence the reference class so its own carrier law does not feed back
    // into the interference it sees
    s.classes[0].device_density = 0.0;
    // reference carrier drifting well inside the interferer support: constant integrand
    s.classes[0].carrier = CarrierDistribution::uniform(kRef - 100e3, kRef + 100e3);
    CHECK(success_probability_avg(at(40.0, 2.0, std::nullopt), s) ==
          doctest::Approx(success_probability_rayleigh(at(40.0, 2.0), s)).epsilon(1e-9));
    // drifting across the interferer band edge: edge carriers see less interference
    s.classes[0].carrier = CarrierDistribution::uniform(kRef + 500e3, kRef + 800e3);
    const double avg = success_probability_avg(at(40.0, 2.0, std::nullopt), s);
    const double centre = success_probability_rayleigh(at(40.0, 2.0), s);
    CHECK(avg > centre + 1e-3);
    const double oracle_avg = oracle::gauss_legendre(
        [&](double f) { return success_probability_rayleigh(at(40.0, 2.0, f), s) / 300e3; }, kRef + 500e3,
        kRef + 800e3, 600);
    CHECK(avg == doctest::Approx(oracle_avg).epsilon(1e-7));
  }

  TEST_CASE("ack probability") {
    auto s = reference_scenario();
    CHECK(ack_success_probability(0, 50.0, s) == 1.0);
    s.ack_model = {AckModel::Kind::fixed_probability, 0.9, 0.0, 0.0};
    CHECK(ack_success_probability(0, 50.0, s) == 0.9);
    s.ack_model = {AckModel::Kind::computed_from_ap_density, 1.0, dbm_to_watts(27.0), 0.1};
    const double with_aps = ack_success_probability(0, 500.0, s);
    s.classes[0].ap_density = 0.0;
    const double noise_only = std::exp(-s.sinr_threshold * std::pow(500.0, 4) * noise_power(0, s) / dbm_to_watts(27.0));
    CHECK(ack_success_probability(0, 500.0, s) == doctest::Approx(noise_only).epsilon(1e-13));
    CHECK(with_aps < noise_only);
    s.ack_model.ap_tx_power = 0.0;
    CHECK_THROWS(ack_success_probability(0, 500.0, s));
  }

  TEST_CASE("mean transmissions examples") {
    for (auto m : {TruncationMode::paper_literal, TruncationMode::normalized_conditional,
                   TruncationMode::with_failure_tail}) {
      CHECK(mean_transmissions(1.0, 7, m) == doctest::Approx(1.0).epsilon(1e-15));
    }
    double direct = 0.0;
    for (int n = 1; n <= 7; ++n) direct += n * std::pow(0.5, n);
    CHECK(mean_transmissions(0.5, 7, TruncationMode::paper_literal) == doctest::Approx(direct).epsilon(1e-14));
    CHECK(mean_transmissions(1e-12, 7, TruncationMode::with_failure_tail) == doctest::Approx(7.0).epsilon(1e-9));
    CHECK(mean_transmissions(0.0, 7, TruncationMode::with_failure_tail) == 7.0);
    CHECK(mean_transmissions(0.0, 7, TruncationMode::normalized_conditional) == 4.0);
    CHECK_THROWS_AS(mean_transmissions(0.5, 0, TruncationMode::paper_literal), InputError);
  }

  TEST_CASE("truncated sums agree with direct summation") {
    for (auto m : {TruncationMode::paper_literal, TruncationMode::normalized_conditional,
                   TruncationMode::with_failure_tail}) {
      for (double q : {1e-6, 1e-4, 0.00099, 0.001, 0.0011, 0.01, 0.1, 0.37, 0.5, 0.9, 0.999, 1.0}) {
        for (int n : {1, 2, 7, 20, 50}) {
          const double a = mean_transmissions(q, n, m);
          const double o = oracle::mean_transmissions(q, n, to_oracle(m));
          CHECK(std::abs(a - o) <= 1e-12 * std::max(1.0, o));
          const double da = expected_delay(q, n, 1.3, 0.7, m);
          const double dor = oracle::expected_delay(q, n, 1.3, 0.7, to_oracle(m));
          CHECK(std::abs(da - dor) <= 1e-12 * std::max(1.0, dor));
        }
      }
    }
  }

  TEST_CASE("transmission bounds and ordering") {
    for (double q = 0.0; q <= 1.0; q += 0.01) {
      for (int n : {1, 3, 7, 20}) {
        const double lit = mean_transmissions(q, n, TruncationMode::paper_literal);
        const double norm = mean_transmissions(q, n, TruncationMode::normalized_conditional);
        const double tail = mean_transmissions(q, n, TruncationMode::with_failure_tail);
        CHECK(norm >= 1.0 - 1e-12);
        CHECK(norm <= n + 1e-12);
        CHECK(tail >= 1.0 - 1e-12);
        CHECK(tail <= n + 1e-12);
        CHECK(lit <= norm + 1e-12);
      }
    }
  }

  TEST_CASE("delay examples") {
    CHECK(expected_delay(1.0, 7, 1.5, 2.0, TruncationMode::paper_literal) == doctest::Approx(1.5));
    CHECK(expected_delay(0.5, 1, 1.5, 2.0, TruncationMode::paper_literal) == doctest::Approx(0.75));
    CHECK(expected_delay(0.0, 7, 1.0, 1.0, TruncationMode::with_failure_tail) == doctest::Approx(13.0));
  }

  TEST_CASE("delay ignores the ACK, transmissions do not") {
    auto s = reference_scenario();
    s.retransmission.truncation_mode = TruncationMode::normalized_conditional;
    const double d = 30.0;
    const double delay = expected_delay(0, d, s);
    const double ntx = mean_transmissions(0, d, s);
    s.ack_model = {AckModel::Kind::fixed_probability, 0.5, 0.0, 0.0};
    CHECK(expected_delay(0, d, s) == doctest::Approx(delay).epsilon(1e-15));
    CHECK(mean_transmissions(0, d, s) > ntx);
  }

  TEST_CASE("energy per report") {
    const auto s = energy_example();
    CHECK(energy_for_transmissions(1.0, 0, s) == doctest::Approx(0.47).epsilon(1e-14));
    // one more attempt: (P_c + eta P_j) T_j + P_c T_w + P_r T_ack
    CHECK(energy_for_transmissions(2.0, 0, s) - energy_for_transmissions(1.0, 0, s) ==
          doctest::Approx(0.17 + 0.1 + 0.1).epsilon(1e-14));
  }

  TEST_CASE("battery lifetime") {
    auto s = energy_example();
    s.energy.battery_capacity = 4000.0;
    s.classes[0].mean_inter_packet_time = 3600.0;
    CHECK(battery_lifetime_for_energy(0.47, 0, s) == doctest::Approx(4000.0 * 3600.0 / 0.47).epsilon(1e-14));
    CHECK(battery_lifetime_for_energy(0.47, 0, s) == doctest::Approx(3.063e7).epsilon(1e-3));
    const double l = battery_lifetime(0, 40.0, s);
    s.energy.battery_capacity *= 2.0;
    CHECK(battery_lifetime(0, 40.0, s) == doctest::Approx(2.0 * l).epsilon(1e-14));
    CHECK_THROWS_AS(battery_lifetime_for_energy(0.0, 0, s), InputError);
  }

  TEST_CASE("lifetime does not increase with distance") {
    for (auto m : {TruncationMode::normalized_conditional, TruncationMode::with_failure_tail}) {
      auto s = reference_scenario();
      s.retransmission.truncation_mode = m;
      double prev = battery_lifetime(0, 1.0, s);
      for (double d = 2.0; d < 400.0; d += 3.0) {
        const double l = battery_lifetime(0, d, s);
        CHECK(l <= prev * (1.0 + 1e-12));
        prev = l;
      }
    }
  }

  TEST_CASE("monotonicity of the success probability") {
    const auto s = reference_scenario();
    const double g = s.sinr_threshold;
    double prev = 1.0;
    for (double d = 1.0; d < 150.0; d += 1.0) {
      const double p = success_probability_rayleigh(at(d, g), s);
      CHECK(p < prev);
      prev = p;
    }
    prev = 1.0;
    for (double gg = 0.01; gg < 100.0; gg *= 1.3) {
      const double p = success_probability_rayleigh(at(40.0, gg), s);
      CHECK(p < prev);
      prev = p;
    }
    for (std::size_t i = 0; i < 2; ++i) {
      auto t = s;
      t.classes[i].device_density *= 1.5;
      CHECK(success_probability_rayleigh(at(40.0, g), t) < success_probability_rayleigh(at(40.0, g), s));
    }
    {
      // larger overlap: narrower interferer carrier support
      auto t = s;
      t.classes[1].carrier = CarrierDistribution::uniform(kRef - 300e3, kRef + 300e3);
      CHECK(success_probability_rayleigh(at(40.0, g), t) < success_probability_rayleigh(at(40.0, g), s));
    }
    {
      auto t = s;
      t.classes[0].tx_power *= 2.0;
      CHECK(success_probability_rayleigh(at(40.0, g), t) >= success_probability_rayleigh(at(40.0, g), s));
    }
  }

  TEST_CASE("a silent class changes nothing") {
    const auto s = reference_scenario();
    const double base = success_probability_avg(at(40.0, 2.0, std::nullopt), s);
    auto extra = s.classes[1];
    extra.name = "silent";
    extra.technology_id = "other";
    SUBCASE("zero density") {
      auto t = s;
      extra.device_density = 0.0;
      t.classes.push_back(extra);
      CHECK(success_probability_avg(at(40.0, 2.0, std::nullopt), t) == doctest::Approx(base).epsilon(1e-15));
    }
    SUBCASE("no spectral overlap") {
      auto t = s;
      extra.carrier = CarrierDistribution::point_mass(kRef + 10e6);
      t.classes.push_back(extra);
      CHECK(success_probability_avg(at(40.0, 2.0, std::nullopt), t) == doctest::Approx(base).epsilon(1e-15));
    }
  }

  TEST_CASE("scaling every power and the noise together changes nothing") {
    const auto s = reference_scenario();
    for (double c : {1e-3, 0.5, 7.0, 1e4}) {
      auto t = s;
      for (auto& k : t.classes) k.tx_power *= c;
      t.channel.noise_density *= c;
      for (double d : {10.0, 40.0, 90.0}) {
        CHECK(success_probability_rayleigh(at(d, 2.0), t) ==
              doctest::Approx(success_probability_rayleigh(at(d, 2.0), s)).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("analytic kpis are consistent") {
    const auto s = reference_scenario();
    const auto k = analytic_kpis(0, 35.0, s);
    CHECK(k.provenance == KpiResult::Provenance::analytic);
    CHECK_FALSE(k.ci_halfwidth.has_value());
    CHECK(k.success_probability >= 0.0);
    CHECK(k.success_probability <= 1.0);
    CHECK(k.mean_transmissions >= 1.0);
    CHECK(k.mean_transmissions <= 7.0);
    CHECK(k.energy_per_report == doctest::Approx(energy_per_report(0, 35.0, s)));
    CHECK(k.battery_lifetime == doctest::Approx(battery_lifetime(0, 35.0, s)));
    CHECK(k.expected_delay == doctest::Approx(expected_delay(0, 35.0, s)));
  }
}
