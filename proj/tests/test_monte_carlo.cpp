#include <doctest.h>

#include <cmath>
#include <numeric>

#include "coexist/analytic.hpp"
#include "coexist/errors.hpp"
#include "coexist/monte_carlo.hpp"
#include "coexist/profiles.hpp"
#include "oracles.hpp"

using namespace coexist;

namespace {

SimConfig sim(std::uint64_t trials, std::uint64_t seed = 42) {
  SimConfig c;
  c.trials = trials;
  c.seed = seed;
  c.threads = 1;
  return c;
}

Scenario quiet() {
  auto s = reference_scenario();
  for (auto& c : s.classes) c.device_density = 0.0;
  return s;
}

JointReceptionConfig aps(std::vector<double> d, std::vector<double> p) {
  JointReceptionConfig c;
  c.ap_distances = std::move(d);
  c.availabilities = std::move(p);
  return c;
}

}  // namespace

TEST_SUITE("monte_carlo") {
  TEST_CASE("empty process") {
    RandomStream rng(1, 0);
    CHECK(sample_ppp(0.0, 500.0, rng).empty());
    CHECK_THROWS_AS(sample_ppp(-1.0, 500.0, rng), InputError);
  }

  TEST_CASE("PPP counts have the Poisson mean") {
    const double mean = 1e-2 * oracle::pi * 500.0 * 500.0;
    double total = 0.0;
    for (std::uint64_t k = 0; k < 1000; ++k) {
      RandomStream rng(2, k);
      const auto pts = sample_ppp(1e-2, 500.0, rng);
      total += static_cast<double>(pts.size());
      if (k == 0) {
        for (const auto& p : pts) CHECK(p.x * p.x + p.y * p.y <= 500.0 * 500.0);
      }
    }
    CHECK(std::abs(total / 1000.0 - mean) < 3.0 * std::sqrt(mean));
  }

  TEST_CASE("PPP counts pass a chi-squared test against Poisson") {
    const double radius = 10.0;
    const double intensity = 4.0 / (oracle::pi * radius * radius);  // mean 4
    const int bins = 11;                                              // 0..9, >= 10
    std::vector<double> observed(bins, 0.0);
    const int n = 10000;
    for (int k = 0; k < n; ++k) {
      RandomStream rng(3, k);
      const auto c = sample_ppp(intensity, radius, rng).size();
      observed[std::min<std::size_t>(c, bins - 1)] += 1.0;
    }
    double chi2 = 0.0, cum = 0.0;
    for (int b = 0; b < bins; ++b) {
      double p;
      if (b < bins - 1) {
        p = std::exp(-4.0) * std::pow(4.0, b) / std::tgamma(b + 1.0);
        cum += p;
      } else {
        p = 1.0 - cum;
      }
      chi2 += std::pow(observed[b] - n * p, 2) / (n * p);
    }
    // 1% critical value of chi-squared with 10 degrees of freedom
    CHECK(chi2 < 23.209);
  }

  TEST_CASE("disc positions are uniform in area") {
    RandomStream rng(4, 0);
    const auto pts = sample_ppp(1.0, 100.0, rng);
    int inner = 0;
    for (const auto& p : pts) inner += p.x * p.x + p.y * p.y <= 50.0 * 50.0;
    const double frac = static_cast<double>(inner) / pts.size();
    CHECK(std::abs(frac - 0.25) < 4.0 * std::sqrt(0.25 * 0.75 / pts.size()));
  }

  TEST_CASE("noise-only snapshots follow the exponential law") {
    const auto s = quiet();
    const double d = 2900.0;
    const double expected = std::exp(-s.sinr_threshold * std::pow(d, 4) * noise_power(0, s) / 0.1);
    const auto e = snapshot_success(0, d, s.sinr_threshold, s, sim(40000));
    CHECK(e.trials_used == 40000);
    CHECK(std::abs(e.mean - expected) < 4.0 * e.std_error);
  }

  TEST_CASE("tiny threshold succeeds") {
    const auto s = reference_scenario();
    CHECK(snapshot_success(0, 40.0, 1e-9, s, sim(2000)).mean == 1.0);
  }

  TEST_CASE("expected-overlap simulation agrees with the closed form") {
    const auto s = reference_scenario();
    auto cfg = sim(40000);
    cfg.overlap = OverlapSampling::expected;
    for (double d : {15.0, 35.0, 55.0}) {
      const auto e = snapshot_success(0, d, s.sinr_threshold, s, cfg);
      const double p = success_probability_avg({0, d, s.sinr_threshold, std::nullopt}, s);
      const double se = std::sqrt(p * (1 - p) / cfg.trials);
      CHECK(std::abs(e.mean - p) < 4.0 * se);
    }
  }

  TEST_CASE("same seed, same estimate, any thread count") {
    const auto s = reference_scenario();
    auto a = sim(20000, 9);
    auto b = a;
    b.threads = 4;
    const auto ea = snapshot_success(0, 35.0, s.sinr_threshold, s, a);
    const auto eb = snapshot_success(0, 35.0, s.sinr_threshold, s, b);
    CHECK(ea.mean == eb.mean);
    CHECK(ea.std_error == eb.std_error);
    auto c = a;
    c.seed = 10;
    CHECK(snapshot_success(0, 35.0, s.sinr_threshold, s, c).mean != ea.mean);

    const auto sa = simulate_session(0, 35.0, s, a);
    const auto sb = simulate_session(0, 35.0, s, b);
    CHECK(sa.energy_per_report.mean == sb.energy_per_report.mean);
    CHECK(sa.delay_success.mean == sb.delay_success.mean);

    const auto jr = aps({15.0, 22.0, 28.0}, {1.0, 0.8, 1.0});
    a.trials = b.trials = 3000;
    CHECK(snapshot_mrc_success(jr, 0, 2.0, s, a).mean == snapshot_mrc_success(jr, 0, 2.0, s, b).mean);
  }

  TEST_CASE("doubling trials shrinks the standard error by sqrt 2") {
    const auto s = reference_scenario();
    double ratio = 0.0;
    const int repeats = 20;
    for (int r = 0; r < repeats; ++r) {
      const auto small = snapshot_success(0, 30.0, s.sinr_threshold, s, sim(2000, 100 + r));
      const auto large = snapshot_success(0, 30.0, s.sinr_threshold, s, sim(4000, 200 + r));
      ratio += small.std_error / large.std_error;
    }
    ratio /= repeats;
    CHECK(ratio == doctest::Approx(std::sqrt(2.0)).epsilon(0.1));
  }

  TEST_CASE("antithetic pairs") {
    const auto s = quiet();
    const double d = 2900.0;
    const double expected = std::exp(-s.sinr_threshold * std::pow(d, 4) * noise_power(0, s) / 0.1);
    auto cfg = sim(20001);
    cfg.antithetic = true;
    const auto e = snapshot_success(0, d, s.sinr_threshold, s, cfg);
    CHECK(e.trials_used == 20002);
    CHECK(std::abs(e.mean - expected) < 4.0 * e.std_error);
    auto plain = sim(20002);
    // mirrored uniforms are negatively correlated here, so pairing helps
    CHECK(e.std_error < snapshot_success(0, d, s.sinr_threshold, s, plain).std_error);
  }

  TEST_CASE("doubling the region radius moves the estimate by less than a standard error") {
    const auto s = reference_scenario();
    for (double d : {20.0, 45.0}) {
      auto a = sim(20000);
      a.region_radius = default_region_radius(0, d, s.sinr_threshold, s, 1e-4);
      auto b = a;
      b.region_radius *= 2.0;
      const auto ea = snapshot_success(0, d, s.sinr_threshold, s, a);
      const auto eb = snapshot_success(0, d, s.sinr_threshold, s, b);
      CHECK(std::abs(ea.mean - eb.mean) < std::max(ea.std_error, 1.0 / a.trials));
    }
  }

  TEST_CASE("default region radius") {
    const auto s = reference_scenario();
    CHECK(default_region_radius(0, 10.0, s.sinr_threshold, s, 1e-4) == 1000.0);
    CHECK(default_region_radius(0, 150.0, s.sinr_threshold, s, 1e-4) > 1500.0);
    CHECK(default_region_radius(0, 150.0, s.sinr_threshold, s, 1e-2) <
          default_region_radius(0, 150.0, s.sinr_threshold, s, 1e-4));
  }

  TEST_CASE("forced perfect sessions") {
    const auto s = reference_scenario();
    SessionOptions o;
    o.forced_uplink_success = 1.0;
    o.forced_ack = 1.0;
    const auto e = simulate_session(0, 50.0, s, sim(1000), o);
    CHECK(e.session_success.mean == 1.0);
    CHECK(e.transmissions_all.mean == 1.0);
    CHECK(e.transmissions_all.std_error == 0.0);
    CHECK(e.delay_success.mean == s.classes[0].packet_time);
    CHECK(e.energy_per_report.mean == doctest::Approx(energy_for_transmissions(1.0, 0, s)).epsilon(1e-12));
  }

  TEST_CASE("energy ledger with one attempt matches the worked example") {
    auto s = reference_scenario();
    s.energy.circuit_power = 0.1;
    s.energy.active_time = 2.0;
    s.energy.inv_pa_efficiency = 0.7;
    s.energy.rx_power = 0.1;
    s.energy.ack_time = 1.0;
    SessionOptions o;
    o.forced_uplink_success = 1.0;
    o.forced_ack = 1.0;
    CHECK(simulate_session(0, 10.0, s, sim(100), o).energy_per_report.mean == doctest::Approx(0.47).epsilon(1e-14));
  }

  TEST_CASE("forced q = 0.5 matches the normalized closed form") {
    const auto s = reference_scenario();
    SessionOptions o;
    o.forced_uplink_success = 0.5;
    o.forced_ack = 1.0;
    const auto e = simulate_session(0, 50.0, s, sim(50000), o);
    const double expected = mean_transmissions(0.5, 7, TruncationMode::normalized_conditional);
    CHECK(std::abs(e.transmissions_success.mean - expected) < 3.5 * e.transmissions_success.std_error);
    const double all = mean_transmissions(0.5, 7, TruncationMode::with_failure_tail);
    CHECK(std::abs(e.transmissions_all.mean - all) < 3.5 * e.transmissions_all.std_error);
    const double delay = expected_delay(0.5, 7, 1.0, 1.0, TruncationMode::normalized_conditional);
    CHECK(std::abs(e.delay_success.mean - delay) < 3.5 * e.delay_success.std_error);
    CHECK(e.transmissions_success.mean >= 1.0);
    CHECK(e.transmissions_success.mean <= 7.0);
  }

  TEST_CASE("simulated sessions agree with the normalized delay model") {
    auto s = reference_scenario();
    s.retransmission.truncation_mode = TruncationMode::normalized_conditional;
    auto cfg = sim(20000);
    cfg.overlap = OverlapSampling::expected;
    for (double d : {25.0, 45.0}) {
      const auto e = simulate_session(0, d, s, cfg);
      CHECK(std::abs(e.delay_success.mean - expected_delay(0, d, s)) < 4.0 * e.delay_success.std_error);
      CHECK(std::abs(e.transmissions_success.mean - mean_transmissions(0, d, s)) <
            4.0 * e.transmissions_success.std_error);
      CHECK(e.battery_lifetime.mean > 0.0);
      CHECK(e.battery_lifetime.std_error > 0.0);
    }
  }

  TEST_CASE("frozen topology sessions run and stay in range") {
    const auto s = reference_scenario();
    auto cfg = sim(5000);
    cfg.frozen_topology = true;
    const auto e = simulate_session(0, 40.0, s, cfg);
    CHECK(e.session_success.mean >= 0.0);
    CHECK(e.session_success.mean <= 1.0);
    CHECK(e.transmissions_all.mean >= 1.0);
    CHECK(e.transmissions_all.mean <= 7.0);
    cfg.frozen_topology = false;
    // a frozen layout makes retries less useful
    CHECK(e.session_success.mean < simulate_session(0, 40.0, s, cfg).session_success.mean);
  }

  TEST_CASE("one-AP MRC is the single-AP snapshot") {
    const auto s = reference_scenario();
    const auto cfg = sim(15000);
    for (double d : {20.0, 45.0}) {
      const auto m = snapshot_mrc_success(aps({d}, {1.0}), 0, s.sinr_threshold, s, cfg);
      const auto e = snapshot_success(0, d, s.sinr_threshold, s, sim(15000, 7));
      CHECK(std::abs(m.mean - e.mean) < 4.0 * std::hypot(m.std_error, e.std_error));
    }
  }

  TEST_CASE("unavailable APs are the single-AP estimate exactly") {
    const auto s = reference_scenario();
    const auto cfg = sim(5000);
    for (auto coupling : {InterferenceCoupling::shared, InterferenceCoupling::independent}) {
      const auto one = snapshot_mrc_success(aps({30.0}, {1.0}), 0, 2.0, s, cfg, coupling);
      const auto three = snapshot_mrc_success(aps({30.0, 45.0, 56.0}, {1.0, 0.0, 0.0}), 0, 2.0, s, cfg, coupling);
      CHECK(one.mean == three.mean);
    }
  }

  TEST_CASE("three equal APs without interference: Erlang tail and nested quadrature") {
    const auto s = quiet();
    const double d = 2500.0;
    const double mean = 0.1 * std::pow(d, -4.0) / noise_power(0, s);
    const double g = 2.0 * mean;
    const double o = oracle::exp_sum_ccdf3(mean, mean, mean, g);
    CHECK(o == doctest::Approx(oracle::erlang_ccdf(3, 2.0)).epsilon(1e-8));
    const auto e = snapshot_mrc_success(aps({d, d, d}, {1.0, 1.0, 1.0}), 0, g, s, sim(40000));
    CHECK(std::abs(e.mean - o) < 4.0 * e.std_error);
  }

  TEST_CASE("MRC availability scales participation") {
    const auto s = quiet();
    const double d = 2500.0;
    const double mean = 0.1 * std::pow(d, -4.0) / noise_power(0, s);
    // one AP listening half of the time: P = 0.5 exp(-g / mean)
    const auto e = snapshot_mrc_success(aps({d}, {0.5}), 0, mean, s, sim(40000));
    CHECK(std::abs(e.mean - 0.5 * std::exp(-1.0)) < 4.0 * e.std_error);
  }

  TEST_CASE("correlated interference reduces the combining gain") {
    const auto s = reference_scenario();
    const auto jr = aps({25.0, 37.5, 47.0}, {1.0, 1.0, 1.0});
    auto cfg = sim(4000);
    cfg.tail_tolerance = 1e-2;
    const auto shared = snapshot_mrc_success(jr, 0, s.sinr_threshold, s, cfg, InterferenceCoupling::shared);
    const auto indep = snapshot_mrc_success(jr, 0, s.sinr_threshold, s, cfg, InterferenceCoupling::independent);
    CHECK(shared.mean >= 0.0);
    CHECK(indep.mean <= 1.0);
    const double single = snapshot_success(0, 25.0, s.sinr_threshold, s, cfg).mean;
    CHECK(indep.mean > single);
  }

  TEST_CASE("invalid inputs") {
    auto s = reference_scenario();
    CHECK_THROWS_AS(snapshot_success(0, 10.0, 2.0, s, sim(0)), InputError);
    CHECK_THROWS_AS(snapshot_success(0, -1.0, 2.0, s, sim(10)), InputError);
    s.channel.fading = {Fading::Kind::general, 0.8};
    CHECK_THROWS_AS(snapshot_success(0, 10.0, 2.0, s, sim(10)), InputError);
  }
}
