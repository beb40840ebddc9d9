#include <benchmark/benchmark.h>

#include "coexist/analytic.hpp"
#include "coexist/joint_reception.hpp"
#include "coexist/monte_carlo.hpp"
#include "coexist/profiles.hpp"

using namespace coexist;

namespace {

void BM_ClosedFormPointCarrier(benchmark::State& state) {
  const auto s = reference_scenario();
  const SuccessQuery q{0, 50.0, s.sinr_threshold, 868.1e6};
  for (auto _ : state) benchmark::DoNotOptimize(success_probability_rayleigh(q, s));
}
BENCHMARK(BM_ClosedFormPointCarrier);

void BM_ClosedFormCarrierAverage(benchmark::State& state) {
  auto s = reference_scenario();
  s.classes[0].carrier = CarrierDistribution::uniform(867.9e6, 868.3e6);
  const SuccessQuery q{0, 50.0, s.sinr_threshold, std::nullopt};
  for (auto _ : state) benchmark::DoNotOptimize(success_probability_avg(q, s));
}
BENCHMARK(BM_ClosedFormCarrierAverage);

void BM_Kpis(benchmark::State& state) {
  const auto s = reference_scenario();
  for (auto _ : state) benchmark::DoNotOptimize(analytic_kpis(0, 50.0, s));
}
BENCHMARK(BM_Kpis);

void BM_MrcConvolution(benchmark::State& state) {
  const auto s = reference_scenario();
  JointReceptionConfig jr;
  jr.ap_distances.assign(static_cast<std::size_t>(state.range(0)), 50.0);
  for (std::size_t m = 0; m < jr.ap_distances.size(); ++m) jr.ap_distances[m] *= 1.0 + 0.25 * m;
  jr.availabilities.assign(jr.ap_distances.size(), 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(mrc_success_probability(jr, 0, s.sinr_threshold, s));
}
BENCHMARK(BM_MrcConvolution)->Arg(2)->Arg(3)->Arg(5)->Unit(benchmark::kMillisecond);

void BM_Snapshots(benchmark::State& state) {
  const auto s = reference_scenario();
  SimConfig cfg;
  cfg.trials = 2000;
  cfg.threads = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(snapshot_success(0, static_cast<double>(state.range(0)), s.sinr_threshold, s, cfg));
  }
  state.SetItemsProcessed(static_cast<int64_t>(state.iterations() * cfg.trials));
}
BENCHMARK(BM_Snapshots)->Arg(20)->Arg(60)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
