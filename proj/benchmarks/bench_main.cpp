#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "ppgate/coupler_design.hpp"
#include "ppgate/gate_analysis.hpp"
#include "ppgate/tomography.hpp"

using namespace ppgate;

namespace {

const TransferMatrix& measured() {
  static const TransferMatrix dev = calibrated_device(measured_device_description());
  return dev;
}

void BM_EvolveMixture(benchmark::State& state) {
  const auto in = logical_input_state(1, 0);
  const DistinguishabilityModel d(0.03);
  for (auto _ : state) benchmark::DoNotOptimize(evolve_mixture(measured(), in, d));
}
BENCHMARK(BM_EvolveMixture);

void BM_TruthTable(benchmark::State& state) {
  const DistinguishabilityModel d(0.03);
  for (auto _ : state) benchmark::DoNotOptimize(truth_table(measured(), d));
}
BENCHMARK(BM_TruthTable);

void BM_ProcessTomographyExact(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(process_tomography(measured(), {}, 0, 0));
}
BENCHMARK(BM_ProcessTomographyExact)->Unit(benchmark::kMillisecond);

void BM_ProcessTomographySampled(benchmark::State& state) {
  std::uint64_t seed = 1;
  for (auto _ : state) benchmark::DoNotOptimize(process_tomography(measured(), {}, state.range(0), seed++));
}
BENCHMARK(BM_ProcessTomographySampled)->Arg(1000)->Arg(1000000)->Unit(benchmark::kMillisecond);

void BM_FitModel(benchmark::State& state) {
  SinusoidalCouplerModel truth;
  truth.v = {1.0, 2.0, 0.3};
  truth.h = {0.8, 1.95, 0.4};
  std::vector<CalibrationPoint> pts;
  for (int i = 0; i <= 40; ++i) {
    const double l = 0.2 * i;
    const auto t = predict(truth, l);
    pts.push_back({l, t.t_h, t.t_v, 0.01});
  }
  for (auto _ : state) benchmark::DoNotOptimize(fit_model(pts));
}
BENCHMARK(BM_FitModel)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
