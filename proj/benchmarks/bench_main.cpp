#include <benchmark/benchmark.h>

#include <cmath>

#include "macrobell/experiment.hpp"
#include "macrobell/fock_oracle.hpp"
#include "macrobell/protocols.hpp"

using namespace macrobell;

namespace {

const ProtocolParams kParams{100.0, 0.0028, M_PI, 0.0};
const ChannelParams kChannel{0.15, 200.0};

void BM_PipelineUsd2(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(usd2_probability_pipeline(kParams, kChannel));
}
BENCHMARK(BM_PipelineUsd2);

void BM_PipelineUsd4(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(usd4_probability_pipeline(kParams, kChannel));
}
BENCHMARK(BM_PipelineUsd4);

void BM_ClosedForm(benchmark::State& state) {
  const auto att = attenuate(kParams.alpha, kChannel);
  for (auto _ : state)
    benchmark::DoNotOptimize(usd2_probability_closed(att.photons_received, att.photons_lost, kParams.phi, M_PI));
}
BENCHMARK(BM_ClosedForm);

void BM_BuildAnalysisStateCompositional(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(build_analysis_state_compositional(kParams, kChannel));
}
BENCHMARK(BM_BuildAnalysisStateCompositional);

void BM_Oracle(benchmark::State& state) {
  const double ap = static_cast<double>(state.range(0)) / 2.0;
  const double a2 = ap * ap + 1.0;
  const ProtocolParams p{std::sqrt(a2), 0.2, M_PI, 0.0};
  const auto ch = ChannelParams::from_transmittance(ap * ap / a2);
  const auto which = state.range(1) == 4 ? Protocol::usd4 : Protocol::usd2;
  for (auto _ : state) benchmark::DoNotOptimize(fock::oracle_protocol_prob(p, ch, which));
}
BENCHMARK(BM_Oracle)->Args({2, 2})->Args({6, 2})->Args({2, 4})->Args({6, 4})->Unit(benchmark::kMillisecond);

void BM_MonteCarlo(benchmark::State& state) {
  MonteCarloConfig cfg;
  cfg.duration_s = static_cast<double>(state.range(0));
  cfg.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(monte_carlo_run(kParams, kChannel, {}, cfg, Protocol::usd2));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MonteCarlo)->Arg(100)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_MaxRange(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(max_range(kParams, 0.15, 5.3, 1e9, Protocol::usd2));
}
BENCHMARK(BM_MaxRange)->Unit(benchmark::kMicrosecond);

void BM_OptimizePhi(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(optimize_phi(100.0, kChannel, Protocol::usd4));
}
BENCHMARK(BM_OptimizePhi);

}  // namespace
BENCHMARK_MAIN();
