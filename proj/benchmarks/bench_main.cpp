#include <benchmark/benchmark.h>

#include "amle/asymptotics.hpp"
#include "amle/estimator.hpp"
#include "amle/experiment.hpp"
#include "amle/heston.hpp"
#include "amle/likelihood.hpp"
#include "amle/numerics.hpp"
#include "amle/simulator.hpp"

using namespace amle;

namespace {

const HestonParams kParams;

Path heston_path(unsigned l) {
  return euler_simulate(heston_model(kParams), kParams.theta(), kParams.initial_state(),
                        TimeGrid(kParams.T, std::size_t{1} << l), NoiseSource(1, 0));
}

void BM_EulerHeston(benchmark::State& state) {
  const ModelSpec m = heston_model(kParams);
  const std::size_t n = std::size_t{1} << state.range(0);
  std::uint64_t stream = 0;
  for (auto _ : state) {
    Path p = euler_simulate(m, kParams.theta(), kParams.initial_state(), TimeGrid(1.0, n),
                            NoiseSource(1, stream++));
    benchmark::DoNotOptimize(p);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_EulerHeston)->Arg(8)->Arg(12)->Arg(16);

void BM_AmleGeneric(benchmark::State& state) {
  const ModelSpec m = heston_model(kParams);
  const Path p = heston_path(static_cast<unsigned>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(amle_linear(m, p));
}
BENCHMARK(BM_AmleGeneric)->Arg(8)->Arg(12);

void BM_AmleClosedForm(benchmark::State& state) {
  const Path p = heston_path(static_cast<unsigned>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(heston_amle(p));
}
BENCHMARK(BM_AmleClosedForm)->Arg(8)->Arg(12);

void BM_SigmaGeneric(benchmark::State& state) {
  const ModelSpec m = heston_model(kParams);
  const Path p = heston_path(static_cast<unsigned>(state.range(0)));
  const Vector th = kParams.theta();
  for (auto _ : state) benchmark::DoNotOptimize(sigma_n(m, p, th));
}
BENCHMARK(BM_SigmaGeneric)->Arg(8)->Arg(12);

void BM_SigmaClosedForm(benchmark::State& state) {
  const Path p = heston_path(static_cast<unsigned>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(heston_sigma_n(p, kParams));
}
BENCHMARK(BM_SigmaClosedForm)->Arg(8)->Arg(12);

void BM_LikelihoodEvaluate(benchmark::State& state) {
  const ModelSpec m = heston_model(kParams);
  const Path p = heston_path(static_cast<unsigned>(state.range(0)));
  const LikelihoodContext ctx(m, p);
  const Vector th = kParams.theta();
  for (auto _ : state) benchmark::DoNotOptimize(ctx.evaluate(th));
}
BENCHMARK(BM_LikelihoodEvaluate)->Arg(8)->Arg(12);

void BM_PinvSqrt4(benchmark::State& state) {
  const Path p = heston_path(10);
  const Matrix s = heston_sigma_n(p, kParams);
  for (auto _ : state) benchmark::DoNotOptimize(pinv_sqrt(s));
}
BENCHMARK(BM_PinvSqrt4);

void BM_Chi2Quantile(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(chi2_quantile(0.025, 2));
}
BENCHMARK(BM_Chi2Quantile);

void BM_Replicate(benchmark::State& state) {
  ExperimentConfig c;
  c.l = 12;
  c.k_list = {3, 4, 5, 6, 7, 8};
  c.M = 1;
  c.fixed_df = 2;
  const ModelSetup setup = make_setup(c);
  std::size_t m = 0;
  for (auto _ : state) benchmark::DoNotOptimize(run_replicate(setup, c, m++));
}
BENCHMARK(BM_Replicate)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
