#include <grasp/baselines.hpp>
#include <grasp/filter.hpp>
#include <grasp/matching.hpp>
#include <grasp/pipeline.hpp>
#include <grasp/segment_scatter.hpp>
#include <grasp/synth.hpp>

#include <benchmark/benchmark.h>

#include <random>

using namespace grasp;

namespace {

std::vector<Trial> movement(std::size_t per_class) {
  SynthConfig c;
  c.n_trials_per_class = per_class;
  std::vector<Trial> out;
  for (auto& t : generate_dataset(c)) {
    if (t.paradigm == Paradigm::ActualMovement) out.push_back(std::move(t));
  }
  return out;
}

}  // namespace

static void BM_Filtfilt(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  std::vector<double> x(n);
  for (auto& v : x) v = g(rng);
  const auto f = design_bandpass(8.0, 12.0, 4, 250.0);
  for (auto _ : state) benchmark::DoNotOptimize(filtfilt(f, x));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n));
}
BENCHMARK(BM_Filtfilt)->Arg(1000)->Arg(10000);

static void BM_SegmentScatters(benchmark::State& state) {
  const auto trial = movement(1).front();
  const auto bank = default_filter_bank();
  for (auto _ : state) benchmark::DoNotOptimize(eeg_segment_scatters(trial.eeg, bank, WindowSpec{}));
}
BENCHMARK(BM_SegmentScatters)->Unit(benchmark::kMillisecond);

static void BM_TrainPipeline(benchmark::State& state) {
  const auto trials = movement(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(train_pipeline(trials, PipelineConfig{}));
}
BENCHMARK(BM_TrainPipeline)->Arg(10)->Arg(40)->Unit(benchmark::kSecond);

static void BM_ClassifyTrial(benchmark::State& state) {
  const auto trials = movement(10);
  const auto model = train_pipeline(trials, PipelineConfig{});
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(classify_trial(model, trials[i++ % trials.size()]));
}
BENCHMARK(BM_ClassifyTrial)->Unit(benchmark::kMillisecond);

static void BM_TrainBaseline(benchmark::State& state) {
  const auto trials = movement(20);
  const auto kind = state.range(0) == 1 ? BaselineKind::ModelI : BaselineKind::ModelII;
  for (auto _ : state) benchmark::DoNotOptimize(train_baseline(kind, trials));
}
BENCHMARK(BM_TrainBaseline)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
