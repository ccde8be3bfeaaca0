#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>
#include <random>

#include "genreforge/audio_io.hpp"
#include "genreforge/dsp.hpp"
#include "genreforge/features.hpp"
#include "genreforge/models.hpp"

using namespace genreforge;

namespace {

std::vector<double> noise_signal(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  std::vector<double> x(n);
  for (double& v : x) v = u(gen);
  return x;
}

void BM_fft(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto re = noise_signal(n, 1);
  std::vector<dsp::Complex> x(re.begin(), re.end());
  for (auto _ : state) {
    auto y = x;
    dsp::fft_inplace(y);
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_fft)->Arg(1024)->Arg(2048)->Arg(8192);

void BM_stft_30s(benchmark::State& state) {
  const auto x = noise_signal(22050 * 30, 2);
  const dsp::StftConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(dsp::stft(x, 22050.0, cfg));
}
BENCHMARK(BM_stft_30s)->Unit(benchmark::kMillisecond);

void BM_extract_track(benchmark::State& state) {
  const double seconds = static_cast<double>(state.range(0));
  auto x = noise_signal(static_cast<std::size_t>(22050 * seconds), 3);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] += 0.3 * std::sin(2.0 * std::numbers::pi * 220.0 * i / 22050.0);
  const audio::AudioClip clip(x, 22050, "bench.wav");
  for (auto _ : state) benchmark::DoNotOptimize(features::extract_track_features(clip));
}
BENCHMARK(BM_extract_track)->Arg(3)->Arg(30)->Unit(benchmark::kMillisecond);

void BM_svm_predict(benchmark::State& state) {
  std::mt19937_64 gen(4);
  std::normal_distribution<double> g;
  models::TrainingSet set{Matrix(400, 57), std::vector<int>(400)};
  for (std::size_t i = 0; i < 400; ++i) {
    set.labels[i] = static_cast<int>(i % 10);
    for (std::size_t j = 0; j < 57; ++j) set.x(i, j) = g(gen) + (j % 10 == i % 10 ? 1.5 : 0.0);
  }
  const auto model = models::train(models::ClassifierSpec(models::ModelKind::svm_rbf), set);
  std::size_t row = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(model.predict(set.x.row(row)));
    row = (row + 1) % 400;
  }
}
BENCHMARK(BM_svm_predict);

}  // namespace
BENCHMARK_MAIN();
