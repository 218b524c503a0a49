// Microbenchmarks for the hot paths: FFT, preprocessing, and the network
// forward/backward passes.

#include <benchmark/benchmark.h>

#include <cmath>

#include "pnnkit/pnn.hpp"
#include "pnnkit/rng.hpp"
#include "pnnkit/spectral.hpp"
#include "pnnkit/training.hpp"
#include "pnnkit/vdnn.hpp"

namespace {

using namespace pnnkit;

RawSignal random_signal(std::size_t length, std::uint64_t seed) {
  Rng rng(seed);
  RawSignal s;
  s.sample_rate_hz = 20000.0;
  s.samples.resize(length);
  for (double& v : s.samples) v = rng.normal();
  return s;
}

Matrix random_batch(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  Rng rng(seed);
  Matrix m(rows, cols);
  for (double& v : m.data) v = std::abs(rng.normal());
  return m;
}

std::vector<int> cyclic_labels(std::size_t rows, int classes) {
  std::vector<int> y(rows);
  for (std::size_t i = 0; i < rows; ++i) y[i] = static_cast<int>(i) % classes;
  return y;
}

void BM_FFT(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<std::complex<double>> base(n);
  Rng rng(1);
  for (auto& v : base) v = {rng.normal(), 0.0};
  for (auto _ : state) {
    auto a = base;
    fft_radix2(a);
    benchmark::DoNotOptimize(a.data());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_FFT)->Range(1 << 10, 1 << 16)->Complexity(benchmark::oNLogN);

void BM_Preprocess(benchmark::State& state) {
  const RawSignal s = random_signal(static_cast<std::size_t>(state.range(0)), 2);
  for (auto _ : state) {
    const Spectrum sp = preprocess(s, 2048);
    benchmark::DoNotOptimize(sp.bins.data());
  }
}
BENCHMARK(BM_Preprocess)->Arg(8192)->Arg(16384)->Arg(100000);

void BM_PNNForward(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  PNNModel model = pnn_init({k, 32, 6, 7}, 3);
  const Matrix x = random_batch(8, static_cast<std::size_t>(k), 4);
  for (auto _ : state) {
    const Matrix probs = pnn_forward(model, x, Mode::kInfer);
    benchmark::DoNotOptimize(probs.data.data());
  }
}
BENCHMARK(BM_PNNForward)->Arg(2048)->Arg(16384);

void BM_PNNTrainStep(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  PNNModel model = pnn_init({k, 32, 6, 7}, 5);
  const Matrix x = random_batch(8, static_cast<std::size_t>(k), 6);
  const std::vector<int> y = cyclic_labels(8, 7);
  for (auto _ : state) {
    ForwardCache cache;
    pnn_forward(model, x, Mode::kTrain, &cache, false);
    Gradients grads = pnn_backward(model, cache, y);
    benchmark::DoNotOptimize(grads.d_classifier_weights.data.data());
  }
}
BENCHMARK(BM_PNNTrainStep)->Arg(2048)->Arg(16384);

void BM_VDNNTrainStep(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  VDNNModel model = vdnn_init({k, 6, 7}, 7);
  const Matrix x = random_batch(8, static_cast<std::size_t>(k), 8);
  const std::vector<int> y = cyclic_labels(8, 7);
  for (auto _ : state) {
    ForwardCache cache;
    vdnn_forward(model, x, Mode::kTrain, &cache, false);
    Gradients grads = vdnn_backward(model, cache, y);
    benchmark::DoNotOptimize(grads.d_classifier_weights.data.data());
  }
}
BENCHMARK(BM_VDNNTrainStep)->Arg(2048);

}  // namespace

BENCHMARK_MAIN();
