#include <benchmark/benchmark.h>

#include "tca/contextual.hpp"
#include "tca/dataset.hpp"
#include "tca/layers.hpp"
#include "tca/matrix.hpp"
#include "tca/model.hpp"
#include "tca/train.hpp"

namespace {

void BM_Matmul(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  tca::Rng rng(0);
  tca::Matrix a = tca::rng_fill(rng, n, n, tca::Dist::uniform(-1, 1));
  tca::Matrix b = tca::rng_fill(rng, n, n, tca::Dist::uniform(-1, 1));
  for (auto _ : state) {
    benchmark::DoNotOptimize(tca::matmul(a, b));
  }
  state.SetItemsProcessed(state.iterations() * 2LL * n * n * n);
}
BENCHMARK(BM_Matmul)->Arg(32)->Arg(64)->Arg(160)->Arg(256);

void BM_TclForward(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int g = 12;
  tca::Rng rng(1);
  tca::Matrix h = tca::rng_fill(rng, n, g, tca::Dist::uniform(-1, 1));
  tca::TclParams p = tca::TclParams::init(n, n, g, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(tca::tcl_forward(h, p));
  }
}
BENCHMARK(BM_TclForward)->Arg(10)->Arg(64)->Arg(160);

void BM_TclForwardBackward(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const int g = 12;
  tca::Rng rng(2);
  tca::Matrix h = tca::rng_fill(rng, n, g, tca::Dist::uniform(-1, 1));
  tca::TclParams p = tca::TclParams::init(n, n, g, rng);
  tca::Matrix dc = tca::rng_fill(rng, n, g, tca::Dist::uniform(-1, 1));
  for (auto _ : state) {
    tca::TclCache cache;
    tca::tcl_forward(h, p, &cache);
    tca::TclGrads grads;
    benchmark::DoNotOptimize(tca::tcl_backward(dc, p, cache, &grads));
  }
}
BENCHMARK(BM_TclForwardBackward)->Arg(10)->Arg(64)->Arg(160);

void BM_DenseForward(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  tca::Rng rng(3);
  tca::Matrix x = tca::rng_fill(rng, n, 32, tca::Dist::uniform(-1, 1));
  tca::DenseParams p = tca::DenseParams::init(32, 16, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(tca::dense_forward(x, p, tca::Activation::Tanh));
  }
}
BENCHMARK(BM_DenseForward)->Arg(10)->Arg(160);

void BM_KeyframeTrainEpoch(benchmark::State& state) {
  tca::SequenceDataset data = tca::gen_keyframe(0, 64);
  tca::ModelConfig cfg;
  cfg.kind = tca::ModelKind::Autoencoder;
  cfg.n = 10;
  cfg.m = 1;
  cfg.f = 32;
  cfg.g = 16;
  tca::TrainConfig tcfg;
  tcfg.batch_size = 16;
  tcfg.max_epochs = 1;
  tcfg.sparsity_lambda = 0.01;
  for (auto _ : state) {
    tca::Rng rng(0);
    tca::Model model = tca::Model::init(cfg, rng);
    benchmark::DoNotOptimize(tca::train(std::move(model), data, tcfg));
  }
}
BENCHMARK(BM_KeyframeTrainEpoch);

}  // namespace

BENCHMARK_MAIN();
