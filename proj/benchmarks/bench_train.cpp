#include <benchmark/benchmark.h>

#include "catgan/data.hpp"
#include "catgan/train.hpp"

using namespace catgan;

namespace {

ImageSet blank_set(const ModelConfig& config, std::size_t n) {
  ImageSet s{config.image_size, config.image_size, config.channels, {}, {}};
  s.pixels.assign(n * s.sample_bytes(), 128);
  for (std::size_t i = 0; i < n; ++i) {
    if (config.head.kind == HeadKind::softmax) s.labels.classes.push_back(i % config.head.classes);
  }
  return s;
}

// Whole training iterations, averaged over one discriminator and update_rate generator steps.
void BM_TrainIterations(benchmark::State& state, TrainConfig config) {
  const TrainData data{blank_set(config.model, 256), blank_set(config.model, 256)};
  config.iterations = static_cast<std::uint64_t>(config.update_rate + 1);
  config.checkpoint_every = 1000000;
  config.eval_every = 1000000;
  for (auto _ : state) benchmark::DoNotOptimize(train<float>(config, data).d_updates);
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(config.iterations));
}

TrainConfig vanilla_config() {
  auto c = TrainConfig::vanilla();
  c.update_rate = 1;
  return c;
}

BENCHMARK_CAPTURE(BM_TrainIterations, categorical_softmax, TrainConfig::categorical(HeadVariant::softmax_k1(10)))
    ->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_TrainIterations, vanilla, vanilla_config())->Unit(benchmark::kMillisecond);

}  // namespace
