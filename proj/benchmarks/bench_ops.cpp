#include <benchmark/benchmark.h>

#include <random>

#include "catgan/graph.hpp"
#include "catgan/ops.hpp"

using namespace catgan;

namespace {

template <typename T>
Tensor<T> filled(Shape shape, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Tensor<T> t(std::move(shape));
  for (auto& v : t.values()) v = static_cast<T>(u(rng));
  return t;
}

template <typename T>
void BM_Matmul(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = filled<T>({n, n}, 1), b = filled<T>({n, n}, 2);
  for (auto _ : state) {
    Graph<T> g;
    benchmark::DoNotOptimize(g.value(ops::matmul(g, g.constant(a), g.constant(b))).values().data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(2 * n * n * n));
}
BENCHMARK(BM_Matmul<float>)->Arg(64)->Arg(256);
BENCHMARK(BM_Matmul<double>)->Arg(64)->Arg(256);

// First discriminator layer at batch 64: 28x28x3 -> 14x14x64, 5x5 stride 2, with backward.
template <typename T>
void BM_Conv2d(benchmark::State& state) {
  Parameter<T> x{"x", filled<T>({64, 28, 28, 3}, 3), Tensor<T>({64, 28, 28, 3})};
  Parameter<T> f{"f", filled<T>({5, 5, 3, 64}, 4), Tensor<T>({5, 5, 3, 64})};
  for (auto _ : state) {
    Graph<T> g;
    const Var y = ops::conv2d(g, g.parameter(x), g.parameter(f), ops::ConvOptions{2, 2, Padding::same});
    g.backward(ops::sum(g, y));
    benchmark::DoNotOptimize(f.grad.values().data());
  }
}
BENCHMARK(BM_Conv2d<float>)->Unit(benchmark::kMillisecond);

// Second generator layer at batch 64: 2x2x512 -> 6x6x256, 4x4 stride 2, with backward.
template <typename T>
void BM_Conv2dTranspose(benchmark::State& state) {
  Parameter<T> x{"x", filled<T>({64, 2, 2, 512}, 5), Tensor<T>({64, 2, 2, 512})};
  Parameter<T> f{"f", filled<T>({4, 4, 256, 512}, 6), Tensor<T>({4, 4, 256, 512})};
  for (auto _ : state) {
    Graph<T> g;
    const Var y = ops::conv2d_transpose(g, g.parameter(x), g.parameter(f), ops::ConvOptions{2, 2, Padding::valid});
    g.backward(ops::sum(g, y));
    benchmark::DoNotOptimize(f.grad.values().data());
  }
}
BENCHMARK(BM_Conv2dTranspose<float>)->Unit(benchmark::kMillisecond);

}  // namespace
