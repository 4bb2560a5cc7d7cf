// Serial references against the OpenMP kernels on cycle and torus models.
#include <benchmark/benchmark.h>

#include <numeric>

#include "sofent/construction.hpp"
#include "sofent/kernels.hpp"
#include "sofent/modelmetric.hpp"
#include "sofent/processes.hpp"

using namespace sofent;

namespace {

std::vector<Permutation> window_perms(std::size_t n) {
  auto sigma = build_cycle_sofic(n, 64);
  auto F = integer_words(std::vector<std::int64_t>{-2, -1, 0, 1, 2});
  return sigma.permutations(F);
}

template <bool Parallel>
void BM_InjectiveMask(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  auto perms = window_perms(n);
  for (auto _ : state) {
    auto mask = Parallel ? kernels::injective_mask(perms, n) : kernels::serial::injective_mask(perms, n);
    benchmark::DoNotOptimize(mask);
  }
}

template <bool Parallel>
void BM_PushObservable(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  auto sigma = build_cycle_sofic(n, 8);
  auto F = integer_words(std::vector<std::int64_t>{0, 1, 2});
  auto perms = sigma.permutations(F);
  auto phi = LocalObservable::parity(F);
  Config config(n);
  for (std::size_t v = 0; v < n; ++v) config[v] = static_cast<Symbol>((v * 7 + v / 3) % 2);
  for (auto _ : state) {
    auto out = Parallel ? kernels::push_observable(perms, phi, config)
                        : kernels::serial::push_observable(perms, phi, config);
    benchmark::DoNotOptimize(out);
  }
}

template <bool Parallel>
void BM_CosetCollision(benchmark::State& state) {
  const std::size_t side = static_cast<std::size_t>(state.range(0));
  std::vector<std::size_t> dims{side, side};
  auto sigma = build_torus_sofic(dims, 64);
  GroupPresentation z2(GroupKind::FreeAbelian, 2);
  auto g = sigma.permutation(z2.identity());
  auto gp = sigma.permutation(z2.generator(1));
  auto h = sigma.permutation(z2.generator(0));
  for (auto _ : state) {
    auto mask = Parallel ? kernels::coset_collision_mask(g, gp, h, -16, 16)
                         : kernels::serial::coset_collision_mask(g, gp, h, -16, 16);
    benchmark::DoNotOptimize(mask);
  }
}

template <bool Parallel>
void BM_BallSizes(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  auto sigma = build_cycle_sofic(n, 64);
  auto metric = build_metric(sigma, 9);
  std::vector<Vertex> vertices(n);
  std::iota(vertices.begin(), vertices.end(), Vertex{0});
  for (auto _ : state) {
    auto sizes = Parallel ? kernels::ball_sizes(metric, vertices, 8)
                          : kernels::serial::ball_sizes(metric, vertices, 8);
    benchmark::DoNotOptimize(sizes);
  }
}

template <bool Parallel>
void BM_BlockEntropy(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  auto sigma = build_cycle_sofic(n, 8);
  auto cycles = extract_cycles(sigma, GroupPresentation::integers().generator(0));
  auto partition = partition_paths(cycles, 64);
  auto mu = build_model_measure(MarkovProcess::symmetric_flip(0.25), partition);
  for (auto _ : state) {
    double h = Parallel ? kernels::block_entropy(mu) : kernels::serial::block_entropy(mu);
    benchmark::DoNotOptimize(h);
  }
}

}  // namespace

BENCHMARK(BM_InjectiveMask<false>)->Arg(1 << 12)->Arg(1 << 16);
BENCHMARK(BM_InjectiveMask<true>)->Arg(1 << 12)->Arg(1 << 16);
BENCHMARK(BM_PushObservable<false>)->Arg(1 << 16);
BENCHMARK(BM_PushObservable<true>)->Arg(1 << 16);
BENCHMARK(BM_CosetCollision<false>)->Arg(64)->Arg(256);
BENCHMARK(BM_CosetCollision<true>)->Arg(64)->Arg(256);
BENCHMARK(BM_BallSizes<false>)->Arg(1 << 12);
BENCHMARK(BM_BallSizes<true>)->Arg(1 << 12);
BENCHMARK(BM_BlockEntropy<false>)->Arg(1 << 16);
BENCHMARK(BM_BlockEntropy<true>)->Arg(1 << 16);

BENCHMARK_MAIN();
