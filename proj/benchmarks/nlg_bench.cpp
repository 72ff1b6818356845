#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>
#include <random>

#include "nlg/angle.hpp"
#include "nlg/gowers.hpp"
#include "nlg/hypnorm.hpp"
#include "nlg/ugsdp.hpp"

namespace {

using namespace nlg;

void BM_SemiTrivialValue(benchmark::State& state) {
  const int t = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(semi_trivial_value(t, 3));
}
BENCHMARK(BM_SemiTrivialValue)->DenseRange(3, 9, 2)->Unit(benchmark::kMillisecond);

void BM_ClassicalSearch(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const ModMGame game = boyer_to_game({3, d, 2});
  for (auto _ : state) benchmark::DoNotOptimize(classical_value(game, {0, 1}));
  state.counters["strategies"] = static_cast<double>(classical_search_size(game));
}
BENCHMARK(BM_ClassicalSearch)->DenseRange(4, 8, 2)->Unit(benchmark::kMillisecond);

void BM_HypergraphNorm(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const int t = static_cast<int>(state.range(0));
  const GameTensor tensor = random_tensor(rng, std::vector<int>(t, 2));
  const Hypergraph h = build_Ht(t);
  NormOptions o;
  o.workers = 1;
  for (auto _ : state) benchmark::DoNotOptimize(hypergraph_norm(tensor, h, o));
}
BENCHMARK(BM_HypergraphNorm)->DenseRange(2, 3)->Unit(benchmark::kMillisecond);

void BM_GowersNorm(benchmark::State& state) {
  const int s = static_cast<int>(state.range(0));
  GroupFunction f{FiniteAbelianGroup::vector_space(5, 2), {}};
  for (int x = 0; x < 25; ++x) f.values.push_back(std::polar(1.0, 2.0 * std::numbers::pi * (x * x % 5) / 5.0));
  for (auto _ : state) benchmark::DoNotOptimize(gowers_norm(f, s));
}
BENCHMARK(BM_GowersNorm)->DenseRange(1, 3)->Unit(benchmark::kMillisecond);

void BM_SdpSolve(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const UniqueGame game = planted_instance(k, 3, 0.01, 7).game;
  for (auto _ : state) benchmark::DoNotOptimize(solve_sdp(game));
}
BENCHMARK(BM_SdpSolve)->Arg(2)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_Rounding(benchmark::State& state) {
  const PlantedInstance inst = planted_instance(static_cast<int>(state.range(0)), 6, 0.01, 3);
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(round_solution(inst.perturbed, inst.game, seed++));
}
BENCHMARK(BM_Rounding)->Arg(4)->Arg(16);

}  // namespace

BENCHMARK_MAIN();
