// Parallel kernels against their serial references.
//   ./tsdiag_bench --benchmark_filter=Profile
// OMP_NUM_THREADS controls the parallel side.

#include <benchmark/benchmark.h>

#include "test_support.hpp"
#include "tsdiag/dist_stats.hpp"
#include "tsdiag/edit_ops.hpp"
#include "tsdiag/sari.hpp"

using namespace tsdiag;

namespace {

Split make_split(std::size_t n) {
  rng::Xoshiro256 gen(1);
  Split s{"bench", {}};
  for (std::size_t i = 0; i < n; ++i)
    s.pairs.push_back({testing::random_tokens(gen, 40, 50), testing::random_tokens(gen, 40, 50), i});
  return s;
}

std::vector<double> make_values(std::uint64_t seed, std::size_t n) {
  rng::Xoshiro256 gen(seed);
  std::vector<double> v(n);
  for (auto& x : v) x = 100.0 * gen.uniform() * gen.uniform();
  return v;
}

struct SariInput {
  std::vector<TokenSeq> sources, outputs;
  std::vector<std::vector<TokenSeq>> refs;
};

SariInput make_sari(std::size_t n) {
  rng::Xoshiro256 gen(3);
  SariInput in;
  for (std::size_t i = 0; i < n; ++i) {
    in.sources.push_back(testing::random_tokens(gen, 30, 200));
    in.outputs.push_back(testing::random_tokens(gen, 30, 200));
    in.refs.push_back({});
    for (int r = 0; r < 8; ++r) in.refs.back().push_back(testing::random_tokens(gen, 30, 200));
  }
  return in;
}

template <auto Kernel>
void BM_Profile(benchmark::State& state) {
  const Split s = make_split(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(s));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <auto Kernel>
void BM_PermTest(benchmark::State& state) {
  const auto a = make_values(1, 2000), b = make_values(2, 8000);
  PermTestOptions opts;
  opts.iterations = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(a, b, opts));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <auto Kernel>
void BM_Sari(benchmark::State& state) {
  const auto in = make_sari(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(in.sources, in.outputs, in.refs));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_Profile<profile_split_serial>)->Name("Profile/serial")->Arg(20000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Profile<profile_split>)->Name("Profile/parallel")->Arg(20000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PermTest<permutation_test_serial>)->Name("PermTest/serial")->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PermTest<permutation_test>)->Name("PermTest/parallel")->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Sari<sari_corpus_serial>)->Name("Sari/serial")->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Sari<sari_corpus>)->Name("Sari/parallel")->Arg(2000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
