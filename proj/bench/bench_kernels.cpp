// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include <vector>

#include "lipgan/eval.hpp"
#include "lipgan/kernels.hpp"
#include "lipgan/rng.hpp"

namespace {

using namespace lipgan;

std::vector<double> random_values(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform() * 2.0 - 1.0;
  return v;
}

template <auto Gemm>
void BM_gemm(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const kernels::GemmShape shape{n, n, n, false, true};
  const auto a = random_values(n * n, 1);
  const auto b = random_values(n * n, 2);
  std::vector<double> c(n * n);
  for (auto _ : state) {
    Gemm(shape, a, b, c);
    benchmark::DoNotOptimize(c.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n * n * n));
}

template <auto Softmax>
void BM_softmax(benchmark::State& state) {
  const auto rows = static_cast<std::size_t>(state.range(0));
  constexpr std::size_t cols = 32;
  const auto in = random_values(rows * cols, 3);
  std::vector<double> out(in.size());
  for (auto _ : state) {
    Softmax(rows, cols, in, out);
    benchmark::DoNotOptimize(out.data());
  }
}

struct NgramFixture {
  NGramIndex index;
  std::vector<Sentence> samples;

  explicit NgramFixture(std::size_t count) : index(build()) {
    Rng rng(5);
    for (std::size_t i = 0; i < count; ++i) {
      Sentence s(8);
      for (auto& t : s) t = static_cast<TokenId>(3 + rng.uniform_int(0, 26));
      samples.push_back(std::move(s));
    }
  }

  static NGramIndex build() {
    Rng rng(4);
    TokenizedCorpus held;
    for (int i = 0; i < 100; ++i) {
      Sentence s(10);
      for (auto& t : s) t = static_cast<TokenId>(3 + rng.uniform_int(0, 26));
      s.push_back(Vocabulary::kEosId);
      held.sentences.push_back(std::move(s));
    }
    return NGramIndex::build(held);
  }
};

template <auto Count>
void BM_count_ngrams(benchmark::State& state) {
  const NgramFixture f(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(Count(f.samples, f.index, 2));
}

BENCHMARK_TEMPLATE(BM_gemm, kernels::serial::gemm)->Arg(32)->Arg(128)->Arg(256);
BENCHMARK_TEMPLATE(BM_gemm, kernels::parallel::gemm)->Arg(32)->Arg(128)->Arg(256);
BENCHMARK_TEMPLATE(BM_softmax, kernels::serial::softmax_rows)->Arg(128)->Arg(4096);
BENCHMARK_TEMPLATE(BM_softmax, kernels::parallel::softmax_rows)->Arg(128)->Arg(4096);
BENCHMARK_TEMPLATE(BM_count_ngrams, serial::count_ngrams)->Arg(640)->Arg(20000);
BENCHMARK_TEMPLATE(BM_count_ngrams, parallel::count_ngrams)->Arg(640)->Arg(20000);

}  // namespace

BENCHMARK_MAIN();
