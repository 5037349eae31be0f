#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "tcsel/lsa.hpp"
#include "tcsel/randomization.hpp"
#include "tcsel/retrieval.hpp"

namespace {

// Sparse count matrix wrapped as a term-document matrix.
tcsel::TermDocumentMatrix random_matrix(int terms, int docs, double density, std::uint64_t seed) {
  const tcsel::SparseMatrix counts = tcsel::random_count_matrix(terms, docs, density, seed);
  std::vector<tcsel::ProcessedDocument> out(static_cast<std::size_t>(docs));
  for (int c = 0; c < docs; ++c) {
    out[static_cast<std::size_t>(c)].doc_id = "d" + std::to_string(c);
    for (tcsel::SparseMatrix::InnerIterator it(counts, c); it; ++it) {
      for (int n = 0; n < static_cast<int>(it.value()); ++n)
        out[static_cast<std::size_t>(c)].terms.push_back("t" + std::to_string(it.row()));
    }
  }
  return tcsel::build_matrix(out);
}

void BM_TruncatedSvd(benchmark::State& state) {
  const auto m = tcsel::random_count_matrix(2000, 1000, 0.01, 1);
  const int k = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(tcsel::truncated_svd(m, k).values);
  state.SetComplexityN(k);
}
BENCHMARK(BM_TruncatedSvd)->Arg(8)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_VsmScore(benchmark::State& state) {
  const auto m = random_matrix(5000, static_cast<int>(state.range(0)), 0.01, 2);
  std::vector<std::string> query;
  for (int i = 0; i < 40; ++i) query.push_back("t" + std::to_string(i * 97 % 5000));
  const auto q = tcsel::embed_query(m, query);
  const int workers = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(tcsel::vsm_score(m, q, "q", workers).scores);
}
BENCHMARK(BM_VsmScore)->Args({1000, 1})->Args({10000, 1})->Args({10000, 4})->Unit(benchmark::kMicrosecond);

void BM_LsaScore(benchmark::State& state) {
  const auto m = random_matrix(3000, 1500, 0.01, 3);
  const auto model = tcsel::lsa_fit(m, static_cast<int>(state.range(0)));
  std::vector<std::string> query;
  for (int i = 0; i < 40; ++i) query.push_back("t" + std::to_string(i * 61 % 3000));
  const auto q = tcsel::embed_query(m, query);
  for (auto _ : state) benchmark::DoNotOptimize(tcsel::lsa_score(model, q).scores);
}
BENCHMARK(BM_LsaScore)->Arg(16)->Arg(64)->Unit(benchmark::kMicrosecond);

void BM_Randomization(benchmark::State& state) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> noise(0.0, 1.0);
  const int subjects = static_cast<int>(state.range(0));
  std::vector<std::string> ids;
  for (int s = 0; s < subjects; ++s) ids.push_back("s" + std::to_string(s));
  tcsel::RmDesign design(ids, {"V1", "V2", "V3"}, {"max", "mean"});
  for (std::size_t s = 0; s < ids.size(); ++s)
    for (std::size_t a = 0; a < 3; ++a)
      for (std::size_t b = 0; b < 2; ++b) design.set(s, a, b, noise(rng));
  for (auto _ : state)
    benchmark::DoNotOptimize(tcsel::randomization_test(design, tcsel::Effect::FactorA, 10000, 1).p_value);
}
BENCHMARK(BM_Randomization)->Arg(10)->Arg(100)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
