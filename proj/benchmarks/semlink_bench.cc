#include <benchmark/benchmark.h>

#include <filesystem>
#include <random>
#include <string>

#include "linking_oracle.h"
#include "semlink/aggregation.h"
#include "semlink/embedding_table.h"
#include "semlink/linking.h"
#include "semlink/similarity.h"

namespace {

using namespace semlink;

EmbeddingTable random_table(std::size_t rows, std::size_t dim, const std::string &prefix,
                            std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<float> normal(0.0f, 0.2f);
  EmbeddingTable t(dim);
  t.reserve(rows);
  std::vector<float> v(dim);
  for (std::size_t i = 0; i < rows; ++i) {
    for (auto &x : v) x = normal(rng);
    t.add(prefix + std::to_string(i), v);
  }
  return t;
}

void BM_LoadBinary(benchmark::State &state) {
  const auto rows = static_cast<std::size_t>(state.range(0));
  const auto path = (std::filesystem::temp_directory_path() / "semlink_bench.bin").string();
  save_binary(random_table(rows, 300, "w", 1), path);
  for (auto _ : state) benchmark::DoNotOptimize(load_binary(path));
  std::filesystem::remove(path);
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_LoadBinary)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_AggregateTable(benchmark::State &state) {
  const auto entities = random_table(static_cast<std::size_t>(state.range(0)), 300, "E", 2);
  const auto words = random_table(500, 300, "w", 3);
  AssignmentMap assignments;
  std::mt19937_64 rng(4);
  for (const auto &label : entities.labels()) {
    EntityTypeAssignment a{label, {}};
    for (int k = 0; k < 11; ++k) a.type_words.push_back(words.label(rng() % words.size()));
    assignments[label] = a;
  }
  for (auto _ : state) benchmark::DoNotOptimize(aggregate_table(entities, assignments, words, {11, 0.2}));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_AggregateTable)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_TopKCosine(benchmark::State &state) {
  const auto table = random_table(static_cast<std::size_t>(state.range(0)), 300, "E", 5);
  const auto query = table.row(0);
  for (auto _ : state) benchmark::DoNotOptimize(top_k_cosine(table, query, 10));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_TopKCosine)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_InferExhaustive(benchmark::State &state) {
  std::mt19937_64 rng(6);
  const auto doc = oracle::random_document(rng, static_cast<std::size_t>(state.range(0)), 5, 64);
  const auto model = oracle::random_model(rng, 64, 0);
  for (auto _ : state) benchmark::DoNotOptimize(infer(doc, model, InferenceStrategy::kExhaustive));
}
BENCHMARK(BM_InferExhaustive)->DenseRange(2, 6, 2)->Unit(benchmark::kMicrosecond);

void BM_InferGreedy(benchmark::State &state) {
  std::mt19937_64 rng(7);
  const auto doc = oracle::random_document(rng, static_cast<std::size_t>(state.range(0)), 30, 64);
  const auto model = oracle::random_model(rng, 64, 0);
  for (auto _ : state) benchmark::DoNotOptimize(infer(doc, model, InferenceStrategy::kGreedyLocal));
}
BENCHMARK(BM_InferGreedy)->Arg(10)->Arg(100)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
