#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "capreward/kernels.hpp"

using namespace capreward;

namespace {

const std::vector<std::string> kNouns = {"dog",   "cat",   "table", "chair", "ball",  "tree", "car",
                                         "bench", "plate", "shirt", "woman", "horse", "kite", "bowl"};
const std::vector<std::string> kAdjectives = {"red", "blue", "wooden", "large", "small", "white", "striped"};
const std::vector<std::string> kPredicates = {"on", "next to", "holding", "under", "behind", "near"};

SceneGraph random_graph(std::mt19937_64& rng, std::size_t objects) {
  SceneGraph g(GraphSource::ingested);
  std::uniform_int_distribution<std::size_t> noun(0, kNouns.size() - 1), adj(0, kAdjectives.size() - 1),
      pred(0, kPredicates.size() - 1);
  std::vector<std::string> names;
  for (std::size_t i = 0; i < objects; ++i) names.push_back(g.add_object(kNouns[noun(rng)]));
  for (const auto& n : names) {
    if (rng() % 2) g.add_attribute(n, kAdjectives[adj(rng)]);
    if (rng() % 3 == 0) g.add_relation(n, kPredicates[pred(rng)], names[rng() % names.size()]);
  }
  return g;
}

std::vector<CaptionTriple> make_triples(std::size_t n) {
  std::mt19937_64 rng(7);
  std::vector<CaptionTriple> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back({random_graph(rng, 6), random_graph(rng, 6), random_graph(rng, 8)});
  return out;
}

std::vector<EvaluationRecord> make_records(std::size_t n) {
  std::mt19937_64 rng(11);
  std::vector<EvaluationRecord> out;
  for (std::size_t i = 0; i < n; ++i) {
    SceneGraph gt = random_graph(rng, 8);
    std::vector<std::string> extra = {kNouns[rng() % kNouns.size()], kNouns[rng() % kNouns.size()]};
    out.push_back({ReferenceRecord::make("img" + std::to_string(i), gt, extra, {}, {}), random_graph(rng, 7),
                   std::nullopt, std::nullopt});
  }
  return out;
}

void BM_RewardBatch(benchmark::State& state, Execution exec) {
  const auto triples = make_triples(static_cast<std::size_t>(state.range(0)));
  const CharNgramSimilarity backend;
  const RewardConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(score_reward_batch(triples, backend, cfg, exec));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_ImageBatch(benchmark::State& state, Execution exec) {
  const auto records = make_records(static_cast<std::size_t>(state.range(0)));
  const CharNgramSimilarity backend;
  for (auto _ : state) benchmark::DoNotOptimize(score_image_batch(records, backend, AggregateWeights{}, {}, exec));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK_CAPTURE(BM_RewardBatch, serial, Execution::serial)->Arg(256)->Arg(2048)->UseRealTime();
BENCHMARK_CAPTURE(BM_RewardBatch, parallel, Execution::parallel)->Arg(256)->Arg(2048)->UseRealTime();
BENCHMARK_CAPTURE(BM_ImageBatch, serial, Execution::serial)->Arg(256)->Arg(2048)->UseRealTime();
BENCHMARK_CAPTURE(BM_ImageBatch, parallel, Execution::parallel)->Arg(256)->Arg(2048)->UseRealTime();

BENCHMARK_MAIN();
