#include <benchmark/benchmark.h>

#include "geco/community.hpp"
#include "geco/explain.hpp"
#include "geco/gcn.hpp"
#include "geco/synthgen.hpp"

namespace {

geco::Dataset sample_data() {
  auto recipe = *geco::synth::builtin_recipe("ba_house_cycle");
  recipe.graphs_per_class = 16;
  return geco::synth::build_dataset(recipe);
}

void BM_Forward(benchmark::State& state) {
  const auto data = sample_data();
  const auto model = geco::gnn::GcnModel::initialize(data.feature_dim, static_cast<std::size_t>(state.range(0)), 2, 1);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(geco::gnn::forward(model, data.graphs[i++ % data.size()]).probs);
  }
}
BENCHMARK(BM_Forward)->Arg(20)->Arg(64);

void BM_LossAndGrad(benchmark::State& state) {
  const auto data = sample_data();
  const auto model = geco::gnn::GcnModel::initialize(data.feature_dim, 20, 2, 1);
  for (auto _ : state) benchmark::DoNotOptimize(geco::gnn::loss_and_grad(model, data.graphs).loss);
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(data.size()));
}
BENCHMARK(BM_LossAndGrad);

void BM_GreedyModularity(benchmark::State& state) {
  geco::Rng rng(3);
  const auto g = geco::synth::gen_ba(static_cast<std::size_t>(state.range(0)), 2, rng);
  for (auto _ : state) benchmark::DoNotOptimize(geco::community::greedy_modularity_communities(g));
}
BENCHMARK(BM_GreedyModularity)->Arg(30)->Arg(200)->Arg(1000);

void BM_GecoExplain(benchmark::State& state) {
  const auto data = sample_data();
  const auto model = geco::gnn::GcnModel::initialize(data.feature_dim, 20, 2, 1);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(geco::explain::geco_explain(model, data.graphs[i++ % data.size()]).mask);
  }
}
BENCHMARK(BM_GecoExplain);

}  // namespace
BENCHMARK_MAIN();
