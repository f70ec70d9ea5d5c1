#include <benchmark/benchmark.h>

#include "gnnflow/configs.hpp"
#include "gnnflow/datasets.hpp"
#include "gnnflow/interphase.hpp"
#include "gnnflow/oracle.hpp"

namespace {

using namespace gnnflow;

std::shared_ptr<const CsrGraph> dataset(const char* name) {
  return std::make_shared<const CsrGraph>(
      dataset_graph(*find_dataset(builtin_datasets(), name), {}));
}

LayerConfig layer(const BuiltinConfig& b, std::shared_ptr<const CsrGraph> g, std::uint64_t pe) {
  LayerConfig cfg;
  cfg.graph = g;
  cfg.out_features = 16;
  cfg.dataflow = b.spec;
  const bool pp = b.spec.inter.kind == InterKind::PP;
  cfg.hw_agg.pe_count = cfg.hw_cmb.pe_count = pp ? pe / 2 : pe;
  cfg.dataflow.tiles = derive_tiles(
      b.spec,
      {g->num_vertices(), g->num_features(), 16,
       static_cast<double>(g->num_edges()) / static_cast<double>(g->num_vertices())},
      cfg.hw_agg.pe_count, cfg.hw_cmb.pe_count, {b.agg_vertex, b.cmb_vertex});
  return cfg;
}

void BM_AggregationCost(benchmark::State& state) {
  const CsrGraph g = generate_synthetic(
      {static_cast<std::uint64_t>(state.range(0)), 64, 16.0, DegreeModel::Skewed, 1});
  const LoopSpec loops = parse_dataflow("Seq_AC(V_x F_x N_t, V_x G_x F_x)").agg;
  for (auto _ : state)
    benchmark::DoNotOptimize(aggregation_cost(g, 64, loops, {4, 1, 64, 1, 1, 1}, {}));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(g.num_edges()));
}
BENCHMARK(BM_AggregationCost)->Arg(1 << 10)->Arg(1 << 14)->Arg(1 << 17);

void BM_RunLayerBuiltin(benchmark::State& state) {
  static const auto g = dataset("Citeseer");
  const auto& b = builtin_configs()[static_cast<std::size_t>(state.range(0))];
  const LayerConfig cfg = layer(b, g, 512);
  for (auto _ : state) benchmark::DoNotOptimize(run_layer(cfg));
  state.SetLabel(b.name);
}
BENCHMARK(BM_RunLayerBuiltin)->DenseRange(0, 8);

void BM_Replay(benchmark::State& state) {
  auto g = std::make_shared<const CsrGraph>(
      generate_synthetic({kOracleMaxVertices, 16, 4.0, DegreeModel::Skewed, 2}));
  const LayerConfig cfg = layer(*find_builtin("PP-Nt-Vsh"), g, 64);
  for (auto _ : state) benchmark::DoNotOptimize(replay(cfg));
}
BENCHMARK(BM_Replay);

}  // namespace
BENCHMARK_MAIN();
