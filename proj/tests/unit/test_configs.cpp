#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "gnnflow/configs.hpp"
#include "gnnflow/datasets.hpp"
#include "gnnflow/error.hpp"

namespace gnnflow {
namespace {

TEST(Builtins, NineNamedAcConfigsWithVOutermost) {
  const auto& all = builtin_configs();
  ASSERT_EQ(all.size(), 9u);
  std::set<std::string> names;
  for (const auto& c : all) {
    names.insert(c.name);
    EXPECT_EQ(c.spec.order, PhaseOrder::AC) << c.name;
    EXPECT_EQ(c.spec.agg.loops.front().dim, Dim::V) << c.name;
    EXPECT_EQ(c.spec.cmb.loops.front().dim, Dim::V) << c.name;
    EXPECT_FALSE(c.spec.tiles) << c.name;
    if (c.spec.inter.kind == InterKind::PP)
      EXPECT_EQ(c.spec.inter.granularity, Granularity::Row) << c.name;
  }
  EXPECT_EQ(names.size(), 9u);
  EXPECT_TRUE(find_builtin("Seq-Nt"));
  EXPECT_FALSE(find_builtin("seq-nt"));
}

struct Workload {
  const char* dataset;
  std::uint64_t g;
};

class DerivedTiles : public ::testing::TestWithParam<Workload> {};

TEST_P(DerivedTiles, EveryBuiltinIsLegalAndFullyMapped) {
  const auto d = *find_dataset(builtin_datasets(), GetParam().dataset);
  const WorkloadShape shape{static_cast<std::uint64_t>(d.avg_nodes * 64), d.num_features,
                            GetParam().g, d.avg_edges / d.avg_nodes};
  for (const auto& c : builtin_configs()) {
    for (TilePolicy policy : {TilePolicy::FeatureFirst, TilePolicy::VertexFirst}) {
      const bool pp = c.spec.inter.kind == InterKind::PP;
      const std::uint64_t pa = pp ? 256 : 512, pc = pp ? 256 : 512;
      DataflowSpec s = c.spec;
      s.tiles = derive_tiles(s, shape, pa, pc, {c.agg_vertex, c.cmb_vertex, policy});
      const auto r = validate(s, pa, pc);
      EXPECT_TRUE(r.legal) << c.name << " " << s.tiles->to_string() << " "
                           << (r.violations.empty() ? "" : r.violations[0].message);
      EXPECT_LE(r.mapping_efficiency_agg, 1.0);
      EXPECT_LE(r.mapping_efficiency_cmb, 1.0);
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Datasets, DerivedTiles,
                         ::testing::Values(Workload{"Mutag", 16}, Workload{"Collab", 16},
                                           Workload{"Citeseer", 16}, Workload{"Cora", 7},
                                           Workload{"Reddit-bin", 2}));

TEST(DerivedTiles, SpatialReductionUsesAverageDegree) {
  DataflowSpec s = find_builtin("Seq-Ns")->spec;
  const TileConfig t = derive_tiles(s, {1000, 64, 16, 9.5}, 512, 512);
  EXPECT_EQ(t.t_n, 8u);
  const TileConfig low = derive_tiles(s, {1000, 64, 16, 1.0}, 512, 512);
  EXPECT_EQ(low.t_n, 2u);
}

TEST(DerivedTiles, EngnPinsCombinationToAggregation) {
  const auto c = *find_builtin("SP-VsNt-Vs");
  const TileConfig t =
      derive_tiles(c.spec, {4096, 256, 16, 3.0}, 512, 512, {c.agg_vertex, c.cmb_vertex});
  EXPECT_EQ(t.t_v_agg, t.t_v_cmb);
  EXPECT_EQ(t.t_f_agg, t.t_f_cmb);
  EXPECT_EQ(t.t_n, 1u);
}

TEST(DerivedTiles, HighEmphasisRaisesVertexTile) {
  const auto lo = *find_builtin("PP-Nt-Vt/sl");
  const auto hi = *find_builtin("PP-Nt-Vsh");
  const WorkloadShape shape{4096, 64, 16, 4.0};
  const TileConfig a = derive_tiles(lo.spec, shape, 256, 256, {lo.agg_vertex, lo.cmb_vertex});
  const TileConfig b = derive_tiles(hi.spec, shape, 256, 256, {hi.agg_vertex, hi.cmb_vertex});
  EXPECT_LT(a.t_v_cmb, b.t_v_cmb);
}

TEST(Pow2, FloorAndCeil) {
  EXPECT_EQ(pow2_floor(0), 1u);
  EXPECT_EQ(pow2_floor(9), 8u);
  EXPECT_EQ(pow2_ceil(9), 16u);
  EXPECT_EQ(pow2_ceil(16), 16u);
}

TEST(TilePolicyNames, RoundTrip) {
  for (auto p : {TilePolicy::FeatureFirst, TilePolicy::VertexFirst})
    EXPECT_EQ(tile_policy_from_string(to_string(p)), p);
  EXPECT_THROW(tile_policy_from_string("diagonal"), ConfigError);
}

TEST(Datasets, RegistryHasSevenWorkloads) {
  const auto& r = builtin_datasets();
  ASSERT_EQ(r.size(), 7u);
  const auto cora = find_dataset(r, "cora");
  ASSERT_TRUE(cora);
  EXPECT_FALSE(cora->graph_classification());
  EXPECT_EQ(cora->num_features, 1433u);
  EXPECT_TRUE(find_dataset(r, "Mutag")->graph_classification());
  EXPECT_FALSE(find_dataset(r, "Pubmed"));
}

TEST(Datasets, ParseRegistry) {
  const auto r = parse_dataset_registry(
      R"([{"name":"Tiny","num_graphs":2,"avg_nodes":3,"avg_edges":4,"num_features":5}])");
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r[0], (DatasetDescriptor{"Tiny", 2, 3.0, 4.0, 5}));
  EXPECT_THROW(parse_dataset_registry("{}"), ConfigError);
  EXPECT_THROW(parse_dataset_registry("[{\"name\":\"x\"}]"), ConfigError);
  EXPECT_THROW(parse_dataset_registry(
                   R"([{"name":"T","num_graphs":0,"avg_nodes":3,"avg_edges":4,"num_features":5}])"),
               ConfigError);
  EXPECT_THROW(load_dataset_registry("/nonexistent/registry.json"), ConfigError);
}

TEST(Datasets, NodeClassificationGraphMatchesStatistics) {
  const auto d = *find_dataset(builtin_datasets(), "Citeseer");
  const CsrGraph g = dataset_graph(d, {64, DegreeModel::UniformRandom, false, 1});
  EXPECT_EQ(g.num_vertices(), 3327u);
  EXPECT_EQ(g.num_features(), 3703u);
  EXPECT_NEAR(static_cast<double>(g.num_edges()), 9464.0, 1.0);
}

TEST(Datasets, GraphClassificationIsBatched) {
  const auto d = *find_dataset(builtin_datasets(), "Mutag");
  const CsrGraph g = dataset_graph(d, {64, DegreeModel::Skewed, true, 7});
  EXPECT_NEAR(static_cast<double>(g.num_vertices()), 17.93 * 64, 17.93 * 64 * 0.2);
  const CsrGraph again = dataset_graph(d, {64, DegreeModel::Skewed, true, 7});
  EXPECT_EQ(g, again);
}

}  // namespace
}  // namespace gnnflow
