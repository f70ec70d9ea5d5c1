#include <gtest/gtest.h>

#include <numeric>

#include "gnnflow/error.hpp"
#include "gnnflow/phase_engine.hpp"
#include "gnnflow/random.hpp"
#include "test_util.hpp"

namespace gnnflow {
namespace {

using testing_util::fig1_graph;

const LoopSpec& agg_loops(const char* notation = "Seq_AC(V_x F_x N_t, V_x G_x F_x)") {
  static thread_local DataflowSpec s;
  s = parse_dataflow(notation);
  return s.agg;
}

LoopSpec cmb_loops(const char* notation = "Seq_AC(V_x F_x N_x, V_x G_x F_x)") {
  return parse_dataflow(notation).cmb;
}

TileConfig agg_tiles(std::uint64_t tv, std::uint64_t tn, std::uint64_t tf) {
  return {tv, tn, tf, 1, 1, 1};
}

TEST(Aggregation, SingleVertexTakesTwoCycles) {
  const CsrGraph g = build_csr(1, {{0, 0}}, 1);
  const PhaseCost c = aggregation_cost(g, 1, agg_loops(), agg_tiles(1, 1, 1), {});
  EXPECT_EQ(c.cycles, 2u);
  EXPECT_EQ(c.mac_count, 1u);
}

TEST(Aggregation, TileWaitsForSlowestVertex) {
  // Degrees 1 and 3, two features, both vertices in one tile.
  const CsrGraph two(std::vector<EdgeOffset>{0, 1, 4}, std::vector<VertexId>{1, 0, 1, 1}, 2);
  const PhaseCost c = aggregation_cost(two, 2, agg_loops(), agg_tiles(2, 1, 1), {});
  EXPECT_EQ(c.cycles, 7u);
  EXPECT_EQ(c.mac_count, 8u);
}

TEST(Aggregation, AdderTreeFillForSpatialReduction) {
  const CsrGraph g = fig1_graph(4);
  // max degree 3 -> ceil(3/4)=1 step per feature tile; 1 feature tile;
  // 5 vertex tiles of (1 + 1 + log2 4).
  const PhaseCost c =
      aggregation_cost(g, 4, agg_loops("Seq_AC(V_x F_x N_s, V_x G_x F_x)"), agg_tiles(1, 4, 4), {});
  EXPECT_EQ(c.cycles, 5u * (1 + 1 + 2));
}

TEST(Aggregation, EmptyGraphCostsNothing) {
  const CsrGraph g = build_csr(0, {}, 4);
  const PhaseCost c = aggregation_cost(g, 4, agg_loops(), agg_tiles(1, 1, 1), {});
  EXPECT_EQ(c.cycles, 0u);
  EXPECT_EQ(c.mac_count, 0u);
  EXPECT_DOUBLE_EQ(c.utilization(), 0.0);
}

TEST(Aggregation, RejectsOversizedOrZeroTiles) {
  const CsrGraph g = fig1_graph();
  EXPECT_THROW(aggregation_cost(g, 4, agg_loops(), agg_tiles(8, 8, 16), {}), ConfigError);
  EXPECT_THROW(aggregation_cost(g, 4, agg_loops(), agg_tiles(0, 1, 1), {}), ConfigError);
  HardwareConfig none;
  none.pe_count = 0;
  EXPECT_THROW(aggregation_cost(g, 4, agg_loops(), agg_tiles(1, 1, 1), none), ConfigError);
}

TEST(Aggregation, WorkConservationAndLowerBound) {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const std::uint64_t v = 1 + rng.below(60);
    const auto f = static_cast<std::uint32_t>(1 + rng.below(40));
    const CsrGraph g = generate_synthetic(
        {v, f, 1.0 + static_cast<double>(rng.below(static_cast<std::uint64_t>(v))) / 2,
         DegreeModel::UniformRandom, rng.next()});
    const TileConfig t = agg_tiles(1ull << rng.below(4), 1ull << rng.below(4), 1ull << rng.below(4));
    HardwareConfig hw;
    hw.distribution_latency = rng.below(3);
    const PhaseCost c = aggregation_cost(g, f, agg_loops(), t, hw);
    EXPECT_EQ(c.mac_count, g.num_edges() * f);
    EXPECT_GE(c.cycles * t.agg_product(), c.mac_count);
    EXPECT_LE(c.utilization(), 1.0);
  }
}

TEST(Aggregation, CyclesGrowWithDegree) {
  std::uint64_t prev = 0;
  for (std::uint32_t d : {1u, 2u, 4u, 8u, 16u}) {
    const CsrGraph g = generate_synthetic({64, 8, static_cast<double>(d), DegreeModel::FixedDegree, 3});
    const std::uint64_t c = aggregation_cost(g, 8, agg_loops(), agg_tiles(4, 2, 8), {}).cycles;
    EXPECT_GE(c, prev);
    prev = c;
  }
}

TEST(Aggregation, AccessCountsOnFig1) {
  const CsrGraph g = fig1_graph(4);
  const PhaseCost c = aggregation_cost(g, 4, agg_loops(), agg_tiles(1, 1, 4), {});
  const auto& a = c.access;
  EXPECT_EQ(at(a.gb_reads, Operand::Inp), 11u * 4);
  EXPECT_EQ(at(a.gb_writes, Operand::Int), 5u * 4);
  EXPECT_EQ(at(a.gb_reads, Operand::Adj), 6u + 11);
  EXPECT_EQ(at(a.l1_reads, Operand::Inp), 2u * 44);
  EXPECT_EQ(at(a.gb_reads, Operand::Psum), 0u);
  EXPECT_EQ(at(a.gb_reads, Operand::Wt), 0u);
}

TEST(Aggregation, FeatureOuterLoopRefetchesAdjacency) {
  const CsrGraph g = fig1_graph(4);
  const PhaseCost inner =
      aggregation_cost(g, 4, agg_loops("Seq_AC(V_t N_t F_t, V_x G_x F_x)"), agg_tiles(1, 1, 1), {});
  const PhaseCost outer =
      aggregation_cost(g, 4, agg_loops("Seq_AC(V_t F_t N_t, V_x G_x F_x)"), agg_tiles(1, 1, 1), {});
  EXPECT_EQ(at(outer.access.gb_reads, Operand::Adj), 6u + 11 * 4);
  EXPECT_EQ(at(inner.access.gb_reads, Operand::Adj), 6u + 11);
  EXPECT_EQ(inner.cycles, outer.cycles);
}

TEST(Aggregation, ReductionOutsideVertexLoopSpillsPartialSums) {
  const CsrGraph g = fig1_graph(2);
  const PhaseCost c =
      aggregation_cost(g, 2, agg_loops("Seq_AC(N_t V_t F_t, V_x G_x F_x)"), agg_tiles(1, 1, 2), {});
  EXPECT_GT(at(c.access.gb_reads, Operand::Psum), 0u);
  EXPECT_EQ(at(c.access.gb_reads, Operand::Psum), at(c.access.gb_writes, Operand::Psum));
}

TEST(Combination, WorkedExamples) {
  // V=4, F=2, G=2 with (t_v, t_g, t_f) = (4, 2, 1): one output tile, 2 steps.
  EXPECT_EQ(combination_cost(4, 2, 2, cmb_loops(), {1, 1, 1, 4, 2, 1}, {}).cycles, 3u);
  EXPECT_EQ(combination_cost(1, 1, 1, cmb_loops(), {1, 1, 1, 1, 1, 1}, {}).cycles, 2u);
  // Spatial F adds the tree fill.
  EXPECT_EQ(combination_cost(4, 8, 2, cmb_loops(), {1, 1, 1, 4, 2, 8}, {}).cycles, 1u + 1 + 3);
}

TEST(Combination, MacsAndUtilization) {
  const PhaseCost c = combination_cost(100, 30, 7, cmb_loops(), {1, 1, 1, 8, 4, 8}, {});
  EXPECT_EQ(c.mac_count, 100u * 30 * 7);
  EXPECT_LE(c.utilization(), 1.0);
  EXPECT_GE(c.cycles * 8 * 4 * 8, c.mac_count);
  EXPECT_EQ(combination_cost(0, 30, 7, cmb_loops(), {1, 1, 1, 8, 4, 8}, {}).cycles, 0u);
}

TEST(Combination, AccessCounts) {
  const PhaseCost c = combination_cost(4, 2, 2, cmb_loops("Seq_AC(V_x F_x N_x, V_t G_t F_t)"),
                                       {1, 1, 1, 1, 1, 1}, {});
  EXPECT_EQ(at(c.access.l1_reads, Operand::Int), 16u);
  EXPECT_EQ(at(c.access.l1_reads, Operand::Wt), 16u);
  EXPECT_EQ(at(c.access.gb_writes, Operand::Op), 8u);
  // Output-stationary over F: no partial-sum traffic.
  EXPECT_EQ(at(c.access.gb_reads, Operand::Psum), 0u);
  // F outermost with tiled V and G spills partial sums.
  const PhaseCost spill = combination_cost(4, 2, 2, cmb_loops("Seq_AC(V_x F_x N_x, F_t V_t G_t)"),
                                           {1, 1, 1, 1, 1, 1}, {});
  EXPECT_EQ(at(spill.access.gb_reads, Operand::Psum), 4u * 2 * 1);
}

TEST(Combination, RolesRouteOperands) {
  const PhaseCost c = combination_cost(3, 3, 3, cmb_loops(), {1, 1, 1, 1, 1, 1}, {},
                                       {Operand::Inp, Operand::Int});
  EXPECT_GT(at(c.access.gb_reads, Operand::Inp), 0u);
  EXPECT_EQ(at(c.access.gb_reads, Operand::Int), 0u);
  EXPECT_EQ(at(c.access.gb_writes, Operand::Int), 9u);
}

TEST(Partition, RowColumnElement) {
  const auto rows = partition_intermediate(5, 4, Granularity::Row, 2, 3);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[2], (Block{4, 5, 0, 4}));
  const auto cols = partition_intermediate(5, 4, Granularity::Column, 2, 3);
  ASSERT_EQ(cols.size(), 2u);
  EXPECT_EQ(cols[1], (Block{0, 5, 3, 4}));
  const auto el = partition_intermediate(5, 4, Granularity::Element, 2, 3);
  ASSERT_EQ(el.size(), 6u);
  EXPECT_EQ(el[1], (Block{0, 2, 3, 4}));
  const auto cm = partition_intermediate(5, 4, Granularity::Element, 2, 3, true);
  EXPECT_EQ(cm[1], (Block{2, 4, 0, 3}));
  std::uint64_t covered = 0;
  for (const auto& b : el) covered += b.elements();
  EXPECT_EQ(covered, 20u);
  EXPECT_TRUE(partition_intermediate(0, 4, Granularity::Row, 2, 3).empty());
}

TEST(UnitCostsTest, SumToWholePhase) {
  const CsrGraph g = fig1_graph(4);
  DataflowSpec spec = testing_util::tiled("PP_AC(V_x F_x N_t, V_x G_x F_x)", {2, 1, 4, 2, 2, 4});
  spec.inter.granularity = Granularity::Row;
  const auto blocks = partition_intermediate(5, 4, Granularity::Row, 2, 4);
  const UnitCosts a = aggregation_unit_costs(g, 4, spec, {}, blocks, {});
  const UnitCosts c = combination_unit_costs(5, 4, 3, spec, {}, blocks, {Operand::Int, Operand::Op});
  EXPECT_EQ(a.units.size(), 3u);
  EXPECT_EQ(a.total_macs(), 44u);
  EXPECT_EQ(c.total_macs(), 5u * 4 * 3);
  EXPECT_EQ(a.total_cycles(),
            aggregation_cost(g, 4, spec.agg, *spec.tiles, {}).cycles);
}

TEST(Helpers, CeilDivLog2) {
  EXPECT_EQ(ceil_div(7, 2), 4u);
  EXPECT_EQ(ceil_div(0, 3), 0u);
  EXPECT_EQ(ceil_log2(1), 0u);
  EXPECT_EQ(ceil_log2(5), 3u);
  EXPECT_EQ(ceil_log2(8), 3u);
  EXPECT_EQ(to_string(Operand::Psum), "Psum");
}

}  // namespace
}  // namespace gnnflow
