#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "gnnflow/error.hpp"
#include "gnnflow/graph.hpp"
#include "test_util.hpp"

namespace gnnflow {
namespace {

TEST(CsrGraph, RejectsBrokenInvariants) {
  EXPECT_THROW(CsrGraph({1, 1}, {}, 1), ShapeError);        // does not start at 0
  EXPECT_THROW(CsrGraph({0, 2, 1}, {0, 1}, 1), ShapeError); // decreasing
  EXPECT_THROW(CsrGraph({0, 1}, {0, 0}, 1), ShapeError);    // last offset != E
  EXPECT_THROW(CsrGraph({0, 1}, {1}, 1), ShapeError);       // neighbor out of range
  EXPECT_NO_THROW(CsrGraph({0, 1, 1}, {1}, 1));
}

TEST(EdgeList, TwoVertexCycleWithSelfLoops) {
  std::istringstream in("0 1\n1 0\n");
  const CsrGraph g = read_edge_list(in, {});
  EXPECT_EQ(std::vector<EdgeOffset>(g.vertex_array().begin(), g.vertex_array().end()),
            (std::vector<EdgeOffset>{0, 2, 4}));
  EXPECT_EQ(std::vector<VertexId>(g.edge_array().begin(), g.edge_array().end()),
            (std::vector<VertexId>{0, 1, 0, 1}));
}

TEST(EdgeList, EmptyFileGivesEmptyGraph) {
  std::istringstream in("");
  EdgeListOptions o;
  o.add_self_loops = false;
  const CsrGraph g = read_edge_list(in, o);
  EXPECT_EQ(g.num_vertices(), 0u);
  EXPECT_EQ(g.num_edges(), 0u);
}

TEST(EdgeList, CommentsBlankLinesAndDuplicates) {
  std::istringstream in("# header\n\n0 1\n0 1\n  # indented comment\n1 2\n");
  EdgeListOptions o;
  o.add_self_loops = false;
  const CsrGraph g = read_edge_list(in, o);
  EXPECT_EQ(g.num_vertices(), 3u);
  EXPECT_EQ(g.num_edges(), 2u);
}

TEST(EdgeList, MalformedLineReportsLineNumber) {
  std::istringstream in("0 1\n1 x\n");
  try {
    read_edge_list(in, {});
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  std::istringstream trailing("0 1 7\n");
  EXPECT_THROW(read_edge_list(trailing, {}), ParseError);
}

TEST(EdgeList, OutOfRangeIds) {
  std::istringstream neg("0 -1\n");
  EXPECT_THROW(read_edge_list(neg, {}), RangeError);
  std::istringstream big("0 5\n");
  EdgeListOptions o;
  o.num_vertices = 3;
  EXPECT_THROW(read_edge_list(big, o), RangeError);
}

TEST(EdgeList, SparseIdsAreRenumbered) {
  std::istringstream in("10 20\n20 30\n");
  EdgeListOptions o;
  o.add_self_loops = false;
  const CsrGraph g = read_edge_list(in, o);
  EXPECT_EQ(g.num_vertices(), 3u);
  EXPECT_EQ(g.neighbors(0)[0], 1u);
  EXPECT_EQ(g.neighbors(1)[0], 2u);
}

TEST(EdgeList, RoundTripThroughFile) {
  const CsrGraph g = testing_util::fig1_graph();
  const auto path = std::filesystem::temp_directory_path() / "gnnflow_graph_roundtrip.txt";
  {
    std::ofstream out(path);
    write_edge_list(g, out);
  }
  EdgeListOptions o;
  o.num_features = g.num_features();
  o.num_vertices = g.num_vertices();
  EXPECT_EQ(load_edge_list(path, o), g);
  std::filesystem::remove(path);
  EXPECT_THROW(load_edge_list(path, o), ConfigError);
}

TEST(DegreeStats, Fig1Graph) {
  const DegreeStats s = degree_stats(testing_util::fig1_graph());
  EXPECT_EQ(s.total_edges, 11u);
  EXPECT_DOUBLE_EQ(s.avg_degree, 2.2);
  EXPECT_LE(s.min_degree, s.avg_degree);
  EXPECT_GE(static_cast<double>(s.max_degree), s.avg_degree);
}

TEST(DegreeStats, EmptyGraphIsAllZero) {
  const DegreeStats s = degree_stats(CsrGraph{});
  EXPECT_EQ(s.min_degree, 0u);
  EXPECT_EQ(s.max_degree, 0u);
  EXPECT_EQ(s.avg_degree, 0.0);
  EXPECT_EQ(s.total_edges, 0u);
}

TEST(SelfLoops, IdempotentAndComplete) {
  const CsrGraph g = build_csr(4, {{0, 1}, {2, 2}}, 3);
  const CsrGraph once = with_self_loops(g);
  EXPECT_EQ(with_self_loops(once), once);
  for (std::uint64_t v = 0; v < 4; ++v) {
    const auto n = once.neighbors(v);
    EXPECT_NE(std::find(n.begin(), n.end(), v), n.end());
  }
  EXPECT_EQ(once.num_edges(), 5u);
}

TEST(Transpose, ReversesEveryEdge) {
  const CsrGraph g = build_csr(3, {{0, 1}, {0, 2}, {2, 1}}, 1);
  const CsrGraph t = transpose(g);
  EXPECT_EQ(t.num_edges(), 3u);
  EXPECT_EQ(t.degree(1), 2u);
  EXPECT_EQ(t.degree(0), 0u);
  EXPECT_EQ(transpose(t), g);
}

TEST(Synthetic, FixedDegreeOne) {
  const CsrGraph g = generate_synthetic({10000, 32, 1.0, DegreeModel::FixedDegree, 5});
  EXPECT_EQ(g.num_edges(), 10000u);
  const DegreeStats s = degree_stats(g);
  EXPECT_EQ(s.min_degree, 1u);
  EXPECT_EQ(s.max_degree, 1u);
}

TEST(Synthetic, FixedDegreeFourStats) {
  const DegreeStats s = degree_stats(generate_synthetic({500, 8, 4.0, DegreeModel::FixedDegree, 1}));
  EXPECT_EQ(s.min_degree, 4u);
  EXPECT_EQ(s.max_degree, 4u);
  EXPECT_DOUBLE_EQ(s.avg_degree, 4.0);
}

TEST(Synthetic, UniformEdgeCountAndDeterminism) {
  const SyntheticSpec spec{1024, 512, 10.0, DegreeModel::UniformRandom, 7};
  const CsrGraph a = generate_synthetic(spec);
  const CsrGraph b = generate_synthetic(spec);
  EXPECT_EQ(a, b);
  EXPECT_NEAR(static_cast<double>(a.num_edges()), 10240.0, 512.0);
  SyntheticSpec other = spec;
  other.seed = 8;
  EXPECT_FALSE(generate_synthetic(other) == a);
}

TEST(Synthetic, SkewedHasHeavyTailAndMean) {
  const CsrGraph g = generate_synthetic({4096, 16, 16.0, DegreeModel::Skewed, 3});
  const DegreeStats s = degree_stats(g);
  EXPECT_NEAR(s.avg_degree, 16.0, 1.0);
  EXPECT_GT(static_cast<double>(s.max_degree), 10.0 * s.avg_degree);
}

TEST(Synthetic, SkewedKeepsMeanWhenCapped) {
  const DegreeStats s =
      degree_stats(generate_synthetic({74, 16, 33.0, DegreeModel::Skewed, 11}));
  EXPECT_NEAR(s.avg_degree, 33.0, 1.5);
  EXPECT_LE(s.max_degree, 74u);
}

TEST(Synthetic, Infeasible) {
  EXPECT_THROW(generate_synthetic({5, 1, 6.0, DegreeModel::UniformRandom, 0}), InfeasibleError);
  EXPECT_THROW(generate_synthetic({0, 1, 0.0, DegreeModel::UniformRandom, 0}), ConfigError);
}

TEST(Synthetic, ModelNames) {
  for (auto m : {DegreeModel::UniformRandom, DegreeModel::FixedDegree, DegreeModel::Skewed})
    EXPECT_EQ(degree_model_from_string(to_string(m)), m);
  EXPECT_THROW(degree_model_from_string("zipf"), ConfigError);
}

TEST(Batch, BlockDiagonalOffsets) {
  const CsrGraph a = build_csr(3, {{0, 1}, {1, 2}, {2, 0}, {0, 0}}, 4);
  const CsrGraph b = build_csr(2, {{0, 1}, {1, 0}}, 4);
  const std::vector<CsrGraph> gs{a, b};
  const CsrGraph u = batch_graphs(gs, 2);
  EXPECT_EQ(u.num_vertices(), 5u);
  EXPECT_EQ(u.num_edges(), 6u);
  EXPECT_EQ(u.neighbors(3)[0], 4u);
  EXPECT_EQ(u.neighbors(4)[0], 3u);
}

TEST(Batch, SingleGraphIsIdentity) {
  const CsrGraph g = testing_util::fig1_graph();
  EXPECT_EQ(batch_graphs(std::vector<CsrGraph>{g}, 1), g);
}

TEST(Batch, SixtyFourFig1Copies) {
  const std::vector<CsrGraph> gs(64, testing_util::fig1_graph());
  const CsrGraph u = batch_graphs(gs, 64);
  EXPECT_EQ(u.num_vertices(), 320u);
  EXPECT_EQ(degree_stats(u).total_edges, 704u);
}

TEST(Batch, UsesOnlyFirstBatchSize) {
  const std::vector<CsrGraph> gs(5, testing_util::fig1_graph());
  EXPECT_EQ(batch_graphs(gs, 2).num_vertices(), 10u);
}

TEST(Batch, Errors) {
  EXPECT_THROW(batch_graphs({}, 1), ShapeError);
  const std::vector<CsrGraph> mixed{build_csr(1, {}, 2), build_csr(1, {}, 3)};
  EXPECT_THROW(batch_graphs(mixed, 2), ShapeError);
}

}  // namespace
}  // namespace gnnflow
