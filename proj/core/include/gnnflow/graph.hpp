#ifndef GNNFLOW_GRAPH_HPP_
#define GNNFLOW_GRAPH_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gnnflow {

using VertexId = std::uint32_t;
using EdgeOffset = std::uint64_t;

// Adjacency structure in compressed sparse row form. Row v lists the
// neighbors whose features vertex v aggregates. Values are implicitly 1.
class CsrGraph {
 public:
  CsrGraph() : vertex_array_{0} {}

  // Throws ShapeError if the arrays violate the CSR invariants.
  CsrGraph(std::vector<EdgeOffset> vertex_array, std::vector<VertexId> edge_array,
           std::uint32_t num_features);

  std::uint64_t num_vertices() const { return vertex_array_.size() - 1; }
  std::uint64_t num_edges() const { return edge_array_.size(); }
  std::uint32_t num_features() const { return num_features_; }

  std::span<const EdgeOffset> vertex_array() const { return vertex_array_; }
  std::span<const VertexId> edge_array() const { return edge_array_; }

  std::uint64_t degree(std::uint64_t v) const {
    return vertex_array_[v + 1] - vertex_array_[v];
  }
  std::span<const VertexId> neighbors(std::uint64_t v) const {
    return std::span<const VertexId>(edge_array_).subspan(
        vertex_array_[v], degree(v));
  }
  std::uint64_t max_degree() const;

  bool operator==(const CsrGraph&) const = default;

 private:
  std::vector<EdgeOffset> vertex_array_;
  std::vector<VertexId> edge_array_;
  std::uint32_t num_features_ = 0;
};

struct DegreeStats {
  std::uint64_t min_degree = 0;
  std::uint64_t max_degree = 0;
  double avg_degree = 0.0;
  std::uint64_t total_edges = 0;
};

DegreeStats degree_stats(const CsrGraph& g);

// Builds a CSR graph from (row, neighbor) pairs over V vertices. Duplicate
// pairs are removed and each row is sorted.
CsrGraph build_csr(std::uint64_t num_vertices,
                   std::vector<std::pair<VertexId, VertexId>> edges,
                   std::uint32_t num_features);

// Returns g with (v, v) present for every v. Idempotent.
CsrGraph with_self_loops(const CsrGraph& g);

// Transposed adjacency: row n lists every v that has n as a neighbor.
CsrGraph transpose(const CsrGraph& g);

struct EdgeListOptions {
  std::uint32_t num_features = 1;
  bool add_self_loops = true;
  // When set, ids must lie in [0, num_vertices) and are kept as-is.
  // Otherwise the distinct ids seen are renumbered densely in ascending order.
  std::optional<std::uint64_t> num_vertices;
};

// Reads whitespace-separated "src dst" pairs, one per line. Lines whose first
// non-blank character is '#' are ignored. Throws ParseError or RangeError.
CsrGraph read_edge_list(std::istream& in, const EdgeListOptions& opts);
CsrGraph load_edge_list(const std::filesystem::path& path,
                        const EdgeListOptions& opts);

// Writes one "v n" line per CSR entry, preceded by a '#' header.
void write_edge_list(const CsrGraph& g, std::ostream& out);

enum class DegreeModel { UniformRandom, FixedDegree, Skewed };

std::string_view to_string(DegreeModel m);
// Accepts "uniform-random", "fixed-degree", "skewed". Throws ConfigError.
DegreeModel degree_model_from_string(std::string_view s);

struct SyntheticSpec {
  std::uint64_t num_vertices = 1;
  std::uint32_t num_features = 1;
  double avg_degree = 1.0;
  DegreeModel model = DegreeModel::UniformRandom;
  std::uint64_t seed = 0;
};

// Deterministic for a given spec. Self loops are not added; neighbors are
// drawn without replacement so rows never repeat a vertex.
//  - UniformRandom: round(V*D) distinct (row, neighbor) cells drawn uniformly.
//  - FixedDegree: every row has exactly round(D) neighbors.
//  - Skewed: row degrees follow a power law with exponent 2 truncated to
//    [1, V], rescaled to mean D.
// Throws InfeasibleError when D > V and ConfigError when V == 0 or D < 0.
CsrGraph generate_synthetic(const SyntheticSpec& spec);

// Block-diagonal union of the first batch_size graphs (all of them if fewer).
// Throws ShapeError on an empty list, batch_size == 0, or mismatched
// feature counts.
CsrGraph batch_graphs(std::span<const CsrGraph> graphs, std::size_t batch_size);

}  // namespace gnnflow

#endif  // GNNFLOW_GRAPH_HPP_
