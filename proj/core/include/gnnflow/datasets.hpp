#ifndef GNNFLOW_DATASETS_HPP_
#define GNNFLOW_DATASETS_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gnnflow/graph.hpp"

namespace gnnflow {

struct DatasetDescriptor {
  std::string name;
  std::uint64_t num_graphs = 1;
  double avg_nodes = 0.0;
  double avg_edges = 0.0;
  std::uint32_t num_features = 0;

  bool graph_classification() const { return num_graphs > 1; }
  bool operator==(const DatasetDescriptor&) const = default;
};

// The seven GCN workloads used throughout the evaluation: five TU graph
// classification sets and two Planetoid citation graphs.
const std::vector<DatasetDescriptor>& builtin_datasets();

// Case-insensitive lookup in `registry`.
std::optional<DatasetDescriptor> find_dataset(const std::vector<DatasetDescriptor>& registry,
                                              std::string_view name);

// JSON array of {"name","num_graphs","avg_nodes","avg_edges","num_features"}.
// Throws ConfigError on schema errors or non-positive counts.
std::vector<DatasetDescriptor> load_dataset_registry(const std::filesystem::path& path);
std::vector<DatasetDescriptor> parse_dataset_registry(std::string_view json_text);

struct DatasetGraphOptions {
  std::size_t batch_size = 64;
  DegreeModel model = DegreeModel::Skewed;
  bool add_self_loops = true;
  std::uint64_t seed = 1;
};

// Synthetic graph with the descriptor's statistics. Graph-classification sets
// become a block-diagonal batch of `batch_size` graphs whose node counts
// average avg_nodes; node-classification sets become one graph of avg_nodes
// vertices. Average degree is avg_edges / avg_nodes (capped by graph size).
CsrGraph dataset_graph(const DatasetDescriptor& d, const DatasetGraphOptions& opts);

}  // namespace gnnflow

#endif  // GNNFLOW_DATASETS_HPP_
