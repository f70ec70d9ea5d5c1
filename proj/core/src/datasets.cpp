#include "gnnflow/datasets.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "gnnflow/error.hpp"

namespace gnnflow {

const std::vector<DatasetDescriptor>& builtin_datasets() {
  static const std::vector<DatasetDescriptor> kRegistry = {
      {"Mutag", 188, 17.93, 19.79, 28},
      {"Proteins", 1113, 39.06, 72.82, 29},
      {"Imdb-bin", 1000, 19.77, 96.53, 136},
      {"Reddit-bin", 2000, 429.63, 497.75, 3782},
      {"Collab", 5000, 74.49, 2457.78, 492},
      {"Citeseer", 1, 3327, 9464, 3703},
      {"Cora", 1, 2708, 10858, 1433},
  };
  return kRegistry;
}

std::optional<DatasetDescriptor> find_dataset(const std::vector<DatasetDescriptor>& registry,
                                              std::string_view name) {
  auto lower = [](std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
  };
  const std::string key = lower(name);
  for (const auto& d : registry)
    if (lower(d.name) == key) return d;
  return std::nullopt;
}

std::vector<DatasetDescriptor> parse_dataset_registry(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("dataset registry: ") + e.what());
  }
  if (!doc.is_array()) throw ConfigError("dataset registry must be a JSON array");
  std::vector<DatasetDescriptor> out;
  for (const auto& rec : doc) {
    try {
      DatasetDescriptor d{rec.at("name").get<std::string>(),
                          rec.at("num_graphs").get<std::uint64_t>(),
                          rec.at("avg_nodes").get<double>(),
                          rec.at("avg_edges").get<double>(),
                          rec.at("num_features").get<std::uint32_t>()};
      if (d.num_graphs == 0 || d.avg_nodes <= 0 || d.avg_edges <= 0 || d.num_features == 0)
        throw ConfigError("dataset '" + d.name + "' has a non-positive count");
      out.push_back(std::move(d));
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("dataset registry record: ") + e.what());
    }
  }
  return out;
}

std::vector<DatasetDescriptor> load_dataset_registry(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open dataset registry " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_dataset_registry(buf.str());
}

CsrGraph dataset_graph(const DatasetDescriptor& d, const DatasetGraphOptions& opts) {
  const double degree = d.avg_edges / d.avg_nodes;
  auto make = [&](std::uint64_t nodes, std::uint64_t seed) {
    SyntheticSpec spec;
    spec.num_vertices = nodes;
    spec.num_features = d.num_features;
    spec.avg_degree = std::min(degree, static_cast<double>(nodes));
    spec.model = opts.model;
    spec.seed = seed;
    CsrGraph g = generate_synthetic(spec);
    return opts.add_self_loops ? with_self_loops(g) : g;
  };
  if (!d.graph_classification())
    return make(static_cast<std::uint64_t>(std::llround(d.avg_nodes)), opts.seed);

  const std::size_t count = std::min<std::uint64_t>(opts.batch_size, d.num_graphs);
  std::vector<CsrGraph> graphs;
  graphs.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    // Spread the fractional average so the batch totals round(count * avg).
    const auto lo = static_cast<std::uint64_t>(std::llround(static_cast<double>(i) * d.avg_nodes));
    const auto hi = static_cast<std::uint64_t>(std::llround(static_cast<double>(i + 1) * d.avg_nodes));
    graphs.push_back(make(std::max<std::uint64_t>(1, hi - lo), opts.seed * 1000003ULL + i));
  }
  return batch_graphs(graphs, count);
}

}  // namespace gnnflow
