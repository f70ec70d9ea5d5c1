#ifndef GNNFLOW_CONFIGS_HPP_
#define GNNFLOW_CONFIGS_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gnnflow/taxonomy.hpp"

namespace gnnflow {

// How strongly a configuration parallelizes the vertex dimension of a phase.
// Low/High correspond to the "lower"/"higher" row granularities of the
// parallel-pipeline configurations.
enum class VertexEmphasis { Default, Low, Relative, High };

struct BuiltinConfig {
  std::string name;         // compact name, e.g. "Seq-Nt"
  std::string notation;     // taxonomy string with x subscripts left free
  std::string description;
  DataflowSpec spec;        // tiles unset
  VertexEmphasis agg_vertex = VertexEmphasis::Default;
  VertexEmphasis cmb_vertex = VertexEmphasis::Default;
};

// The nine representative configurations used for evaluation, all order AC
// with V outermost. PP ones use row granularity.
const std::vector<BuiltinConfig>& builtin_configs();

// Exact (case-sensitive) lookup by compact name.
std::optional<BuiltinConfig> find_builtin(std::string_view name);

// Which free dimension an `x` subscript gets first when tiles are derived.
enum class TilePolicy {
  // Feature dims are sized up to their extent first and V takes the rest.
  FeatureFirst,
  // V then F (aggregation) / V then G (combination) fill the budget.
  VertexFirst,
};

std::string_view to_string(TilePolicy p);
TilePolicy tile_policy_from_string(std::string_view s);

struct WorkloadShape {
  std::uint64_t num_vertices = 1;
  std::uint64_t in_features = 1;   // F
  std::uint64_t out_features = 1;  // G
  double avg_degree = 1.0;
};

struct TileHints {
  VertexEmphasis agg_vertex = VertexEmphasis::Default;
  VertexEmphasis cmb_vertex = VertexEmphasis::Default;
  TilePolicy policy = TilePolicy::FeatureFirst;
};

// Power-of-two tile sizes that respect every subscript of `spec`, the
// inter-phase rules (equal tiles for EnGN-like SP), and the per-phase PE
// budgets, aiming for full mapping efficiency. Spatial reduction dims get
// the largest power of two not above the average degree (at least 2).
TileConfig derive_tiles(const DataflowSpec& spec, const WorkloadShape& shape,
                        std::uint64_t pe_budget_agg, std::uint64_t pe_budget_cmb,
                        const TileHints& hints = {});

std::uint64_t pow2_floor(std::uint64_t x);
std::uint64_t pow2_ceil(std::uint64_t x);

}  // namespace gnnflow

#endif  // GNNFLOW_CONFIGS_HPP_
