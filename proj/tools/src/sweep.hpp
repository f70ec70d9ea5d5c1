#ifndef GNNFLOW_TOOLS_SWEEP_HPP_
#define GNNFLOW_TOOLS_SWEEP_HPP_

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gnnflow/configs.hpp"
#include "gnnflow/energy.hpp"
#include "gnnflow/graph.hpp"
#include "gnnflow/taxonomy.hpp"

namespace gnnflow::cli {

struct DatasetEntry {
  enum class Kind { Registry, File, Synthetic };
  Kind kind = Kind::Registry;
  std::string name;
  std::filesystem::path path;  // File
  std::uint64_t features = 1;  // File
  SyntheticSpec synthetic;     // Synthetic
};

struct DataflowEntry {
  std::string name;  // builtin name, or the notation itself
  DataflowSpec spec;
  VertexEmphasis agg_vertex = VertexEmphasis::Default;
  VertexEmphasis cmb_vertex = VertexEmphasis::Default;
};

struct HwSection {
  std::uint64_t pe_count = 512;
  // PE split for parallel pipelines; defaults to an even split.
  std::optional<std::array<std::uint64_t, 2>> pp_split;
  std::uint64_t distribution_latency = 1;
  std::uint64_t fill_bandwidth = 0;
};

struct LayerSection {
  std::uint64_t out_features = 16;  // G
  std::uint64_t batch_size = 64;
  bool self_loops = true;
  std::uint64_t seed = 1;
  DegreeModel degree_model = DegreeModel::Skewed;
};

struct OutputSection {
  std::optional<std::filesystem::path> csv;
  // Chart kind -> SVG path, written after the rows.
  std::map<std::string, std::filesystem::path> charts;
};

struct SweepConfig {
  std::vector<DatasetEntry> datasets;
  std::vector<DataflowEntry> dataflows;
  // Explicit tile tuples; combined with tile_grid when both are present.
  std::vector<TileConfig> tiles;
  // Per-field candidate lists in tuple order; empty lists mean "derived".
  std::array<std::vector<std::uint64_t>, 6> tile_grid;
  TilePolicy tile_policy = TilePolicy::FeatureFirst;
  HwSection hw;
  LayerSection layer;
  EnergyModel energy;
  OutputSection output;
  std::string baseline = "Seq-Nt";
  std::optional<std::filesystem::path> registry;
};

// Parses the JSON config. Relative paths resolve against `base_dir`.
// Throws ConfigError (and SyntaxError/SemanticError for dataflow strings).
SweepConfig parse_sweep_config(const std::string& json_text,
                               const std::filesystem::path& base_dir = {});
SweepConfig load_sweep_config(const std::filesystem::path& path);

// Resolves a dataflow reference: a builtin name or a notation string.
DataflowEntry resolve_dataflow(const std::string& ref);

inline constexpr std::array<const char*, 16> kBaseColumns = {
    "dataset", "dataflow", "t_v_agg", "t_n",     "t_f_agg",      "t_v_cmb",
    "t_g",     "t_f_cmb",  "cycles",  "t_agg",   "t_cmb",        "t_load",
    "buffer_inter", "utilization", "energy_pj", "norm_runtime"};

// Full CSV header: the base columns then one energy column per
// (level, direction, operand), e.g. gb_read_adj.
std::vector<std::string> csv_header();
std::string energy_column(Level l, Direction d, Operand o);

struct Row {
  std::string dataset;
  std::string dataflow;
  TileConfig tiles;
  std::uint64_t cycles = 0, t_agg = 0, t_cmb = 0, t_load = 0, buffer_inter = 0;
  double utilization = 0.0;
  EnergyReport energy;
  double norm_runtime = 0.0;
};

enum class SweepMode {
  // Every row must be legal; an illegal one aborts the run.
  Strict,
  // Illegal tile points are skipped.
  SkipIllegal,
};

struct SweepResult {
  std::vector<Row> rows;
  std::uint64_t skipped = 0;
};

// Evaluates every (dataset, dataflow, tile tuple) row, possibly on several
// threads, and returns them in config order. `threads` = 0 picks
// hardware_concurrency. Throws IllegalDataflowError in Strict mode.
SweepResult run_sweep(const SweepConfig& cfg, SweepMode mode, unsigned threads);

// Worker count from SIM_THREADS (unset or 0 means automatic).
unsigned threads_from_env();

std::string format_csv(const std::vector<Row>& rows);

}  // namespace gnnflow::cli

#endif  // GNNFLOW_TOOLS_SWEEP_HPP_
