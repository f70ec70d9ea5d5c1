#ifndef GNNFLOW_PHASE_ENGINE_HPP_
#define GNNFLOW_PHASE_ENGINE_HPP_

#include <array>
#include <cstdint>
#include <string_view>
#include <vector>

#include "gnnflow/graph.hpp"
#include "gnnflow/taxonomy.hpp"

namespace gnnflow {

// Operand categories of the global-buffer breakdown.
enum class Operand { Adj, Inp, Int, Wt, Op, Psum };
inline constexpr std::size_t kNumOperands = 6;
inline constexpr std::array<Operand, kNumOperands> kOperands = {
    Operand::Adj, Operand::Inp, Operand::Int, Operand::Wt, Operand::Op, Operand::Psum};
std::string_view to_string(Operand o);

using OperandCounts = std::array<std::uint64_t, kNumOperands>;

struct AccessCounts {
  OperandCounts gb_reads{};
  OperandCounts gb_writes{};
  OperandCounts l1_reads{};
  OperandCounts l1_writes{};

  AccessCounts& operator+=(const AccessCounts& o);
  bool operator==(const AccessCounts&) const = default;
};

inline std::uint64_t& at(OperandCounts& c, Operand o) { return c[static_cast<std::size_t>(o)]; }
inline std::uint64_t at(const OperandCounts& c, Operand o) { return c[static_cast<std::size_t>(o)]; }
std::uint64_t total(const OperandCounts& c);

struct HardwareConfig {
  std::uint64_t pe_count = 512;
  // Cycles to multicast one tile's operands onto the PEs.
  std::uint64_t distribution_latency = 1;
  // Elements per cycle into PE-local buffers; 0 means pe_count.
  std::uint64_t fill_bandwidth = 0;

  std::uint64_t effective_fill_bandwidth() const {
    return fill_bandwidth ? fill_bandwidth : pe_count;
  }
};

struct PhaseCost {
  std::uint64_t cycles = 0;
  std::uint64_t mac_count = 0;
  std::uint64_t pe_count = 1;
  AccessCounts access;

  // mac_count / (cycles * pe_count); 0 for an empty phase.
  double utilization() const;
  PhaseCost& operator+=(const PhaseCost& o);
};

// Which operand categories a phase reads and produces. With order AC the
// aggregation turns Inp into Int and the combination turns Int into Op.
struct PhaseRoles {
  Operand input = Operand::Inp;
  Operand output = Operand::Int;
};

// Cycle model of one aggregation (SpMM) pass over `features` feature
// columns. Vertex tiles of t_v_agg consecutive vertices run one after
// another; a tile takes max_v ceil(deg(v)/t_n) * ceil(features/t_f_agg)
// steps plus distribution_latency plus ceil(log2 t_n) adder-tree fill.
// Throws ConfigError if the tiles do not fit hw.pe_count.
PhaseCost aggregation_cost(const CsrGraph& g, std::uint64_t features, const LoopSpec& loops,
                           const TileConfig& tiles, const HardwareConfig& hw,
                           PhaseRoles roles = {Operand::Inp, Operand::Int});

// Cycle model of one combination (GEMM) V x F times F x G. Each of the
// ceil(V/t_v) * ceil(G/t_g) output tiles streams ceil(F/t_f) steps after
// distribution_latency plus ceil(log2 t_f) tree fill when F is spatial.
PhaseCost combination_cost(std::uint64_t v, std::uint64_t f, std::uint64_t g,
                           const LoopSpec& loops, const TileConfig& tiles,
                           const HardwareConfig& hw,
                           PhaseRoles roles = {Operand::Int, Operand::Op});

// A rectangular piece of the intermediate matrix.
struct Block {
  std::uint64_t row_begin = 0, row_end = 0;
  std::uint64_t col_begin = 0, col_end = 0;
  std::uint64_t rows() const { return row_end - row_begin; }
  std::uint64_t cols() const { return col_end - col_begin; }
  std::uint64_t elements() const { return rows() * cols(); }
  bool operator==(const Block&) const = default;
};

// Pipeline units over a rows x cols intermediate matrix: row_tile rows
// (Row), col_tile columns (Column) or row_tile x col_tile blocks (Element,
// column-major when `column_major`).
std::vector<Block> partition_intermediate(std::uint64_t rows, std::uint64_t cols,
                                          Granularity granularity, std::uint64_t row_tile,
                                          std::uint64_t col_tile, bool column_major = false);

struct UnitCosts {
  std::vector<PhaseCost> units;
  std::vector<Block> blocks;
  // Elements of the intermediate matrix per full unit.
  std::uint64_t ppel = 0;
  std::uint64_t total_cycles() const;
  std::uint64_t total_macs() const;
};

// Per-unit costs of the phase that produces or consumes each block of the
// intermediate matrix, for parallel-pipeline composition.
//  - aggregation with order AC: block rows are vertices, columns features.
//  - aggregation with order CA: block rows are neighbor (source) vertices;
//    each unit scatters into every vertex that lists them, costed on the
//    transposed graph with the roles of t_v_agg and t_n swapped.
//  - combination: block rows are vertices; columns are input features (AC)
//    or output features (CA).
UnitCosts aggregation_unit_costs(const CsrGraph& g, std::uint64_t features,
                                 const DataflowSpec& spec, const HardwareConfig& hw,
                                 const std::vector<Block>& blocks, PhaseRoles roles);
UnitCosts combination_unit_costs(std::uint64_t v, std::uint64_t f, std::uint64_t g,
                                 const DataflowSpec& spec, const HardwareConfig& hw,
                                 const std::vector<Block>& blocks, PhaseRoles roles);

std::uint64_t ceil_div(std::uint64_t a, std::uint64_t b);
std::uint64_t ceil_log2(std::uint64_t x);

}  // namespace gnnflow

#endif  // GNNFLOW_PHASE_ENGINE_HPP_
