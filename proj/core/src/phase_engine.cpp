#include "gnnflow/phase_engine.hpp"

#include <algorithm>
#include <bit>

#include "gnnflow/error.hpp"

namespace gnnflow {

std::string_view to_string(Operand o) {
  switch (o) {
    case Operand::Adj: return "Adj";
    case Operand::Inp: return "Inp";
    case Operand::Int: return "Int";
    case Operand::Wt: return "Wt";
    case Operand::Op: return "Op";
    case Operand::Psum: return "Psum";
  }
  return "?";
}

AccessCounts& AccessCounts::operator+=(const AccessCounts& o) {
  for (std::size_t i = 0; i < kNumOperands; ++i) {
    gb_reads[i] += o.gb_reads[i];
    gb_writes[i] += o.gb_writes[i];
    l1_reads[i] += o.l1_reads[i];
    l1_writes[i] += o.l1_writes[i];
  }
  return *this;
}

std::uint64_t total(const OperandCounts& c) {
  std::uint64_t s = 0;
  for (auto x : c) s += x;
  return s;
}

double PhaseCost::utilization() const {
  if (cycles == 0 || pe_count == 0) return 0.0;
  return static_cast<double>(mac_count) /
         (static_cast<double>(cycles) * static_cast<double>(pe_count));
}

PhaseCost& PhaseCost::operator+=(const PhaseCost& o) {
  cycles += o.cycles;
  mac_count += o.mac_count;
  access += o.access;
  return *this;
}

std::uint64_t ceil_div(std::uint64_t a, std::uint64_t b) { return (a + b - 1) / b; }

std::uint64_t ceil_log2(std::uint64_t x) {
  return x <= 1 ? 0 : static_cast<std::uint64_t>(std::bit_width(x - 1));
}

namespace {

// Aggregation over a vertex range, with dims named by role so the CA
// consumer (scatter over the transposed graph) can reuse it.
struct AggShape {
  std::uint64_t vertex_tile, reduce_tile, feature_tile;
  // Loop positions, outermost = 0.
  std::size_t vertex_pos, feature_pos, reduce_pos;
};

void check_fit(std::uint64_t a, std::uint64_t b, std::uint64_t c, const HardwareConfig& hw,
               Phase phase) {
  if (a == 0 || b == 0 || c == 0)
    throw ConfigError(std::string(to_string(phase)) + " tile sizes must be >= 1");
  if (hw.pe_count == 0) throw ConfigError("pe_count must be >= 1");
  if (a * b * c > hw.pe_count)
    throw ConfigError(std::string(to_string(phase)) + " tiles need " + std::to_string(a * b * c) +
                      " PEs but only " + std::to_string(hw.pe_count) + " are available");
}

PhaseCost aggregate_range(const CsrGraph& g, std::uint64_t v_begin, std::uint64_t v_end,
                          std::uint64_t features, const AggShape& s, const HardwareConfig& hw,
                          PhaseRoles roles) {
  PhaseCost cost;
  cost.pe_count = hw.pe_count;
  const std::uint64_t f_steps = ceil_div(features, s.feature_tile);
  const std::uint64_t overhead =
      hw.distribution_latency + (s.reduce_tile > 1 ? ceil_log2(s.reduce_tile) : 0);

  std::uint64_t edges = 0;
  std::uint64_t reduce_steps = 0;  // sum over vertices of ceil(deg / reduce_tile)
  for (std::uint64_t t0 = v_begin; t0 < v_end; t0 += s.vertex_tile) {
    const std::uint64_t t1 = std::min(v_end, t0 + s.vertex_tile);
    std::uint64_t worst = 0;
    for (std::uint64_t v = t0; v < t1; ++v) {
      const std::uint64_t d = g.degree(v);
      const std::uint64_t steps = ceil_div(d, s.reduce_tile);
      worst = std::max(worst, steps);
      edges += d;
      reduce_steps += steps;
    }
    cost.cycles += worst * f_steps + overhead;
  }
  cost.mac_count = edges * features;

  const std::uint64_t vertices = v_end - v_begin;
  const std::uint64_t v_trips = ceil_div(vertices, s.vertex_tile);
  auto& a = cost.access;
  a.l1_reads[static_cast<std::size_t>(roles.input)] = 2 * cost.mac_count;
  a.l1_writes[static_cast<std::size_t>(roles.output)] = reduce_steps * features;

  // The CSR rows are walked again for every feature pass enclosing the
  // neighbor loop.
  const bool rewalk = s.feature_pos < s.reduce_pos && f_steps > 1;
  at(a.gb_reads, Operand::Adj) = (vertices + 1) + edges * (rewalk ? f_steps : 1);
  at(a.gb_reads, roles.input) = edges * features;
  at(a.gb_writes, roles.output) = vertices * features;
  // Partial sums leave the PEs when an output dim with several tiles is
  // iterated inside the reduction loop.
  const bool spill = (s.reduce_pos < s.vertex_pos && v_trips > 1) ||
                     (s.reduce_pos < s.feature_pos && f_steps > 1);
  if (spill) {
    // Every reduction step after a vertex's first one round-trips a psum.
    std::uint64_t extra = 0;
    for (std::uint64_t v = v_begin; v < v_end; ++v) {
      const std::uint64_t steps = ceil_div(g.degree(v), s.reduce_tile);
      extra += steps > 0 ? steps - 1 : 0;
    }
    at(a.gb_writes, Operand::Psum) = extra * features;
    at(a.gb_reads, Operand::Psum) = extra * features;
  }
  return cost;
}

AggShape agg_shape(const LoopSpec& loops, const TileConfig& t) {
  return {t.t_v_agg, t.t_n, t.t_f_agg, loops.position(Dim::V).value(),
          loops.position(Dim::F).value(), loops.position(Dim::N).value()};
}

// The CA consumer scatters each source row: the neighbor dim plays the
// vertex role and V becomes the reduction-like dim.
AggShape scatter_shape(const LoopSpec& loops, const TileConfig& t) {
  return {t.t_n, t.t_v_agg, t.t_f_agg, loops.position(Dim::N).value(),
          loops.position(Dim::F).value(), loops.position(Dim::V).value()};
}

PhaseCost combine(std::uint64_t v, std::uint64_t f, std::uint64_t g, const LoopSpec& loops,
                  const TileConfig& t, const HardwareConfig& hw, PhaseRoles roles) {
  PhaseCost cost;
  cost.pe_count = hw.pe_count;
  const std::uint64_t v_trips = ceil_div(v, t.t_v_cmb);
  const std::uint64_t g_trips = ceil_div(g, t.t_g);
  const std::uint64_t f_trips = ceil_div(f, t.t_f_cmb);
  const std::uint64_t outer_tiles = v_trips * g_trips;
  const std::uint64_t overhead =
      hw.distribution_latency + (t.t_f_cmb > 1 ? ceil_log2(t.t_f_cmb) : 0);
  cost.cycles = outer_tiles * f_trips + (f_trips > 0 ? outer_tiles * overhead : 0);
  cost.mac_count = v * f * g;

  const std::size_t pv = loops.position(Dim::V).value();
  const std::size_t pg = loops.position(Dim::G).value();
  const std::size_t pf = loops.position(Dim::F).value();
  struct Trip {
    std::size_t pos;
    std::uint64_t trips;
  };
  // Re-fetch factor of an operand: trips of its irrelevant loop when that
  // loop encloses a relevant loop that has more than one tile.
  auto refetch = [](Trip irrelevant, Trip r1, Trip r2) -> std::uint64_t {
    const bool inner_multi =
        (r1.trips > 1 && r1.pos > irrelevant.pos) || (r2.trips > 1 && r2.pos > irrelevant.pos);
    return inner_multi ? irrelevant.trips : 1;
  };
  const Trip tv{pv, v_trips}, tg{pg, g_trips}, tf{pf, f_trips};

  auto& a = cost.access;
  a.l1_reads[static_cast<std::size_t>(roles.input)] = cost.mac_count;
  at(a.l1_reads, Operand::Wt) = cost.mac_count;
  a.l1_writes[static_cast<std::size_t>(roles.output)] = v * g * f_trips;
  at(a.gb_reads, Operand::Wt) = f * g * refetch(tv, tf, tg);
  at(a.gb_reads, roles.input) = v * f * refetch(tg, tv, tf);
  at(a.gb_writes, roles.output) = v * g;
  const bool spill = f_trips > 1 && ((tv.trips > 1 && pv > pf) || (tg.trips > 1 && pg > pf));
  if (spill) {
    at(a.gb_writes, Operand::Psum) = v * g * (f_trips - 1);
    at(a.gb_reads, Operand::Psum) = v * g * (f_trips - 1);
  }
  return cost;
}

}  // namespace

PhaseCost aggregation_cost(const CsrGraph& g, std::uint64_t features, const LoopSpec& loops,
                           const TileConfig& tiles, const HardwareConfig& hw, PhaseRoles roles) {
  check_fit(tiles.t_v_agg, tiles.t_n, tiles.t_f_agg, hw, Phase::Aggregation);
  return aggregate_range(g, 0, g.num_vertices(), features, agg_shape(loops, tiles), hw, roles);
}

PhaseCost combination_cost(std::uint64_t v, std::uint64_t f, std::uint64_t g,
                           const LoopSpec& loops, const TileConfig& tiles,
                           const HardwareConfig& hw, PhaseRoles roles) {
  check_fit(tiles.t_v_cmb, tiles.t_g, tiles.t_f_cmb, hw, Phase::Combination);
  return combine(v, f, g, loops, tiles, hw, roles);
}

std::vector<Block> partition_intermediate(std::uint64_t rows, std::uint64_t cols,
                                          Granularity granularity, std::uint64_t row_tile,
                                          std::uint64_t col_tile, bool column_major) {
  std::vector<Block> out;
  if (rows == 0 || cols == 0) return out;
  if (row_tile == 0 || col_tile == 0) throw ConfigError("pipeline unit tiles must be >= 1");
  switch (granularity) {
    case Granularity::Row:
      for (std::uint64_t r = 0; r < rows; r += row_tile)
        out.push_back({r, std::min(rows, r + row_tile), 0, cols});
      break;
    case Granularity::Column:
      for (std::uint64_t c = 0; c < cols; c += col_tile)
        out.push_back({0, rows, c, std::min(cols, c + col_tile)});
      break;
    case Granularity::Element:
      if (column_major) {
        for (std::uint64_t c = 0; c < cols; c += col_tile)
          for (std::uint64_t r = 0; r < rows; r += row_tile)
            out.push_back({r, std::min(rows, r + row_tile), c, std::min(cols, c + col_tile)});
      } else {
        for (std::uint64_t r = 0; r < rows; r += row_tile)
          for (std::uint64_t c = 0; c < cols; c += col_tile)
            out.push_back({r, std::min(rows, r + row_tile), c, std::min(cols, c + col_tile)});
      }
      break;
  }
  return out;
}

std::uint64_t UnitCosts::total_cycles() const {
  std::uint64_t s = 0;
  for (const auto& u : units) s += u.cycles;
  return s;
}

std::uint64_t UnitCosts::total_macs() const {
  std::uint64_t s = 0;
  for (const auto& u : units) s += u.mac_count;
  return s;
}

namespace {

std::uint64_t full_unit_elements(const std::vector<Block>& blocks) {
  return blocks.empty() ? 0 : blocks.front().elements();
}

}  // namespace

UnitCosts aggregation_unit_costs(const CsrGraph& g, std::uint64_t features,
                                 const DataflowSpec& spec, const HardwareConfig& hw,
                                 const std::vector<Block>& blocks, PhaseRoles roles) {
  const TileConfig& t = spec.tiles.value();
  check_fit(t.t_v_agg, t.t_n, t.t_f_agg, hw, Phase::Aggregation);
  UnitCosts out;
  out.blocks = blocks;
  out.ppel = full_unit_elements(blocks);
  if (spec.order == PhaseOrder::AC) {
    const AggShape shape = agg_shape(spec.agg, t);
    for (const auto& b : blocks) {
      if (b.col_end > features) throw ConfigError("block exceeds feature width");
      out.units.push_back(aggregate_range(g, b.row_begin, b.row_end, b.cols(), shape, hw, roles));
    }
  } else {
    const CsrGraph scattered = transpose(g);
    const AggShape shape = scatter_shape(spec.agg, t);
    for (const auto& b : blocks)
      out.units.push_back(
          aggregate_range(scattered, b.row_begin, b.row_end, b.cols(), shape, hw, roles));
  }
  return out;
}

UnitCosts combination_unit_costs(std::uint64_t v, std::uint64_t f, std::uint64_t g,
                                 const DataflowSpec& spec, const HardwareConfig& hw,
                                 const std::vector<Block>& blocks, PhaseRoles roles) {
  const TileConfig& t = spec.tiles.value();
  check_fit(t.t_v_cmb, t.t_g, t.t_f_cmb, hw, Phase::Combination);
  UnitCosts out;
  out.blocks = blocks;
  out.ppel = full_unit_elements(blocks);
  for (const auto& b : blocks) {
    if (b.row_end > v) throw ConfigError("block exceeds vertex count");
    // AC: the block's columns are a slice of the reduction dim F.
    // CA: they are a slice of the output dim G.
    if (spec.order == PhaseOrder::AC)
      out.units.push_back(combine(b.rows(), b.cols(), g, spec.cmb, t, hw, roles));
    else
      out.units.push_back(combine(b.rows(), f, b.cols(), spec.cmb, t, hw, roles));
  }
  return out;
}

}  // namespace gnnflow
