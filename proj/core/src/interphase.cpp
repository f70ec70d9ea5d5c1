#include "gnnflow/interphase.hpp"

#include <algorithm>

namespace gnnflow {

namespace {

std::string describe(const ValidationReport& r) {
  std::string s = "illegal dataflow";
  for (const auto& v : r.violations) s += "\n  [" + v.rule + "] " + v.message;
  return s;
}

bool is_ac(const DataflowSpec& spec) { return spec.order == PhaseOrder::AC; }

// Producer tile of the intermediate matrix along its rows and columns.
std::pair<std::uint64_t, std::uint64_t> producer_tile(const DataflowSpec& spec) {
  const TileConfig& t = spec.tiles.value();
  return is_ac(spec) ? std::pair{t.t_v_agg, t.t_f_agg} : std::pair{t.t_v_cmb, t.t_g};
}

bool producer_column_major(const DataflowSpec& spec) {
  const auto axes = intermediate_axes(spec.order);
  if (is_ac(spec))
    return spec.agg.position(axes.agg_col).value() < spec.agg.position(axes.agg_row).value();
  return spec.cmb.position(axes.cmb_col).value() < spec.cmb.position(axes.cmb_row).value();
}

void drop_intermediate(AccessCounts& a) {
  at(a.gb_reads, Operand::Int) = 0;
  at(a.gb_writes, Operand::Int) = 0;
}

PhaseCost sum_units(const UnitCosts& u, std::uint64_t pe_count) {
  PhaseCost total;
  total.pe_count = pe_count;
  for (const auto& c : u.units) total += c;
  return total;
}

}  // namespace

IllegalDataflowError::IllegalDataflowError(ValidationReport report)
    : Error(describe(report)), report_(std::move(report)) {}

std::uint64_t buffer_requirement(const DataflowSpec& spec, std::uint64_t num_vertices,
                                 std::uint64_t f_intermediate) {
  switch (spec.inter.kind) {
    case InterKind::Seq: return num_vertices * f_intermediate;
    case InterKind::SpArbitrary: return row_tile_max(spec) * col_tile_max(spec);
    case InterKind::SpEngn: return 0;
    case InterKind::PP: break;
  }
  switch (spec.inter.granularity.value_or(Granularity::Row)) {
    case Granularity::Element: return 2 * row_tile_max(spec) * col_tile_max(spec);
    case Granularity::Row: return 2 * row_tile_max(spec) * f_intermediate;
    case Granularity::Column: return 2 * num_vertices * col_tile_max(spec);
  }
  return 0;
}

std::vector<UnitSpan> pipeline_timeline(const std::vector<std::uint64_t>& producer,
                                        const std::vector<std::uint64_t>& consumer) {
  if (producer.size() != consumer.size())
    throw CompositionError("pipeline has " + std::to_string(producer.size()) +
                           " producer units but " + std::to_string(consumer.size()) +
                           " consumer units");
  std::vector<UnitSpan> out(producer.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    UnitSpan& s = out[i];
    s.producer_start = i > 0 ? out[i - 1].producer_end : 0;
    if (i > 1) s.producer_start = std::max(s.producer_start, out[i - 2].consumer_end);
    s.producer_end = s.producer_start + producer[i];
    s.consumer_start = s.producer_end;
    if (i > 0) s.consumer_start = std::max(s.consumer_start, out[i - 1].consumer_end);
    s.consumer_end = s.consumer_start + consumer[i];
  }
  return out;
}

std::vector<UnitSpan> pipeline_timeline(const UnitCosts& producer, const UnitCosts& consumer) {
  std::vector<std::uint64_t> p, c;
  for (const auto& u : producer.units) p.push_back(u.cycles);
  for (const auto& u : consumer.units) c.push_back(u.cycles);
  return pipeline_timeline(p, c);
}

std::uint64_t intermediate_load_cycles(const DataflowSpec& spec, std::uint64_t num_vertices,
                                       std::uint64_t f_intermediate, const HardwareConfig& hw) {
  const auto [tr, tc] = producer_tile(spec);
  const std::uint64_t bw = hw.effective_fill_bandwidth();
  if (bw == 0) throw ConfigError("fill bandwidth must be >= 1");
  // Full and ragged tile extents along each axis, with their counts.
  const std::pair<std::uint64_t, std::uint64_t> rows[] = {{tr, num_vertices / tr},
                                                          {num_vertices % tr, 1}};
  const std::pair<std::uint64_t, std::uint64_t> cols[] = {{tc, f_intermediate / tc},
                                                          {f_intermediate % tc, 1}};
  std::uint64_t cycles = 0;
  for (auto [r, nr] : rows)
    for (auto [c, nc] : cols)
      if (r > 0 && c > 0) cycles += nr * nc * ceil_div(r * c, bw);
  return cycles;
}

LayerCost run_layer(const LayerConfig& cfg) {
  if (!cfg.graph) throw ConfigError("layer has no graph");
  const DataflowSpec& spec = cfg.dataflow;
  if (!spec.tiles) throw ConfigError("layer dataflow has no tiles");
  ValidationReport report = validate(spec, cfg.hw_agg.pe_count, cfg.hw_cmb.pe_count);
  if (!report.legal) throw IllegalDataflowError(std::move(report));

  const CsrGraph& g = *cfg.graph;
  const std::uint64_t v = g.num_vertices();
  const std::uint64_t f = g.num_features();
  const std::uint64_t out_g = cfg.out_features;
  const bool ac = is_ac(spec);
  const std::uint64_t f_inter = ac ? f : out_g;
  const PhaseRoles agg_roles = ac ? PhaseRoles{Operand::Inp, Operand::Int}
                                  : PhaseRoles{Operand::Int, Operand::Op};
  const PhaseRoles cmb_roles = ac ? PhaseRoles{Operand::Int, Operand::Op}
                                  : PhaseRoles{Operand::Inp, Operand::Int};

  LayerCost out;
  out.buffer_inter = buffer_requirement(spec, v, f_inter);

  if (spec.inter.kind == InterKind::PP) {
    const auto blocks = partition_intermediate(
        v, f_inter, spec.inter.granularity.value_or(Granularity::Row), row_tile_max(spec),
        col_tile_max(spec), producer_column_major(spec));
    const UnitCosts a = aggregation_unit_costs(g, f_inter, spec, cfg.hw_agg, blocks, agg_roles);
    const UnitCosts c = combination_unit_costs(v, f, out_g, spec, cfg.hw_cmb, blocks, cmb_roles);
    out.agg = sum_units(a, cfg.hw_agg.pe_count);
    out.cmb = sum_units(c, cfg.hw_cmb.pe_count);
    out.timeline = ac ? pipeline_timeline(a, c) : pipeline_timeline(c, a);
    out.total_cycles = out.timeline.empty() ? 0 : out.timeline.back().consumer_end;
  } else {
    out.agg = aggregation_cost(g, f_inter, spec.agg, *spec.tiles, cfg.hw_agg, agg_roles);
    out.cmb = combination_cost(v, f, out_g, spec.cmb, *spec.tiles, cfg.hw_cmb, cmb_roles);
    out.total_cycles = out.agg.cycles + out.cmb.cycles;
    if (spec.inter.kind == InterKind::SpEngn) {
      const HardwareConfig& consumer_hw = ac ? cfg.hw_cmb : cfg.hw_agg;
      const std::uint64_t consumer_cycles = ac ? out.cmb.cycles : out.agg.cycles;
      out.t_load = std::min(intermediate_load_cycles(spec, v, f_inter, consumer_hw),
                            consumer_cycles);
      out.total_cycles -= out.t_load;
      drop_intermediate(out.agg.access);
      drop_intermediate(out.cmb.access);
    }
  }
  out.t_agg = out.agg.cycles;
  out.t_cmb = out.cmb.cycles;
  out.mac_count = out.agg.mac_count + out.cmb.mac_count;
  out.access = out.agg.access;
  out.access += out.cmb.access;
  return out;
}

}  // namespace gnnflow
