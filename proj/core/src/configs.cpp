#include "gnnflow/configs.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "gnnflow/error.hpp"

namespace gnnflow {

namespace {

BuiltinConfig make(std::string name, std::string notation, std::string description,
                   VertexEmphasis agg_v = VertexEmphasis::Default,
                   VertexEmphasis cmb_v = VertexEmphasis::Default) {
  BuiltinConfig c;
  c.spec = parse_dataflow(notation);
  c.name = std::move(name);
  c.notation = std::move(notation);
  c.description = std::move(description);
  c.agg_vertex = agg_v;
  c.cmb_vertex = cmb_v;
  return c;
}

}  // namespace

const std::vector<BuiltinConfig>& builtin_configs() {
  using E = VertexEmphasis;
  static const std::vector<BuiltinConfig> kConfigs = {
      make("Seq-Nt", "Seq_AC(V_x F_x N_t, V_x G_x F_x)",
           "Sequential, temporal aggregation"),
      make("Seq-Ns", "Seq_AC(V_x F_x N_s, V_x G_x F_x)",
           "Sequential, spatial aggregation"),
      make("SP-FsNt-Fs", "SP_AC(V_x F_s N_t, V_x F_s G_x)",
           "EnGN-like sequential pipeline, temporal aggregation, relatively high T_F"),
      make("SP-VsNt-Vs", "SP_AC(V_s F_x N_t, V_s F_x G_x)",
           "EnGN-like sequential pipeline, temporal aggregation, relatively high T_V",
           E::Relative, E::Relative),
      make("PP-Nt-Vt/sl", "PP_AC(V_x F_x N_t, V_x G_x F_x)",
           "HyGCN-like parallel pipeline, temporal aggregation, lower row granularity",
           E::Default, E::Low),
      make("PP-Ns-Vt/sl", "PP_AC(V_x F_x N_s, V_x G_x F_x)",
           "Parallel pipeline, spatial aggregation, lower row granularity", E::Default, E::Low),
      make("PP-Nt-Vsh", "PP_AC(V_x F_x N_t, V_s G_x F_x)",
           "HyGCN-like parallel pipeline, temporal aggregation, higher row granularity",
           E::Default, E::High),
      make("PP-Ns-Vsh", "PP_AC(V_x F_x N_s, V_s G_x F_x)",
           "Parallel pipeline, spatial aggregation, higher row granularity", E::Default,
           E::High),
      make("High-Vs-SP", "SP_AC(V_s F_x N_t, V_s F_x G_x)", "Sequential pipeline with high T_V",
           E::High, E::High),
  };
  return kConfigs;
}

std::optional<BuiltinConfig> find_builtin(std::string_view name) {
  for (const auto& c : builtin_configs())
    if (c.name == name) return c;
  return std::nullopt;
}

std::string_view to_string(TilePolicy p) {
  return p == TilePolicy::FeatureFirst ? "feature-first" : "vertex-first";
}

TilePolicy tile_policy_from_string(std::string_view s) {
  if (s == "feature-first") return TilePolicy::FeatureFirst;
  if (s == "vertex-first") return TilePolicy::VertexFirst;
  throw ConfigError("unknown tile policy '" + std::string(s) + "'");
}

std::uint64_t pow2_floor(std::uint64_t x) { return x ? std::bit_floor(x) : 1; }
std::uint64_t pow2_ceil(std::uint64_t x) { return x ? std::bit_ceil(x) : 1; }

namespace {

// Target T_V for an emphasized vertex dim before the budget cap.
std::uint64_t emphasis_target(VertexEmphasis e) {
  switch (e) {
    case VertexEmphasis::Relative: return 16;
    case VertexEmphasis::High: return 128;
    default: return 1;
  }
}

// Greedy power-of-two sizing of one phase; dims are sized in call order and
// each takes what the earlier ones left of the budget.
class PhaseTiler {
 public:
  PhaseTiler(const LoopSpec& loops, std::uint64_t budget) : loops_(loops), budget_(budget) {}

  std::uint64_t remaining() const {
    std::uint64_t used = 1;
    for (auto& [d, t] : sizes_) used *= t;
    return std::max<std::uint64_t>(1, budget_ / used);
  }

  bool has(Dim d) const {
    return std::any_of(sizes_.begin(), sizes_.end(), [d](const auto& p) { return p.first == d; });
  }

  void pin(Dim d, std::uint64_t tile) { sizes_.emplace_back(d, std::max<std::uint64_t>(1, tile)); }

  Mapping mapping(Dim d) const { return loops_.at(d).mapping; }

  // Sizes d up to min(pow2_ceil(extent), cap, remaining budget); spatial dims
  // get at least 2.
  void grow(Dim d, std::uint64_t extent, std::uint64_t cap = UINT64_MAX) {
    if (has(d)) return;
    if (mapping(d) == Mapping::Temporal) {
      pin(d, 1);
      return;
    }
    // Leave a factor of 2 for every spatial dim still to be sized.
    std::uint64_t reserve = 1;
    for (const Loop& l : loops_.loops)
      if (l.dim != d && l.mapping == Mapping::Spatial && !has(l.dim)) reserve *= 2;
    const std::uint64_t room = std::max<std::uint64_t>(1, remaining() / reserve);
    std::uint64_t t = std::min({pow2_ceil(extent), cap, pow2_floor(room)});
    if (mapping(d) == Mapping::Spatial) t = std::max<std::uint64_t>(t, 2);
    pin(d, t);
  }

  std::uint64_t size(Dim d) const {
    for (auto& [dim, t] : sizes_)
      if (dim == d) return t;
    return 1;
  }

 private:
  const LoopSpec& loops_;
  std::uint64_t budget_;
  std::vector<std::pair<Dim, std::uint64_t>> sizes_;
};

void tile_aggregation(PhaseTiler& t, std::uint64_t v, std::uint64_t f, double avg_degree,
                      VertexEmphasis emph, TilePolicy policy) {
  if (t.mapping(Dim::N) == Mapping::Spatial) {
    const auto d = static_cast<std::uint64_t>(std::max(0.0, std::floor(avg_degree)));
    t.pin(Dim::N, std::max<std::uint64_t>(2, std::min(pow2_floor(d), pow2_floor(t.remaining()))));
  } else {
    t.pin(Dim::N, 1);
  }
  if (emph != VertexEmphasis::Default && emph != VertexEmphasis::Low) {
    t.grow(Dim::V, v, emphasis_target(emph));
    t.grow(Dim::F, f);
    return;
  }
  if (policy == TilePolicy::VertexFirst) {
    t.grow(Dim::V, v, emph == VertexEmphasis::Low ? 2 : UINT64_MAX);
    t.grow(Dim::F, f);
  } else {
    t.grow(Dim::F, f);
    t.grow(Dim::V, v, emph == VertexEmphasis::Low ? 2 : UINT64_MAX);
  }
}

void tile_combination(PhaseTiler& t, std::uint64_t v, std::uint64_t f, std::uint64_t g,
                      VertexEmphasis emph, TilePolicy policy) {
  if (emph == VertexEmphasis::Relative || emph == VertexEmphasis::High) {
    t.grow(Dim::V, v, emphasis_target(emph));
    t.grow(Dim::G, g);
    t.grow(Dim::F, f);
    return;
  }
  const std::uint64_t v_cap = emph == VertexEmphasis::Low ? 2 : UINT64_MAX;
  if (policy == TilePolicy::VertexFirst) {
    t.grow(Dim::V, v, v_cap);
    t.grow(Dim::G, g);
    t.grow(Dim::F, f);
  } else {
    t.grow(Dim::G, g);
    t.grow(Dim::F, f);
    t.grow(Dim::V, v, v_cap);
  }
}

}  // namespace

TileConfig derive_tiles(const DataflowSpec& spec, const WorkloadShape& shape,
                        std::uint64_t pe_budget_agg, std::uint64_t pe_budget_cmb,
                        const TileHints& hints) {
  const std::uint64_t v = shape.num_vertices;
  // Width of the matrix each phase reduces into / reads.
  const bool ac = spec.order == PhaseOrder::AC;
  const std::uint64_t agg_width = ac ? shape.in_features : shape.out_features;

  TileConfig tiles;
  PhaseTiler agg(spec.agg, pe_budget_agg);
  tile_aggregation(agg, v, agg_width, shape.avg_degree, hints.agg_vertex, hints.policy);
  tiles.t_v_agg = agg.size(Dim::V);
  tiles.t_n = agg.size(Dim::N);
  tiles.t_f_agg = agg.size(Dim::F);

  PhaseTiler cmb(spec.cmb, pe_budget_cmb);
  if (spec.inter.kind == InterKind::SpEngn && ac) {
    // The intermediate tile stays in place: same V and F tiles in both phases.
    cmb.pin(Dim::V, tiles.t_v_agg);
    cmb.pin(Dim::F, tiles.t_f_agg);
    cmb.grow(Dim::G, shape.out_features);
  } else {
    tile_combination(cmb, v, shape.in_features, shape.out_features, hints.cmb_vertex,
                     hints.policy);
  }
  tiles.t_v_cmb = cmb.size(Dim::V);
  tiles.t_g = cmb.size(Dim::G);
  tiles.t_f_cmb = cmb.size(Dim::F);
  return tiles;
}

}  // namespace gnnflow
