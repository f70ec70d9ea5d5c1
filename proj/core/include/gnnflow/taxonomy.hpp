#ifndef GNNFLOW_TAXONOMY_HPP_
#define GNNFLOW_TAXONOMY_HPP_

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gnnflow {

// Loop dimensions. N indexes the neighbors of a vertex (aggregation
// reduction), G the output features. F is the reduction of combination.
enum class Dim { V, F, N, G };

enum class Mapping { Spatial, Temporal, Either };

enum class Phase { Aggregation, Combination };

char to_char(Dim d);
char to_char(Mapping m);
std::string_view to_string(Phase p);

struct Loop {
  Dim dim;
  Mapping mapping;
  bool operator==(const Loop&) const = default;
};

// Half-open range of loop indices whose relative order is interchangeable.
struct LoopGroup {
  std::size_t begin;
  std::size_t end;
  bool operator==(const LoopGroup&) const = default;
};

// One phase's loop nest, outermost first.
struct LoopSpec {
  std::vector<Loop> loops;
  std::vector<LoopGroup> groups;

  std::optional<std::size_t> position(Dim d) const;
  const Loop& at(Dim d) const;
  // Dims in written order, e.g. "VFN".
  std::string order() const;
  bool operator==(const LoopSpec&) const = default;
};

// Tile sizes in the six-field order (T_V_AGG, T_N, T_F_AGG, T_V_CMB, T_G, T_F_CMB).
struct TileConfig {
  std::uint64_t t_v_agg = 1;
  std::uint64_t t_n = 1;
  std::uint64_t t_f_agg = 1;
  std::uint64_t t_v_cmb = 1;
  std::uint64_t t_g = 1;
  std::uint64_t t_f_cmb = 1;

  std::uint64_t tile(Phase p, Dim d) const;
  std::uint64_t agg_product() const { return t_v_agg * t_n * t_f_agg; }
  std::uint64_t cmb_product() const { return t_v_cmb * t_g * t_f_cmb; }
  std::array<std::uint64_t, 6> as_tuple() const {
    return {t_v_agg, t_n, t_f_agg, t_v_cmb, t_g, t_f_cmb};
  }
  static TileConfig from_tuple(const std::array<std::uint64_t, 6>& t) {
    return {t[0], t[1], t[2], t[3], t[4], t[5]};
  }
  // "(1,1,512,1,16,32)"
  std::string to_string() const;
  bool operator==(const TileConfig&) const = default;
};

enum class InterKind { Seq, SpArbitrary, SpEngn, PP };
enum class Granularity { Element, Row, Column };

std::string_view to_string(InterKind k);
std::string_view to_string(Granularity g);
// "element", "row", "column" (case-insensitive). Throws ConfigError.
Granularity granularity_from_string(std::string_view s);

struct InterPhase {
  InterKind kind = InterKind::Seq;
  // Present iff kind == PP.
  std::optional<Granularity> granularity;
  bool operator==(const InterPhase&) const = default;
};

enum class PhaseOrder { AC, CA };

struct DataflowSpec {
  InterPhase inter;
  PhaseOrder order = PhaseOrder::AC;
  LoopSpec agg;
  LoopSpec cmb;
  std::optional<TileConfig> tiles;

  Phase producer() const {
    return order == PhaseOrder::AC ? Phase::Aggregation : Phase::Combination;
  }
  const LoopSpec& loops(Phase p) const { return p == Phase::Aggregation ? agg : cmb; }
  bool operator==(const DataflowSpec&) const = default;
};

// Parses `<Inter>_<order>(<agg loops>, <cmb loops>)`, e.g.
// "PP_AC(V_x F_s N_t, V_s G_s F_t)". Loop tokens are a dim letter, an
// optional '_', and a subscript in {s,t,x}; braces mark interchangeable
// groups. Inter is Seq, SP or PP. SP parses as the EnGN-like variant and PP
// gets Row granularity; both are config fields the notation does not carry.
// Throws SyntaxError (with byte offset) or SemanticError.
DataflowSpec parse_dataflow(std::string_view text);

// Canonical single-space rendering; the inverse of parse_dataflow.
std::string format_dataflow(const DataflowSpec& spec);

// Whitespace-insensitive token comparison of two notation strings.
bool token_equivalent(std::string_view a, std::string_view b);

struct Violation {
  std::string rule;
  std::string message;
  bool operator==(const Violation&) const = default;
};

struct ValidationReport {
  bool legal = true;
  std::vector<Violation> violations;
  // Combinations the characterization table leaves unspecified.
  std::vector<Violation> warnings;
  double mapping_efficiency_agg = 0.0;
  double mapping_efficiency_cmb = 0.0;
};

// Rule identifiers reported in Violation::rule.
namespace rules {
inline constexpr std::string_view kMissingTiles = "tiles";
inline constexpr std::string_view kTileMapping = "a-tile-mapping";
inline constexpr std::string_view kPeFit = "b-pe-fit";
inline constexpr std::string_view kSpEngn = "c-sp-engn";
inline constexpr std::string_view kPpRow = "d-pp-row";
inline constexpr std::string_view kPpColumn = "e-pp-column";
inline constexpr std::string_view kPpElement = "f-pp-element";
inline constexpr std::string_view kTileMultiple = "pp-tile-multiple";
inline constexpr std::string_view kUnspecified = "unspecified-by-table";
}  // namespace rules

// Legality of a tiled dataflow on the given per-phase PE budgets. Violations
// are sorted by rule id so the report does not depend on check order.
// For Seq/SP the budgets are normally equal (one shared array).
ValidationReport validate(const DataflowSpec& spec, std::uint64_t pe_budget_agg,
                          std::uint64_t pe_budget_cmb);

// Rows and columns of the intermediate matrix, expressed as the dims each
// phase uses to index them. For AC the intermediate is V x F for both
// phases; for CA the combination output V x G is read by aggregation as
// N x F.
struct IntermediateAxes {
  Dim agg_row, agg_col, cmb_row, cmb_col;
};
IntermediateAxes intermediate_axes(PhaseOrder order);

// Largest of the two phases' tiles along the intermediate rows / columns.
std::uint64_t row_tile_max(const DataflowSpec& spec);
std::uint64_t col_tile_max(const DataflowSpec& spec);

}  // namespace gnnflow

#endif  // GNNFLOW_TAXONOMY_HPP_
