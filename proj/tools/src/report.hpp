#ifndef GNNFLOW_TOOLS_REPORT_HPP_
#define GNNFLOW_TOOLS_REPORT_HPP_

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "gnnflow/energy.hpp"

namespace gnnflow::cli {

enum class ChartKind { RuntimeBars, EnergyStacked, GbBreakdown };

// "runtime-bars", "energy-stacked", "gb-breakdown". Throws ConfigError.
ChartKind chart_kind_from_string(std::string_view s);
std::string_view to_string(ChartKind k);

// The columns a chart needs from one CSV row.
struct ChartRow {
  std::string dataset;
  std::string dataflow;
  double norm_runtime = 0.0;
  // [level][direction][operand] in pJ, as in EnergyReport::cells.
  std::array<std::array<std::array<double, kNumOperands>, 2>, 2> energy{};
};

// Parses a CSV in the sweep schema. Throws ConfigError when the header does
// not match exactly, a row is malformed, or there are no rows.
std::vector<ChartRow> parse_rows_csv(std::string_view text);

// Standalone SVG with a fixed layout derived only from the rows.
std::string render_chart(ChartKind kind, const std::vector<ChartRow>& rows);

}  // namespace gnnflow::cli

#endif  // GNNFLOW_TOOLS_REPORT_HPP_
