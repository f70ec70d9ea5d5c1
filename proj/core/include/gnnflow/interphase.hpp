#ifndef GNNFLOW_INTERPHASE_HPP_
#define GNNFLOW_INTERPHASE_HPP_

#include <cstdint>
#include <memory>
#include <vector>

#include "gnnflow/error.hpp"
#include "gnnflow/graph.hpp"
#include "gnnflow/phase_engine.hpp"
#include "gnnflow/taxonomy.hpp"

namespace gnnflow {

// Raised by run_layer when the tiled dataflow fails validation.
class IllegalDataflowError : public Error {
 public:
  explicit IllegalDataflowError(ValidationReport report);
  const ValidationReport& report() const { return report_; }

 private:
  ValidationReport report_;
};

struct LayerConfig {
  std::shared_ptr<const CsrGraph> graph;
  std::uint64_t out_features = 1;  // G
  DataflowSpec dataflow;           // tiles must be attached
  // Seq and SP run both phases on one array, so both fields normally hold
  // the same config. PP splits the budget between the phases.
  HardwareConfig hw_agg;
  HardwareConfig hw_cmb;
};

// Start and end cycles of one pipeline unit in the producing phase (the
// aggregation for order AC) and the consuming phase.
struct UnitSpan {
  std::uint64_t producer_start = 0, producer_end = 0;
  std::uint64_t consumer_start = 0, consumer_end = 0;
  bool operator==(const UnitSpan&) const = default;
};

struct LayerCost {
  std::uint64_t total_cycles = 0;
  std::uint64_t t_agg = 0;
  std::uint64_t t_cmb = 0;
  std::uint64_t t_load = 0;
  std::uint64_t buffer_inter = 0;  // elements
  std::uint64_t mac_count = 0;
  PhaseCost agg;
  PhaseCost cmb;
  AccessCounts access;  // both phases merged
  std::vector<UnitSpan> timeline;  // PP only
};

// Intermediate buffer size in elements for a V x f_intermediate
// intermediate matrix.
std::uint64_t buffer_requirement(const DataflowSpec& spec, std::uint64_t num_vertices,
                                 std::uint64_t f_intermediate);

// Earliest double-buffered schedule: producer unit i waits for producer unit
// i-1 and for the consumer to release unit i-2's slot; consumer unit i waits
// for producer unit i and consumer unit i-1. Throws CompositionError when the
// unit counts differ.
std::vector<UnitSpan> pipeline_timeline(const std::vector<std::uint64_t>& producer,
                                        const std::vector<std::uint64_t>& consumer);
std::vector<UnitSpan> pipeline_timeline(const UnitCosts& producer, const UnitCosts& consumer);

// Cycles to stream every producer tile of the intermediate matrix into the
// PEs at the consumer's fill bandwidth.
std::uint64_t intermediate_load_cycles(const DataflowSpec& spec, std::uint64_t num_vertices,
                                       std::uint64_t f_intermediate, const HardwareConfig& hw);

// Validates, costs both phases and composes them. Throws
// IllegalDataflowError, ConfigError (missing graph or tiles) or the phase
// engine's errors.
LayerCost run_layer(const LayerConfig& cfg);

}  // namespace gnnflow

#endif  // GNNFLOW_INTERPHASE_HPP_
