#ifndef GNNFLOW_ORACLE_HPP_
#define GNNFLOW_ORACLE_HPP_

#include <cstdint>
#include <vector>

#include "gnnflow/graph.hpp"
#include "gnnflow/interphase.hpp"
#include "gnnflow/random.hpp"

namespace gnnflow {

// Event-level reference for the analytical model. It walks every cycle and
// every PE explicitly, so it is limited to desk-scale layers.
inline constexpr std::uint64_t kOracleMaxVertices = 64;
inline constexpr std::uint64_t kOracleMaxFeatures = 32;

enum class EventOp { MAC, Distribute, ReduceStep, Idle };

struct ScheduleEvent {
  std::uint64_t cycle = 0;  // cycle within the phase unit's own clock
  std::uint32_t pe = 0;
  EventOp op = EventOp::Idle;
  Phase phase = Phase::Aggregation;
  // MAC operands: output row, reduction index (neighbor or input feature),
  // output column. Zero for other ops.
  std::uint32_t row = 0, reduce = 0, col = 0;
  bool operator==(const ScheduleEvent&) const = default;
};

struct ReplayOptions {
  bool record_events = false;
};

struct ReplayResult {
  std::uint64_t total_cycles = 0;
  std::uint64_t t_agg = 0;
  std::uint64_t t_cmb = 0;
  std::uint64_t t_load = 0;
  std::uint64_t mac_count = 0;
  std::uint64_t l1_reads = 0;
  std::uint64_t l1_writes = 0;
  std::vector<UnitSpan> timeline;
  std::vector<ScheduleEvent> events;
};

// Replays the layer cycle by cycle. Throws SizeError beyond the oracle
// limits and IllegalDataflowError for illegal dataflows.
ReplayResult replay(const LayerConfig& cfg, const ReplayOptions& options = {});

// Dense row-major integer matrix.
struct IntMatrix {
  std::uint64_t rows = 0, cols = 0;
  std::vector<std::int64_t> data;

  IntMatrix() = default;
  IntMatrix(std::uint64_t r, std::uint64_t c) : rows(r), cols(c), data(r * c, 0) {}
  std::int64_t& operator()(std::uint64_t r, std::uint64_t c) { return data[r * cols + c]; }
  std::int64_t operator()(std::uint64_t r, std::uint64_t c) const { return data[r * cols + c]; }
  bool operator==(const IntMatrix&) const = default;

  // Entries drawn uniformly from [lo, hi].
  static IntMatrix random(std::uint64_t r, std::uint64_t c, Rng& rng, std::int64_t lo,
                          std::int64_t hi);
};

// Triple-loop reference of the layer output: (A X) W for order AC and
// A (X W) for CA, with A the 0/1 adjacency of g.
IntMatrix reference_layer(const CsrGraph& g, const IntMatrix& x, const IntMatrix& w,
                          PhaseOrder order);

// The layer output computed by executing every MAC of cfg's schedule in
// pipeline order. Throws like replay, and ShapeError on mismatched X or W.
IntMatrix scheduled_layer(const CsrGraph& g, const IntMatrix& x, const IntMatrix& w,
                          const LayerConfig& cfg);

// True iff the scheduled output equals the reference and no consumer MAC
// read an intermediate element before its producer finished it.
bool functional_check(const CsrGraph& g, const IntMatrix& x, const IntMatrix& w,
                      const LayerConfig& cfg);

}  // namespace gnnflow

#endif  // GNNFLOW_ORACLE_HPP_
