#include "gnnflow/oracle.hpp"

#include <algorithm>
#include <functional>

namespace gnnflow {

namespace {

using Lists = std::vector<std::vector<std::uint32_t>>;
// (phase, output row, reduction index, output column) of one MAC.
using MacVisitor = std::function<void(Phase, std::uint32_t, std::uint32_t, std::uint32_t)>;

std::uint64_t tree_depth(std::uint64_t width) {
  std::uint64_t depth = 0;
  for (std::uint64_t reach = 1; reach < width; reach *= 2) ++depth;
  return depth;
}

// One PE array advancing one cycle at a time.
class Machine {
 public:
  Machine(Phase phase, const HardwareConfig& hw, const ReplayOptions& opts,
          std::vector<ScheduleEvent>& events, const MacVisitor* visit)
      : phase_(phase), hw_(hw), record_(opts.record_events), events_(events), visit_(visit) {}

  std::uint64_t cycles() const { return cycle_; }
  std::uint64_t macs() const { return macs_; }
  std::uint64_t l1_writes() const { return l1_writes_; }

  void distribute(std::uint64_t used) {
    for (std::uint64_t i = 0; i < hw_.distribution_latency; ++i)
      tick(used, EventOp::Distribute);
  }

  void fill_tree(std::uint64_t width, std::uint64_t used) {
    for (std::uint64_t i = tree_depth(width); i > 0; --i) tick(used, EventOp::ReduceStep);
  }

  // One compute cycle. work[pe] holds the MAC operands or nothing.
  struct Mac {
    bool active = false;
    std::uint32_t row = 0, reduce = 0, col = 0;
  };
  void compute(const std::vector<Mac>& work, std::uint64_t accumulators) {
    std::vector<bool> touched(accumulators, false);
    for (std::uint64_t pe = 0; pe < hw_.pe_count; ++pe) {
      const Mac* m = pe < work.size() && work[pe].active ? &work[pe] : nullptr;
      if (m) {
        ++macs_;
        if (visit_ && *visit_) (*visit_)(phase_, m->row, m->reduce, m->col);
      }
      if (record_) {
        ScheduleEvent e;
        e.cycle = cycle_;
        e.pe = static_cast<std::uint32_t>(pe);
        e.phase = phase_;
        e.op = m ? EventOp::MAC : EventOp::Idle;
        if (m) {
          e.row = m->row;
          e.reduce = m->reduce;
          e.col = m->col;
        }
        events_.push_back(e);
      }
    }
    for (std::uint64_t pe = 0; pe < work.size(); ++pe)
      if (work[pe].active) touched[accumulator_of_(pe)] = true;
    l1_writes_ += static_cast<std::uint64_t>(std::count(touched.begin(), touched.end(), true));
    ++cycle_;
  }

  // Maps a PE to the output accumulator it feeds in the current tile.
  std::function<std::uint64_t(std::uint64_t)> accumulator_of_;

 private:
  void tick(std::uint64_t used, EventOp op) {
    if (record_)
      for (std::uint64_t pe = 0; pe < hw_.pe_count; ++pe)
        events_.push_back({cycle_, static_cast<std::uint32_t>(pe), pe < used ? op : EventOp::Idle,
                           phase_, 0, 0, 0});
    ++cycle_;
  }

  Phase phase_;
  HardwareConfig hw_;
  bool record_;
  std::vector<ScheduleEvent>& events_;
  const MacVisitor* visit_;
  std::uint64_t cycle_ = 0;
  std::uint64_t macs_ = 0;
  std::uint64_t l1_writes_ = 0;
};

// Aggregation over `rows`, each reducing over its list, for columns
// [c0, c1). PE index = (row slot * t_red + reduce slot) * t_col + column slot.
// With `scatter` the rows are sources and list entries are destinations,
// and MACs are reported as (destination, source, column).
void run_aggregation(Machine& m, const std::vector<std::uint32_t>& rows, const Lists& lists,
                     std::uint64_t c0, std::uint64_t c1, std::uint64_t t_row,
                     std::uint64_t t_red, std::uint64_t t_col, bool scatter) {
  const std::uint64_t used = t_row * t_red * t_col;
  m.accumulator_of_ = [&](std::uint64_t pe) {
    return (pe / (t_red * t_col)) * t_col + pe % t_col;
  };
  for (std::size_t s = 0; s < rows.size(); s += t_row) {
    const std::size_t e = std::min(rows.size(), s + t_row);
    m.distribute(used);
    for (std::uint64_t fb = c0; fb < c1; fb += t_col) {
      for (std::uint64_t k = 0;; ++k) {
        bool any = false;
        for (std::size_t r = s; r < e; ++r) any = any || lists[rows[r]].size() > k * t_red;
        if (!any) break;
        std::vector<Machine::Mac> work(used);
        for (std::uint64_t pe = 0; pe < used; ++pe) {
          const std::uint64_t ri = pe / (t_red * t_col);
          const std::uint64_t ni = (pe / t_col) % t_red;
          const std::uint64_t fi = pe % t_col;
          if (s + ri >= e || fb + fi >= c1) continue;
          const std::uint32_t row = rows[s + ri];
          const std::uint64_t j = k * t_red + ni;
          if (j >= lists[row].size()) continue;
          const std::uint32_t other = lists[row][j];
          work[pe] = {true, scatter ? other : row, scatter ? row : other,
                      static_cast<std::uint32_t>(fb + fi)};
        }
        m.compute(work, t_row * t_col);
      }
    }
    m.fill_tree(t_red, used);
  }
}

// Dense combination out[r][c] += in[r][k] * w[k][c] over rows [r0, r1),
// reduction [k0, k1) and columns [c0, c1).
// PE index = (row slot * t_col + column slot) * t_red + reduce slot.
void run_combination(Machine& m, std::uint64_t r0, std::uint64_t r1, std::uint64_t k0,
                     std::uint64_t k1, std::uint64_t c0, std::uint64_t c1, std::uint64_t t_row,
                     std::uint64_t t_col, std::uint64_t t_red) {
  const std::uint64_t used = t_row * t_col * t_red;
  m.accumulator_of_ = [&](std::uint64_t pe) { return pe / t_red; };
  if (k0 == k1) return;
  for (std::uint64_t vb = r0; vb < r1; vb += t_row) {
    for (std::uint64_t gb = c0; gb < c1; gb += t_col) {
      m.distribute(used);
      for (std::uint64_t fb = k0; fb < k1; fb += t_red) {
        std::vector<Machine::Mac> work(used);
        for (std::uint64_t pe = 0; pe < used; ++pe) {
          const std::uint64_t vi = pe / (t_col * t_red);
          const std::uint64_t gi = (pe / t_red) % t_col;
          const std::uint64_t fi = pe % t_red;
          if (vb + vi >= r1 || gb + gi >= c1 || fb + fi >= k1) continue;
          work[pe] = {true, static_cast<std::uint32_t>(vb + vi), static_cast<std::uint32_t>(fb + fi),
                      static_cast<std::uint32_t>(gb + gi)};
        }
        m.compute(work, t_row * t_col);
      }
      m.fill_tree(t_red, used);
    }
  }
}

struct Piece {
  std::uint64_t r0, r1, c0, c1;
};

// Units of the intermediate matrix in production order.
std::vector<Piece> pieces(const DataflowSpec& spec, std::uint64_t rows, std::uint64_t cols) {
  std::vector<Piece> out;
  if (rows == 0 || cols == 0) return out;
  const std::uint64_t tr = row_tile_max(spec);
  const std::uint64_t tc = col_tile_max(spec);
  const Granularity gran = spec.inter.granularity.value_or(Granularity::Row);
  const auto axes = intermediate_axes(spec.order);
  const LoopSpec& producer = spec.order == PhaseOrder::AC ? spec.agg : spec.cmb;
  const Dim row_dim = spec.order == PhaseOrder::AC ? axes.agg_row : axes.cmb_row;
  const Dim col_dim = spec.order == PhaseOrder::AC ? axes.agg_col : axes.cmb_col;
  const bool col_outer = producer.position(col_dim) < producer.position(row_dim);
  const std::uint64_t rstep = gran == Granularity::Column ? rows : tr;
  const std::uint64_t cstep = gran == Granularity::Row ? cols : tc;
  auto add = [&](std::uint64_t r, std::uint64_t c) {
    out.push_back({r, std::min(rows, r + rstep), c, std::min(cols, c + cstep)});
  };
  if (gran == Granularity::Element && col_outer) {
    for (std::uint64_t c = 0; c < cols; c += cstep)
      for (std::uint64_t r = 0; r < rows; r += rstep) add(r, c);
  } else {
    for (std::uint64_t r = 0; r < rows; r += rstep)
      for (std::uint64_t c = 0; c < cols; c += cstep) add(r, c);
  }
  return out;
}

// Cycle-by-cycle run of a two-slot producer/consumer pipeline.
std::vector<UnitSpan> simulate_pipeline(const std::vector<std::uint64_t>& prod,
                                        const std::vector<std::uint64_t>& cons) {
  const std::size_t n = prod.size();
  std::vector<UnitSpan> spans(n);
  std::size_t next_p = 0, next_c = 0, produced = 0, consumed = 0;
  bool p_busy = false, c_busy = false;
  std::uint64_t p_left = 0, c_left = 0;
  for (std::uint64_t t = 0;; ++t) {
    // Settle completions and starts that happen at cycle t.
    for (bool changed = true; changed;) {
      changed = false;
      if (p_busy && p_left == 0) {
        spans[next_p - 1].producer_end = t;
        p_busy = false;
        ++produced;
        changed = true;
      }
      if (c_busy && c_left == 0) {
        spans[next_c - 1].consumer_end = t;
        c_busy = false;
        ++consumed;
        changed = true;
      }
      if (!p_busy && next_p < n && next_p - consumed < 2) {
        spans[next_p].producer_start = t;
        p_left = prod[next_p++];
        p_busy = true;
        changed = true;
      }
      if (!c_busy && next_c < produced) {
        spans[next_c].consumer_start = t;
        c_left = cons[next_c++];
        c_busy = true;
        changed = true;
      }
    }
    if (consumed == n) break;
    if (p_busy) --p_left;
    if (c_busy) --c_left;
  }
  return spans;
}

std::uint64_t simulate_fill(std::uint64_t rows, std::uint64_t cols, std::uint64_t tr,
                            std::uint64_t tc, std::uint64_t bw) {
  std::uint64_t cycles = 0;
  for (std::uint64_t r = 0; r < rows; r += tr)
    for (std::uint64_t c = 0; c < cols; c += tc) {
      std::uint64_t left = (std::min(rows, r + tr) - r) * (std::min(cols, c + tc) - c);
      while (left > 0) {
        left -= std::min(bw, left);
        ++cycles;
      }
    }
  return cycles;
}

ReplayResult run(const LayerConfig& cfg, const ReplayOptions& opts, const MacVisitor* visit) {
  if (!cfg.graph) throw ConfigError("layer has no graph");
  const DataflowSpec& spec = cfg.dataflow;
  if (!spec.tiles) throw ConfigError("layer dataflow has no tiles");
  const CsrGraph& g = *cfg.graph;
  const std::uint64_t v = g.num_vertices();
  const std::uint64_t f = g.num_features();
  const std::uint64_t out_g = cfg.out_features;
  if (v > kOracleMaxVertices || f > kOracleMaxFeatures || out_g > kOracleMaxFeatures)
    throw SizeError("oracle handles at most " + std::to_string(kOracleMaxVertices) +
                    " vertices and " + std::to_string(kOracleMaxFeatures) + " features");
  ValidationReport report = validate(spec, cfg.hw_agg.pe_count, cfg.hw_cmb.pe_count);
  if (!report.legal) throw IllegalDataflowError(std::move(report));
  const TileConfig& t = *spec.tiles;
  const bool ac = spec.order == PhaseOrder::AC;
  const std::uint64_t f_inter = ac ? f : out_g;

  Lists gather(v), scatter(v);
  for (std::uint64_t u = 0; u < v; ++u)
    for (auto n : g.neighbors(u)) {
      gather[u].push_back(n);
      scatter[n].push_back(static_cast<std::uint32_t>(u));
    }
  auto all_rows = [](std::uint64_t r0, std::uint64_t r1) {
    std::vector<std::uint32_t> rows;
    for (std::uint64_t r = r0; r < r1; ++r) rows.push_back(static_cast<std::uint32_t>(r));
    return rows;
  };

  ReplayResult out;
  auto finish = [&](const Machine& m) {
    out.mac_count += m.macs();
    out.l1_writes += m.l1_writes();
  };

  if (spec.inter.kind != InterKind::PP) {
    Machine agg(Phase::Aggregation, cfg.hw_agg, opts, out.events, visit);
    Machine cmb(Phase::Combination, cfg.hw_cmb, opts, out.events, visit);
    auto do_agg = [&] {
      run_aggregation(agg, all_rows(0, v), gather, 0, f_inter, t.t_v_agg, t.t_n, t.t_f_agg,
                      false);
    };
    auto do_cmb = [&] {
      run_combination(cmb, 0, v, 0, f, 0, out_g, t.t_v_cmb, t.t_g, t.t_f_cmb);
    };
    if (ac) {
      do_agg();
      do_cmb();
    } else {
      do_cmb();
      do_agg();
    }
    finish(agg);
    finish(cmb);
    out.t_agg = agg.cycles();
    out.t_cmb = cmb.cycles();
    out.total_cycles = out.t_agg + out.t_cmb;
    if (spec.inter.kind == InterKind::SpEngn) {
      const HardwareConfig& hw = ac ? cfg.hw_cmb : cfg.hw_agg;
      const std::uint64_t bw = hw.fill_bandwidth ? hw.fill_bandwidth : hw.pe_count;
      const std::uint64_t tr = ac ? t.t_v_agg : t.t_v_cmb;
      const std::uint64_t tc = ac ? t.t_f_agg : t.t_g;
      out.t_load = std::min(simulate_fill(v, f_inter, tr, tc, bw), ac ? out.t_cmb : out.t_agg);
      out.total_cycles -= out.t_load;
    }
  } else {
    std::vector<std::uint64_t> agg_units, cmb_units;
    for (const Piece& p : pieces(spec, v, f_inter)) {
      Machine agg(Phase::Aggregation, cfg.hw_agg, opts, out.events, visit);
      Machine cmb(Phase::Combination, cfg.hw_cmb, opts, out.events, visit);
      if (ac) {
        run_aggregation(agg, all_rows(p.r0, p.r1), gather, p.c0, p.c1, t.t_v_agg, t.t_n,
                        t.t_f_agg, false);
        run_combination(cmb, p.r0, p.r1, p.c0, p.c1, 0, out_g, t.t_v_cmb, t.t_g, t.t_f_cmb);
      } else {
        run_combination(cmb, p.r0, p.r1, 0, f, p.c0, p.c1, t.t_v_cmb, t.t_g, t.t_f_cmb);
        run_aggregation(agg, all_rows(p.r0, p.r1), scatter, p.c0, p.c1, t.t_n, t.t_v_agg,
                        t.t_f_agg, true);
      }
      agg_units.push_back(agg.cycles());
      cmb_units.push_back(cmb.cycles());
      finish(agg);
      finish(cmb);
      out.t_agg += agg.cycles();
      out.t_cmb += cmb.cycles();
    }
    out.timeline = ac ? simulate_pipeline(agg_units, cmb_units)
                      : simulate_pipeline(cmb_units, agg_units);
    out.total_cycles = out.timeline.empty() ? 0 : out.timeline.back().consumer_end;
  }
  out.l1_reads = 2 * out.mac_count;
  return out;
}

}  // namespace

ReplayResult replay(const LayerConfig& cfg, const ReplayOptions& options) {
  return run(cfg, options, nullptr);
}

IntMatrix IntMatrix::random(std::uint64_t r, std::uint64_t c, Rng& rng, std::int64_t lo,
                            std::int64_t hi) {
  IntMatrix m(r, c);
  const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  for (auto& x : m.data) x = lo + static_cast<std::int64_t>(rng.below(span));
  return m;
}

IntMatrix reference_layer(const CsrGraph& g, const IntMatrix& x, const IntMatrix& w,
                          PhaseOrder order) {
  const std::uint64_t v = g.num_vertices();
  IntMatrix a(v, v);
  for (std::uint64_t u = 0; u < v; ++u)
    for (auto n : g.neighbors(u)) a(u, n) = 1;
  auto mul = [](const IntMatrix& l, const IntMatrix& r) {
    if (l.cols != r.rows) throw ShapeError("matrix shapes do not chain");
    IntMatrix p(l.rows, r.cols);
    for (std::uint64_t i = 0; i < l.rows; ++i)
      for (std::uint64_t j = 0; j < r.cols; ++j) {
        std::int64_t s = 0;
        for (std::uint64_t k = 0; k < l.cols; ++k) s += l(i, k) * r(k, j);
        p(i, j) = s;
      }
    return p;
  };
  return order == PhaseOrder::AC ? mul(mul(a, x), w) : mul(a, mul(x, w));
}

namespace {

struct Execution {
  IntMatrix output;
  bool ordered = true;
};

Execution execute(const CsrGraph& g, const IntMatrix& x, const IntMatrix& w,
                  const LayerConfig& cfg) {
  const std::uint64_t v = g.num_vertices();
  const std::uint64_t f = g.num_features();
  const std::uint64_t out_g = cfg.out_features;
  if (x.rows != v || x.cols != f || w.rows != f || w.cols != out_g)
    throw ShapeError("X must be V x F and W must be F x G");
  const bool ac = cfg.dataflow.order == PhaseOrder::AC;
  const std::uint64_t f_inter = ac ? f : out_g;

  IntMatrix inter(v, f_inter), done(v, f_inter);
  Execution ex{IntMatrix(v, out_g), true};
  // Contributions an intermediate element needs before it may be consumed.
  auto needed = [&](std::uint64_t row) -> std::int64_t {
    return ac ? static_cast<std::int64_t>(g.degree(row)) : static_cast<std::int64_t>(f);
  };
  const MacVisitor visit = [&](Phase phase, std::uint32_t row, std::uint32_t red,
                               std::uint32_t col) {
    const bool producing = (phase == Phase::Aggregation) == ac;
    if (producing) {
      // AC: H[row][col] += X[red][col]; CA: T[row][col] += X[row][red] * W[red][col].
      inter(row, col) += ac ? x(red, col) : x(row, red) * w(red, col);
      ++done(row, col);
    } else if (ac) {
      if (done(row, red) != needed(row)) ex.ordered = false;
      ex.output(row, col) += inter(row, red) * w(red, col);
    } else {
      if (done(red, col) != needed(red)) ex.ordered = false;
      ex.output(row, col) += inter(red, col);
    }
  };
  // Run on `g` whatever cfg.graph points at.
  LayerConfig on_g = cfg;
  on_g.graph = std::shared_ptr<const CsrGraph>(std::shared_ptr<const CsrGraph>{}, &g);
  run(on_g, {}, &visit);
  return ex;
}

}  // namespace

IntMatrix scheduled_layer(const CsrGraph& g, const IntMatrix& x, const IntMatrix& w,
                          const LayerConfig& cfg) {
  return execute(g, x, w, cfg).output;
}

bool functional_check(const CsrGraph& g, const IntMatrix& x, const IntMatrix& w,
                      const LayerConfig& cfg) {
  const Execution ex = execute(g, x, w, cfg);
  return ex.ordered && ex.output == reference_layer(g, x, w, cfg.dataflow.order);
}

}  // namespace gnnflow
