#include "sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <memory>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "gnnflow/datasets.hpp"
#include "gnnflow/error.hpp"
#include "gnnflow/interphase.hpp"

namespace gnnflow::cli {

using nlohmann::json;

namespace {

std::uint64_t as_count(const json& j, const char* what) {
  if (!j.is_number_integer() || j.get<std::int64_t>() < 0)
    throw ConfigError(std::string(what) + " must be a non-negative integer");
  return j.get<std::uint64_t>();
}

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

DatasetEntry parse_dataset(const json& j, const std::filesystem::path& base) {
  DatasetEntry d;
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    d.name = s;
    if (find_dataset(builtin_datasets(), s)) return d;
    d.kind = DatasetEntry::Kind::File;
    d.path = base / s;
    d.name = std::filesystem::path(s).stem().string();
    return d;
  }
  if (!j.is_object()) throw ConfigError("dataset entries must be strings or objects");
  if (j.contains("synthetic")) {
    const json& s = j.at("synthetic");
    d.kind = DatasetEntry::Kind::Synthetic;
    d.synthetic.num_vertices = as_count(s.at("vertices"), "synthetic.vertices");
    d.synthetic.num_features =
        static_cast<std::uint32_t>(as_count(s.at("features"), "synthetic.features"));
    d.synthetic.avg_degree = s.at("avg_degree").get<double>();
    d.synthetic.model = degree_model_from_string(s.value("model", std::string("uniform-random")));
    d.synthetic.seed = s.contains("seed") ? as_count(s.at("seed"), "synthetic.seed") : 1;
    d.name = j.value("name", std::string("synthetic"));
    return d;
  }
  if (j.contains("path")) {
    d.kind = DatasetEntry::Kind::File;
    d.path = base / j.at("path").get<std::string>();
    d.features = j.contains("features") ? as_count(j.at("features"), "features") : 1;
    d.name = j.value("name", d.path.stem().string());
    return d;
  }
  if (j.contains("registry")) {
    d.name = j.at("registry").get<std::string>();
    return d;
  }
  throw ConfigError("dataset object needs 'synthetic', 'path' or 'registry'");
}

DataflowEntry parse_dataflow_entry(const json& j) {
  if (j.is_string()) return resolve_dataflow(j.get<std::string>());
  if (!j.is_object()) throw ConfigError("dataflow entries must be strings or objects");
  DataflowEntry e;
  if (j.contains("builtin")) {
    e = resolve_dataflow(j.at("builtin").get<std::string>());
  } else if (j.contains("notation")) {
    e = resolve_dataflow(j.at("notation").get<std::string>());
  } else {
    throw ConfigError("dataflow object needs 'builtin' or 'notation'");
  }
  if (j.contains("name")) e.name = j.at("name").get<std::string>();
  if (j.contains("granularity")) {
    if (e.spec.inter.kind != InterKind::PP)
      throw ConfigError("granularity applies to PP dataflows only");
    e.spec.inter.granularity = granularity_from_string(j.at("granularity").get<std::string>());
  }
  if (j.contains("sp_variant")) {
    const auto v = lower(j.at("sp_variant").get<std::string>());
    if (e.spec.inter.kind != InterKind::SpEngn && e.spec.inter.kind != InterKind::SpArbitrary)
      throw ConfigError("sp_variant applies to SP dataflows only");
    if (v == "engn") e.spec.inter.kind = InterKind::SpEngn;
    else if (v == "arbitrary") e.spec.inter.kind = InterKind::SpArbitrary;
    else throw ConfigError("sp_variant must be 'engn' or 'arbitrary'");
  }
  return e;
}

TileConfig parse_tuple(const json& j) {
  if (!j.is_array() || j.size() != 6) throw ConfigError("tile tuples need six entries");
  std::array<std::uint64_t, 6> t{};
  for (std::size_t i = 0; i < 6; ++i) t[i] = as_count(j[i], "tile size");
  return TileConfig::from_tuple(t);
}

void parse_into(SweepConfig& c, const json& doc, const std::filesystem::path& base) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    static const char* kKnown[] = {"datasets", "dataflows", "tiles",  "tile_grid",
                                   "tile_policy", "hw",     "layer",  "energy",
                                   "output",   "baseline",  "registry"};
    if (std::find_if(std::begin(kKnown), std::end(kKnown),
                     [&](const char* k) { return it.key() == k; }) == std::end(kKnown))
      throw ConfigError("unknown config key '" + it.key() + "'");
  }
  if (doc.contains("registry")) c.registry = base / doc.at("registry").get<std::string>();
  for (const auto& d : doc.at("datasets")) c.datasets.push_back(parse_dataset(d, base));
  for (const auto& d : doc.at("dataflows")) c.dataflows.push_back(parse_dataflow_entry(d));
  if (c.datasets.empty()) throw ConfigError("datasets must not be empty");
  if (c.dataflows.empty()) throw ConfigError("dataflows must not be empty");

  if (doc.contains("tiles"))
    for (const auto& t : doc.at("tiles")) c.tiles.push_back(parse_tuple(t));
  if (doc.contains("tile_grid")) {
    const json& g = doc.at("tile_grid");
    if (!g.is_object()) throw ConfigError("tile_grid must map tile names to lists");
    for (auto it = g.begin(); it != g.end(); ++it)
      if (std::find_if(kBaseColumns.begin() + 2, kBaseColumns.begin() + 8,
                       [&](const char* k) { return it.key() == k; }) == kBaseColumns.begin() + 8)
        throw ConfigError("unknown tile_grid key '" + it.key() + "'");
    for (std::size_t i = 0; i < 6; ++i) {
      const char* key = kBaseColumns[2 + i];
      if (!g.contains(key)) continue;
      for (const auto& x : g.at(key)) c.tile_grid[i].push_back(as_count(x, key));
    }
  }
  if (doc.contains("tile_policy"))
    c.tile_policy = tile_policy_from_string(doc.at("tile_policy").get<std::string>());

  if (doc.contains("hw")) {
    const json& h = doc.at("hw");
    if (h.contains("pe_count")) c.hw.pe_count = as_count(h.at("pe_count"), "hw.pe_count");
    if (h.contains("pp_split")) {
      const json& s = h.at("pp_split");
      if (!s.is_array() || s.size() != 2) throw ConfigError("hw.pp_split needs two entries");
      c.hw.pp_split = {as_count(s[0], "hw.pp_split"), as_count(s[1], "hw.pp_split")};
    }
    if (h.contains("distribution_latency"))
      c.hw.distribution_latency = as_count(h.at("distribution_latency"), "hw.distribution_latency");
    if (h.contains("fill_bandwidth"))
      c.hw.fill_bandwidth = as_count(h.at("fill_bandwidth"), "hw.fill_bandwidth");
    if (c.hw.pe_count == 0) throw ConfigError("hw.pe_count must be >= 1");
  }
  if (doc.contains("layer")) {
    const json& l = doc.at("layer");
    if (l.contains("G")) c.layer.out_features = as_count(l.at("G"), "layer.G");
    if (l.contains("batch_size")) c.layer.batch_size = as_count(l.at("batch_size"), "layer.batch_size");
    if (l.contains("self_loops")) c.layer.self_loops = l.at("self_loops").get<bool>();
    if (l.contains("seed")) c.layer.seed = as_count(l.at("seed"), "layer.seed");
    if (l.contains("degree_model"))
      c.layer.degree_model = degree_model_from_string(l.at("degree_model").get<std::string>());
  }
  if (doc.contains("energy")) {
    const json& e = doc.at("energy");
    c.energy.gb_access_pj = e.value("gb_access_pj", c.energy.gb_access_pj);
    c.energy.l1_access_pj = e.value("l1_access_pj", c.energy.l1_access_pj);
    if (!(c.energy.gb_access_pj > 0) || !(c.energy.l1_access_pj > 0))
      throw ConfigError("energy constants must be positive");
  }
  if (doc.contains("output")) {
    const json& o = doc.at("output");
    if (o.contains("csv")) c.output.csv = base / o.at("csv").get<std::string>();
    if (o.contains("charts"))
      for (auto it = o.at("charts").begin(); it != o.at("charts").end(); ++it)
        c.output.charts[it.key()] = base / it.value().get<std::string>();
  }
  if (doc.contains("baseline")) c.baseline = doc.at("baseline").get<std::string>();
  const bool has_baseline = std::any_of(c.dataflows.begin(), c.dataflows.end(),
                                        [&](const DataflowEntry& e) { return e.name == c.baseline; });
  if (!has_baseline) throw ConfigError("baseline '" + c.baseline + "' is not among the dataflows");
}

}  // namespace

DataflowEntry resolve_dataflow(const std::string& ref) {
  DataflowEntry e;
  if (auto b = find_builtin(ref)) {
    e.name = b->name;
    e.spec = b->spec;
    e.agg_vertex = b->agg_vertex;
    e.cmb_vertex = b->cmb_vertex;
    return e;
  }
  e.spec = parse_dataflow(ref);
  e.name = format_dataflow(e.spec);
  return e;
}

SweepConfig parse_sweep_config(const std::string& json_text, const std::filesystem::path& base_dir) {
  SweepConfig c;
  try {
    parse_into(c, json::parse(json_text), base_dir);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return c;
}

SweepConfig load_sweep_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_sweep_config(ss.str(), path.parent_path());
}

std::string energy_column(Level l, Direction d, Operand o) {
  std::string s = l == Level::GB ? "gb_" : "l1_";
  s += d == Direction::Read ? "read_" : "write_";
  return s + lower(std::string(to_string(o)));
}

std::vector<std::string> csv_header() {
  std::vector<std::string> h(kBaseColumns.begin(), kBaseColumns.end());
  for (Level l : {Level::GB, Level::L1})
    for (Direction d : {Direction::Read, Direction::Write})
      for (Operand o : kOperands) h.push_back(energy_column(l, d, o));
  return h;
}

unsigned threads_from_env() {
  const char* v = std::getenv("SIM_THREADS");
  if (!v || !*v) return 0;
  char* end = nullptr;
  const unsigned long n = std::strtoul(v, &end, 10);
  if (*end != '\0') throw ConfigError("SIM_THREADS must be a non-negative integer");
  return static_cast<unsigned>(n);
}

namespace {

std::shared_ptr<const CsrGraph> build_graph(const DatasetEntry& d, const SweepConfig& cfg,
                                            const std::vector<DatasetDescriptor>& registry) {
  switch (d.kind) {
    case DatasetEntry::Kind::Registry: {
      const auto desc = find_dataset(registry, d.name);
      if (!desc) throw ConfigError("unknown dataset '" + d.name + "'");
      DatasetGraphOptions o;
      o.batch_size = cfg.layer.batch_size;
      o.model = cfg.layer.degree_model;
      o.add_self_loops = cfg.layer.self_loops;
      o.seed = cfg.layer.seed;
      return std::make_shared<CsrGraph>(dataset_graph(*desc, o));
    }
    case DatasetEntry::Kind::File: {
      EdgeListOptions o;
      o.num_features = static_cast<std::uint32_t>(d.features);
      o.add_self_loops = cfg.layer.self_loops;
      return std::make_shared<CsrGraph>(load_edge_list(d.path, o));
    }
    case DatasetEntry::Kind::Synthetic: {
      CsrGraph g = generate_synthetic(d.synthetic);
      return std::make_shared<CsrGraph>(cfg.layer.self_loops ? with_self_loops(g) : g);
    }
  }
  throw ConfigError("bad dataset entry");
}

struct Task {
  std::size_t dataset;
  std::size_t dataflow;
  DataflowSpec spec;
  HardwareConfig hw_agg, hw_cmb;
};

std::vector<TileConfig> tile_points(const SweepConfig& cfg, const TileConfig& derived) {
  std::vector<TileConfig> out = cfg.tiles;
  const bool grid = std::any_of(cfg.tile_grid.begin(), cfg.tile_grid.end(),
                                [](const auto& v) { return !v.empty(); });
  if (grid) {
    std::array<std::vector<std::uint64_t>, 6> axes = cfg.tile_grid;
    const auto d = derived.as_tuple();
    for (std::size_t i = 0; i < 6; ++i)
      if (axes[i].empty()) axes[i] = {d[i]};
    std::array<std::size_t, 6> idx{};
    while (true) {
      std::array<std::uint64_t, 6> t{};
      for (std::size_t i = 0; i < 6; ++i) t[i] = axes[i][idx[i]];
      out.push_back(TileConfig::from_tuple(t));
      std::size_t k = 6;
      while (k > 0) {
        --k;
        if (++idx[k] < axes[k].size()) break;
        idx[k] = 0;
        if (k == 0) return out;
      }
    }
  }
  if (out.empty()) out.push_back(derived);
  return out;
}

}  // namespace

SweepResult run_sweep(const SweepConfig& cfg, SweepMode mode, unsigned threads) {
  const auto registry = cfg.registry ? load_dataset_registry(*cfg.registry) : builtin_datasets();
  std::vector<std::shared_ptr<const CsrGraph>> graphs;
  for (const auto& d : cfg.datasets) graphs.push_back(build_graph(d, cfg, registry));

  const std::uint64_t pp_agg = cfg.hw.pp_split ? (*cfg.hw.pp_split)[0] : cfg.hw.pe_count / 2;
  const std::uint64_t pp_cmb =
      cfg.hw.pp_split ? (*cfg.hw.pp_split)[1] : cfg.hw.pe_count - cfg.hw.pe_count / 2;
  if (cfg.hw.pp_split && pp_agg + pp_cmb != cfg.hw.pe_count)
    throw ConfigError("hw.pp_split must add up to hw.pe_count");

  std::vector<Task> tasks;
  for (std::size_t di = 0; di < cfg.datasets.size(); ++di) {
    const CsrGraph& g = *graphs[di];
    const WorkloadShape shape{g.num_vertices(), g.num_features(), cfg.layer.out_features,
                              degree_stats(g).avg_degree};
    for (std::size_t fi = 0; fi < cfg.dataflows.size(); ++fi) {
      const DataflowEntry& e = cfg.dataflows[fi];
      const bool pp = e.spec.inter.kind == InterKind::PP;
      HardwareConfig ha, hc;
      ha.pe_count = pp ? pp_agg : cfg.hw.pe_count;
      hc.pe_count = pp ? pp_cmb : cfg.hw.pe_count;
      ha.distribution_latency = hc.distribution_latency = cfg.hw.distribution_latency;
      ha.fill_bandwidth = hc.fill_bandwidth = cfg.hw.fill_bandwidth;
      const TileConfig derived = derive_tiles(e.spec, shape, ha.pe_count, hc.pe_count,
                                              {e.agg_vertex, e.cmb_vertex, cfg.tile_policy});
      for (const TileConfig& t : tile_points(cfg, derived)) {
        Task task{di, fi, e.spec, ha, hc};
        task.spec.tiles = t;
        tasks.push_back(std::move(task));
      }
    }
  }

  std::vector<std::optional<Row>> rows(tasks.size());
  std::vector<std::exception_ptr> errors(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < tasks.size();) {
      const Task& t = tasks[i];
      try {
        const LayerCost cost = run_layer({graphs[t.dataset], cfg.layer.out_features, t.spec,
                                          t.hw_agg, t.hw_cmb});
        Row r;
        r.dataset = cfg.datasets[t.dataset].name;
        r.dataflow = cfg.dataflows[t.dataflow].name;
        r.tiles = *t.spec.tiles;
        r.cycles = cost.total_cycles;
        r.t_agg = cost.t_agg;
        r.t_cmb = cost.t_cmb;
        r.t_load = cost.t_load;
        r.buffer_inter = cost.buffer_inter;
        const bool pp = t.spec.inter.kind == InterKind::PP;
        const double pes = static_cast<double>(pp ? t.hw_agg.pe_count + t.hw_cmb.pe_count
                                                  : t.hw_agg.pe_count);
        r.utilization = cost.total_cycles ? static_cast<double>(cost.mac_count) /
                                                (static_cast<double>(cost.total_cycles) * pes)
                                          : 0.0;
        r.energy = energy(cost, cfg.energy);
        rows[i] = std::move(r);
      } catch (const IllegalDataflowError&) {
        if (mode == SweepMode::Strict) errors[i] = std::current_exception();
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  unsigned n = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
  n = static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(1, tasks.size())));
  std::vector<std::thread> pool;
  for (unsigned i = 1; i < n; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  SweepResult out;
  for (auto& r : rows) {
    if (r) out.rows.push_back(std::move(*r));
    else ++out.skipped;
  }
  // Normalize to the first baseline row of each dataset.
  std::map<std::string, std::uint64_t> base;
  for (const Row& r : out.rows)
    if (r.dataflow == cfg.baseline && !base.count(r.dataset)) base[r.dataset] = r.cycles;
  for (Row& r : out.rows) {
    auto it = base.find(r.dataset);
    if (it == base.end())
      throw ConfigError("baseline '" + cfg.baseline + "' has no legal row for dataset '" +
                        r.dataset + "'");
    r.norm_runtime = it->second ? static_cast<double>(r.cycles) / static_cast<double>(it->second)
                                : (r.cycles ? 0.0 : 1.0);
  }
  return out;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + '"';
}

std::string fixed(double x, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

}  // namespace

std::string format_csv(const std::vector<Row>& rows) {
  std::string out;
  const auto header = csv_header();
  for (std::size_t i = 0; i < header.size(); ++i) out += (i ? "," : "") + header[i];
  out += '\n';
  for (const Row& r : rows) {
    out += csv_field(r.dataset) + ',' + csv_field(r.dataflow);
    for (auto t : r.tiles.as_tuple()) out += ',' + std::to_string(t);
    for (auto x : {r.cycles, r.t_agg, r.t_cmb, r.t_load, r.buffer_inter})
      out += ',' + std::to_string(x);
    out += ',' + fixed(r.utilization, 6) + ',' + fixed(r.energy.total_pj, 3) + ',' +
           fixed(r.norm_runtime, 6);
    for (Level l : {Level::GB, Level::L1})
      for (Direction d : {Direction::Read, Direction::Write})
        for (Operand o : kOperands) out += ',' + fixed(r.energy.cell(l, d, o), 3);
    out += '\n';
  }
  return out;
}

}  // namespace gnnflow::cli
