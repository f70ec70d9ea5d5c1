#include "cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <sstream>

#include "gnnflow/error.hpp"
#include "gnnflow/graph.hpp"
#include "gnnflow/interphase.hpp"
#include "gnnflow/taxonomy.hpp"
#include "report.hpp"
#include "sweep.hpp"

namespace gnnflow::cli {

namespace {

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + p.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& p, const std::string& text) {
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + p.string() + "'");
  out << text;
  if (!out) throw ConfigError("failed writing '" + p.string() + "'");
}

std::vector<std::uint64_t> parse_list(const std::string& s, std::size_t expected,
                                      const char* what) {
  std::vector<std::uint64_t> v;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    unsigned long long x = 0;
    try {
      x = std::stoull(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size() || item[0] == '-')
      throw ConfigError(std::string(what) + ": '" + item + "' is not a count");
    v.push_back(x);
  }
  if (v.size() != expected)
    throw ConfigError(std::string(what) + " needs " + std::to_string(expected) + " values");
  return v;
}

int do_sweep(const std::string& config, const std::string& csv_override, SweepMode mode,
             std::ostream& out, std::ostream& err) {
  SweepConfig cfg = load_sweep_config(config);
  if (!csv_override.empty()) cfg.output.csv = csv_override;
  const SweepResult result = run_sweep(cfg, mode, threads_from_env());
  if (result.skipped)
    err << "skipped " << result.skipped << " illegal tile point(s)\n";
  const std::string csv = format_csv(result.rows);
  if (cfg.output.csv) write_file(*cfg.output.csv, csv);
  else out << csv;
  if (!cfg.output.charts.empty()) {
    const auto rows = parse_rows_csv(csv);
    for (const auto& [kind, path] : cfg.output.charts)
      write_file(path, render_chart(chart_kind_from_string(kind), rows));
  }
  return kExitOk;
}

struct ValidateArgs {
  std::string dataflow;
  std::string tiles;
  std::uint64_t pe = 512;
  std::string pp_split;
  std::string granularity;
  std::string sp_variant;
};

int do_validate(const ValidateArgs& a, std::ostream& out) {
  DataflowSpec spec = parse_dataflow(a.dataflow);
  if (!a.granularity.empty()) {
    if (spec.inter.kind != InterKind::PP) throw ConfigError("--granularity needs a PP dataflow");
    spec.inter.granularity = granularity_from_string(a.granularity);
  }
  if (!a.sp_variant.empty()) {
    if (spec.inter.kind != InterKind::SpEngn) throw ConfigError("--sp-variant needs an SP dataflow");
    if (a.sp_variant == "arbitrary") spec.inter.kind = InterKind::SpArbitrary;
    else if (a.sp_variant != "engn") throw ConfigError("--sp-variant must be engn or arbitrary");
  }
  out << "dataflow: " << format_dataflow(spec) << "\n";
  if (a.tiles.empty()) {
    out << "notation is well-formed; pass --tiles to check legality\n";
    return kExitOk;
  }
  const auto t = parse_list(a.tiles, 6, "--tiles");
  spec.tiles = TileConfig::from_tuple({t[0], t[1], t[2], t[3], t[4], t[5]});
  std::uint64_t pe_agg = a.pe, pe_cmb = a.pe;
  if (spec.inter.kind == InterKind::PP) {
    pe_agg = a.pe / 2;
    pe_cmb = a.pe - pe_agg;
    if (!a.pp_split.empty()) {
      const auto s = parse_list(a.pp_split, 2, "--pp-split");
      pe_agg = s[0];
      pe_cmb = s[1];
    }
  }
  const ValidationReport r = validate(spec, pe_agg, pe_cmb);
  char eff[96];
  std::snprintf(eff, sizeof eff, "mapping efficiency: aggregation %.4f, combination %.4f\n",
                r.mapping_efficiency_agg, r.mapping_efficiency_cmb);
  out << "tiles: " << spec.tiles->to_string() << " on " << pe_agg << "+" << pe_cmb << " PEs\n"
      << eff;
  for (const auto& w : r.warnings) out << "warning [" << w.rule << "] " << w.message << "\n";
  for (const auto& v : r.violations) out << "violation [" << v.rule << "] " << v.message << "\n";
  out << (r.legal ? "legal" : "illegal") << "\n";
  return r.legal ? kExitOk : kExitIllegal;
}

struct GenArgs {
  std::uint64_t vertices = 0;
  std::uint32_t features = 1;
  double avg_degree = 1.0;
  std::string model = "uniform-random";
  std::uint64_t seed = 0;
  bool self_loops = false;
  std::string out_path;
};

int do_gen_graph(const GenArgs& a, std::ostream& out) {
  CsrGraph g = generate_synthetic(
      {a.vertices, a.features, a.avg_degree, degree_model_from_string(a.model), a.seed});
  if (a.self_loops) g = with_self_loops(g);
  std::ostringstream text;
  write_edge_list(g, text);
  if (a.out_path.empty()) {
    out << text.str();
  } else {
    write_file(a.out_path, text.str());
    const DegreeStats s = degree_stats(g);
    out << "vertices " << g.num_vertices() << ", edges " << s.total_edges << ", degree min "
        << s.min_degree << " avg " << s.avg_degree << " max " << s.max_degree << "\n";
  }
  return kExitOk;
}

int do_report(const std::string& csv, const std::string& kind, const std::string& out_path,
              std::ostream& out) {
  const ChartKind k = chart_kind_from_string(kind);
  const std::string svg = render_chart(k, parse_rows_csv(read_file(csv)));
  if (out_path.empty()) out << svg;
  else write_file(out_path, svg);
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Analytical GNN accelerator dataflow simulator"};
  app.require_subcommand(1);

  std::string config, csv_path;
  auto* simulate = app.add_subcommand("simulate", "Run every dataset x dataflow row of a config");
  simulate->add_option("config", config, "JSON config file")->required();
  simulate->add_option("--csv", csv_path, "Write rows here instead of the config's output.csv");
  auto* sweep = app.add_subcommand("sweep", "Like simulate, skipping illegal tile-grid points");
  sweep->add_option("config", config, "JSON config file")->required();
  sweep->add_option("--csv", csv_path, "Write rows here instead of the config's output.csv");

  ValidateArgs va;
  auto* validate_cmd = app.add_subcommand("validate", "Check a dataflow string and tile tuple");
  validate_cmd->add_option("dataflow", va.dataflow, "e.g. \"PP_AC(V_x F_s N_t, V_s G_s F_t)\"")
      ->required();
  validate_cmd->add_option("--tiles", va.tiles, "T_V_AGG,T_N,T_F_AGG,T_V_CMB,T_G,T_F_CMB");
  validate_cmd->add_option("--pe", va.pe, "Total PE count")->capture_default_str();
  validate_cmd->add_option("--pp-split", va.pp_split, "PP budget as AGG,CMB (default even)");
  validate_cmd->add_option("--granularity", va.granularity, "PP granularity: element|row|column");
  validate_cmd->add_option("--sp-variant", va.sp_variant, "SP variant: engn|arbitrary");

  GenArgs ga;
  auto* gen = app.add_subcommand("gen-graph", "Write a synthetic edge list");
  gen->add_option("--vertices", ga.vertices, "Vertex count")->required();
  gen->add_option("--features", ga.features, "Feature width")->capture_default_str();
  gen->add_option("--avg-degree", ga.avg_degree, "Average degree")->required();
  gen->add_option("--model", ga.model, "uniform-random | fixed-degree | skewed")
      ->capture_default_str();
  gen->add_option("--seed", ga.seed, "Generator seed")->capture_default_str();
  gen->add_flag("--self-loops", ga.self_loops, "Add (v,v) for every vertex");
  gen->add_option("--out", ga.out_path, "Output path (stdout when omitted)");

  std::string report_csv, kind, report_out;
  auto* report = app.add_subcommand("report", "Render an SVG chart from a rows CSV");
  report->add_option("csv", report_csv, "CSV written by simulate/sweep")->required();
  report->add_option("--kind", kind, "runtime-bars | energy-stacked | gb-breakdown")->required();
  report->add_option("--out", report_out, "SVG path (stdout when omitted)");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  }

  try {
    if (*simulate) return do_sweep(config, csv_path, SweepMode::Strict, out, err);
    if (*sweep) return do_sweep(config, csv_path, SweepMode::SkipIllegal, out, err);
    if (*validate_cmd) return do_validate(va, out);
    if (*gen) return do_gen_graph(ga, out);
    if (*report) return do_report(report_csv, kind, report_out, out);
  } catch (const IllegalDataflowError& e) {
    err << "error: " << e.what() << "\n";
    return kExitIllegal;
  } catch (const SyntaxError& e) {
    err << "syntax error: " << e.what() << "\n";
    return kExitIllegal;
  } catch (const SemanticError& e) {
    err << "error: " << e.what() << "\n";
    return kExitIllegal;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}

}  // namespace gnnflow::cli
