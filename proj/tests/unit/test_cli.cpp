#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "gnnflow/error.hpp"
#include "report.hpp"
#include "sweep.hpp"

namespace gnnflow::cli {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  int code;
  std::string out, err;
};

Outcome invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "gnnflow-sim");
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() /
            ("gnnflow_cli_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
             "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  fs::path write(const std::string& name, const std::string& text) const {
    std::ofstream(path_ / name) << text;
    return path_ / name;
  }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* kAllBuiltins =
    R"(["Seq-Nt","Seq-Ns","SP-FsNt-Fs","SP-VsNt-Vs","PP-Nt-Vt/sl","PP-Ns-Vt/sl","PP-Nt-Vsh","PP-Ns-Vsh","High-Vs-SP"])";

TEST(Validate, ExitCodes) {
  EXPECT_EQ(invoke({"validate", "PP_AC(V_x F_s N_t, V_s G_s F_t)"}).code, kExitOk);
  const Outcome legal = invoke({"validate", "PP_AC(V_t F_s N_t, V_s G_s F_t)", "--tiles",
                                "1,1,256,16,16,1"});
  EXPECT_EQ(legal.code, kExitOk) << legal.out;
  EXPECT_NE(legal.out.find("legal"), std::string::npos);
  const Outcome illegal =
      invoke({"validate", "Seq_AC(V_s N_s F_s, V_t G_t F_t)", "--tiles", "4,8,4,1,1,1", "--pe", "64"});
  EXPECT_EQ(illegal.code, kExitIllegal);
  EXPECT_NE(illegal.out.find("[b-pe-fit]"), std::string::npos);
  EXPECT_NE(illegal.out.find("aggregation 2.0000"), std::string::npos);
  EXPECT_EQ(invoke({"validate", "Seq_AC(V_t F_t N_t, V_t G_t F_t"}).code, kExitIllegal);
  EXPECT_EQ(invoke({"validate", "Seq_AC(V_t F_t N_t, V_t G_t F_t)", "--tiles", "1,2"}).code,
            kExitInput);
  EXPECT_EQ(invoke({"validate"}).code, kExitInput);
  EXPECT_EQ(invoke({}).code, kExitInput);
}

TEST(Validate, GranularityAndVariantFlags) {
  EXPECT_EQ(invoke({"validate", "PP_AC(V_x F_x N_x, V_x F_x G_x)", "--tiles", "2,1,2,2,2,2",
                    "--granularity", "element"})
                .code,
            kExitOk);
  EXPECT_EQ(invoke({"validate", "PP_AC(V_x F_x N_x, V_x F_x G_x)", "--tiles", "2,1,2,2,2,2"}).code,
            kExitIllegal);
  EXPECT_EQ(invoke({"validate", "SP_AC(V_s F_x N_t, V_s F_x G_x)", "--tiles", "16,1,32,8,1,32",
                    "--sp-variant", "arbitrary"})
                .code,
            kExitOk);
  EXPECT_EQ(invoke({"validate", "Seq_AC(V_x F_x N_x, V_x F_x G_x)", "--granularity", "row"}).code,
            kExitInput);
}

TEST(Simulate, NineBuiltinsWithBaseline) {
  TempDir dir;
  const auto cfg = dir.write("c.json", std::string(R"({"datasets":["Mutag"],"dataflows":)") +
                                           kAllBuiltins + "}");
  const Outcome o = invoke({"simulate", cfg.string()});
  ASSERT_EQ(o.code, kExitOk) << o.err;
  const auto rows = parse_rows_csv(o.out);
  ASSERT_EQ(rows.size(), 9u);
  EXPECT_EQ(rows[0].dataflow, "Seq-Nt");
  EXPECT_DOUBLE_EQ(rows[0].norm_runtime, 1.0);
  for (const auto& r : rows) {
    EXPECT_GT(r.norm_runtime, 0.0);
    if (r.dataflow == "SP-VsNt-Vs" || r.dataflow == "SP-FsNt-Fs") {
      for (int dir = 0; dir < 2; ++dir)
        EXPECT_EQ(r.energy[static_cast<int>(Level::GB)][dir][static_cast<int>(Operand::Int)], 0.0);
    }
  }
  // Deterministic, also across thread counts.
  const auto cfg_copy = o.out;
  EXPECT_EQ(invoke({"simulate", cfg.string()}).out, cfg_copy);
  const SweepConfig parsed = load_sweep_config(cfg);
  EXPECT_EQ(format_csv(run_sweep(parsed, SweepMode::Strict, 1).rows),
            format_csv(run_sweep(parsed, SweepMode::Strict, 4).rows));
}

TEST(Simulate, WritesCsvAndCharts) {
  TempDir dir;
  const auto cfg = dir.write("c.json", R"J({
    "datasets": [{"synthetic": {"vertices": 200, "features": 32, "avg_degree": 4,
                                "model": "uniform-random", "seed": 2}}],
    "dataflows": ["Seq-Nt", "SP-VsNt-Vs", {"notation": "PP_AC(F_x N_t V_x, F_x G_x V_x)",
                                            "granularity": "column"}],
    "output": {"csv": "out/rows.csv", "charts": {"runtime-bars": "out/rt.svg",
                                                 "gb-breakdown": "out/gb.svg"}}
  })J");
  const Outcome o = invoke({"simulate", cfg.string()});
  ASSERT_EQ(o.code, kExitOk) << o.err;
  EXPECT_EQ(parse_rows_csv(slurp(dir.path() / "out/rows.csv")).size(), 3u);
  EXPECT_NE(slurp(dir.path() / "out/rt.svg").find("<svg"), std::string::npos);
  const std::string gb = slurp(dir.path() / "out/gb.svg");
  EXPECT_NE(gb.find("data-operand"), std::string::npos);
}

TEST(Simulate, InputErrors) {
  TempDir dir;
  EXPECT_EQ(invoke({"simulate", (dir.path() / "missing.json").string()}).code, kExitInput);
  const auto bad_ds = dir.write("d.json", R"({"datasets":["Nope"],"dataflows":["Seq-Nt"]})");
  EXPECT_EQ(invoke({"simulate", bad_ds.string()}).code, kExitInput);
  const auto bad_key = dir.write("k.json", R"({"datasets":["Mutag"],"dataflows":["Seq-Nt"],"x":1})");
  EXPECT_EQ(invoke({"simulate", bad_key.string()}).code, kExitInput);
  const auto bad_json = dir.write("j.json", "{");
  EXPECT_EQ(invoke({"simulate", bad_json.string()}).code, kExitInput);
  const auto bad_flow =
      dir.write("f.json", R"({"datasets":["Mutag"],"dataflows":["Seq_AC(V_t F_t N_t"]})");
  EXPECT_EQ(invoke({"simulate", bad_flow.string()}).code, kExitIllegal);
  const auto illegal = dir.write(
      "i.json",
      R"J({"datasets":["Mutag"],"dataflows":["Seq_AC(V_x F_x N_t, V_x G_x F_x)"],"tiles":[[1024,1,1,1,1,1]],"baseline":"Seq_AC(V_x F_x N_t, V_x G_x F_x)"})J");
  EXPECT_EQ(invoke({"simulate", illegal.string()}).code, kExitIllegal);
}

TEST(Sweep, SkipsIllegalGridPoints) {
  TempDir dir;
  const auto cfg = dir.write("s.json", R"({
    "datasets": ["Mutag"],
    "dataflows": ["Seq-Ns"],
    "baseline": "Seq-Ns",
    "tile_grid": {"t_v_agg": [1, 1024], "t_n": [2, 4]}
  })");
  const Outcome o = invoke({"sweep", cfg.string()});
  ASSERT_EQ(o.code, kExitOk) << o.err;
  EXPECT_EQ(parse_rows_csv(o.out).size(), 2u);
  EXPECT_NE(o.err.find("skipped 2"), std::string::npos);
  EXPECT_EQ(invoke({"simulate", cfg.string()}).code, kExitIllegal);
}

TEST(GenGraph, DeterministicEdgeList) {
  TempDir dir;
  const auto out = dir.path() / "g.txt";
  const Outcome a = invoke({"gen-graph", "--vertices", "50", "--avg-degree", "3", "--seed", "4",
                            "--out", out.string()});
  ASSERT_EQ(a.code, kExitOk) << a.err;
  EXPECT_NE(a.out.find("vertices 50"), std::string::npos);
  const Outcome b = invoke({"gen-graph", "--vertices", "50", "--avg-degree", "3", "--seed", "4"});
  EXPECT_EQ(b.out, slurp(out));
  EXPECT_EQ(invoke({"gen-graph", "--vertices", "5", "--avg-degree", "9"}).code, kExitInput);
  EXPECT_EQ(invoke({"gen-graph", "--vertices", "5", "--avg-degree", "1", "--model", "zipf"}).code,
            kExitInput);
}

TEST(Report, ChartsFromCsv) {
  TempDir dir;
  const auto cfg = dir.write("c.json", R"({"datasets":["Cora"],"dataflows":["Seq-Nt","PP-Nt-Vsh"]})");
  const Outcome sim = invoke({"simulate", cfg.string(), "--csv", (dir.path() / "r.csv").string()});
  ASSERT_EQ(sim.code, kExitOk) << sim.err;
  for (const char* kind : {"runtime-bars", "energy-stacked", "gb-breakdown"}) {
    const Outcome o = invoke({"report", (dir.path() / "r.csv").string(), "--kind", kind});
    EXPECT_EQ(o.code, kExitOk) << kind << o.err;
    EXPECT_NE(o.out.find("</svg>"), std::string::npos);
  }
  const Outcome bars = invoke({"report", (dir.path() / "r.csv").string(), "--kind", "runtime-bars"});
  EXPECT_NE(bars.out.find("class=\"baseline\""), std::string::npos);
  EXPECT_EQ(invoke({"report", dir.write("e.csv", "").string(), "--kind", "runtime-bars"}).code,
            kExitInput);
  EXPECT_EQ(invoke({"report", dir.write("h.csv", "a,b\n1,2\n").string(), "--kind", "runtime-bars"}).code,
            kExitInput);
  EXPECT_EQ(invoke({"report", (dir.path() / "r.csv").string(), "--kind", "pie"}).code, kExitInput);
}

TEST(Config, ParsesEverySection) {
  const SweepConfig c = parse_sweep_config(R"J({
    "datasets": ["Cora", {"registry": "Mutag"}],
    "dataflows": [{"builtin": "Seq-Nt"}, {"notation": "SP_AC(V_s F_x N_t, V_s F_x G_x)",
                                          "sp_variant": "arbitrary", "name": "arb"}],
    "tiles": [[1, 1, 8, 1, 8, 8]],
    "tile_policy": "vertex-first",
    "hw": {"pe_count": 256, "pp_split": [64, 192], "distribution_latency": 2, "fill_bandwidth": 16},
    "layer": {"G": 8, "batch_size": 4, "self_loops": false, "seed": 9, "degree_model": "fixed-degree"},
    "energy": {"gb_access_pj": 2.0, "l1_access_pj": 0.1}
  })J");
  EXPECT_EQ(c.datasets.size(), 2u);
  EXPECT_EQ(c.dataflows[1].name, "arb");
  EXPECT_EQ(c.dataflows[1].spec.inter.kind, InterKind::SpArbitrary);
  EXPECT_EQ(c.tiles.size(), 1u);
  EXPECT_EQ(c.tile_policy, TilePolicy::VertexFirst);
  EXPECT_EQ(c.hw.pe_count, 256u);
  EXPECT_EQ((*c.hw.pp_split)[1], 192u);
  EXPECT_EQ(c.layer.out_features, 8u);
  EXPECT_FALSE(c.layer.self_loops);
  EXPECT_EQ(c.layer.degree_model, DegreeModel::FixedDegree);
  EXPECT_DOUBLE_EQ(c.energy.gb_access_pj, 2.0);
  EXPECT_THROW(parse_sweep_config(R"({"datasets":["Cora"],"dataflows":["Seq-Ns"]})"), ConfigError);
  EXPECT_THROW(parse_sweep_config(R"({"datasets":[],"dataflows":["Seq-Nt"]})"), ConfigError);
  EXPECT_THROW(parse_sweep_config(R"({"datasets":["Cora"],"dataflows":["Seq-Nt"],"tile_grid":[[1]]})"),
               ConfigError);
  EXPECT_THROW(parse_sweep_config(R"({"datasets":["Cora"],"dataflows":["Seq-Nt"],"tile_grid":{"t_x":[1]}})"),
               ConfigError);
}

TEST(Csv, HeaderShape) {
  const auto h = csv_header();
  EXPECT_EQ(h.size(), 16u + 24u);
  EXPECT_EQ(h.front(), "dataset");
  EXPECT_EQ(energy_column(Level::GB, Direction::Read, Operand::Adj), "gb_read_adj");
  EXPECT_EQ(h.back(), "l1_write_psum");
}

}  // namespace
}  // namespace gnnflow::cli
