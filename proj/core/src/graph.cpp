#include "gnnflow/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include "gnnflow/error.hpp"
#include "gnnflow/random.hpp"

namespace gnnflow {

CsrGraph::CsrGraph(std::vector<EdgeOffset> vertex_array,
                   std::vector<VertexId> edge_array, std::uint32_t num_features)
    : vertex_array_(std::move(vertex_array)),
      edge_array_(std::move(edge_array)),
      num_features_(num_features) {
  if (vertex_array_.empty() || vertex_array_.front() != 0)
    throw ShapeError("vertex array must start at 0");
  if (vertex_array_.back() != edge_array_.size())
    throw ShapeError("vertex array must end at the edge count");
  if (!std::is_sorted(vertex_array_.begin(), vertex_array_.end()))
    throw ShapeError("vertex array must be non-decreasing");
  const std::uint64_t v = num_vertices();
  for (VertexId n : edge_array_) {
    if (n >= v) throw ShapeError("neighbor id " + std::to_string(n) + " out of range");
  }
}

std::uint64_t CsrGraph::max_degree() const {
  std::uint64_t best = 0;
  for (std::uint64_t v = 0; v < num_vertices(); ++v) best = std::max(best, degree(v));
  return best;
}

DegreeStats degree_stats(const CsrGraph& g) {
  DegreeStats s;
  const std::uint64_t v = g.num_vertices();
  if (v == 0) return s;
  s.min_degree = std::numeric_limits<std::uint64_t>::max();
  for (std::uint64_t i = 0; i < v; ++i) {
    const std::uint64_t d = g.degree(i);
    s.min_degree = std::min(s.min_degree, d);
    s.max_degree = std::max(s.max_degree, d);
    s.total_edges += d;
  }
  s.avg_degree = static_cast<double>(s.total_edges) / static_cast<double>(v);
  return s;
}

CsrGraph build_csr(std::uint64_t num_vertices,
                   std::vector<std::pair<VertexId, VertexId>> edges,
                   std::uint32_t num_features) {
  if (num_vertices > std::numeric_limits<VertexId>::max())
    throw RangeError("too many vertices for 32-bit ids");
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  std::vector<EdgeOffset> offsets(num_vertices + 1, 0);
  std::vector<VertexId> targets;
  targets.reserve(edges.size());
  for (const auto& [src, dst] : edges) {
    if (src >= num_vertices || dst >= num_vertices)
      throw RangeError("edge (" + std::to_string(src) + "," + std::to_string(dst) +
                       ") outside " + std::to_string(num_vertices) + " vertices");
    ++offsets[src + 1];
    targets.push_back(dst);
  }
  for (std::uint64_t i = 0; i < num_vertices; ++i) offsets[i + 1] += offsets[i];
  return CsrGraph(std::move(offsets), std::move(targets), num_features);
}

namespace {

std::vector<std::pair<VertexId, VertexId>> pairs_of(const CsrGraph& g) {
  std::vector<std::pair<VertexId, VertexId>> out;
  out.reserve(g.num_edges());
  for (std::uint64_t v = 0; v < g.num_vertices(); ++v)
    for (VertexId n : g.neighbors(v)) out.emplace_back(static_cast<VertexId>(v), n);
  return out;
}

}  // namespace

CsrGraph with_self_loops(const CsrGraph& g) {
  auto edges = pairs_of(g);
  for (std::uint64_t v = 0; v < g.num_vertices(); ++v)
    edges.emplace_back(static_cast<VertexId>(v), static_cast<VertexId>(v));
  return build_csr(g.num_vertices(), std::move(edges), g.num_features());
}

CsrGraph transpose(const CsrGraph& g) {
  auto edges = pairs_of(g);
  for (auto& e : edges) std::swap(e.first, e.second);
  return build_csr(g.num_vertices(), std::move(edges), g.num_features());
}

CsrGraph read_edge_list(std::istream& in, const EdgeListOptions& opts) {
  std::vector<std::pair<std::uint64_t, std::uint64_t>> raw;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    std::string a, b, extra;
    if (!(fields >> a >> b)) throw ParseError(line_no, "expected \"src dst\"");
    if (fields >> extra) throw ParseError(line_no, "trailing field '" + extra + "'");
    auto parse_id = [&](const std::string& tok) -> std::uint64_t {
      if (tok.front() == '-')
        throw RangeError("line " + std::to_string(line_no) + ": negative vertex id " + tok);
      std::size_t used = 0;
      unsigned long long value = 0;
      try {
        value = std::stoull(tok, &used);
      } catch (const std::out_of_range&) {
        throw RangeError("line " + std::to_string(line_no) + ": vertex id " + tok +
                         " out of range");
      } catch (const std::invalid_argument&) {
        throw ParseError(line_no, "not a vertex id: '" + tok + "'");
      }
      if (used != tok.size()) throw ParseError(line_no, "not a vertex id: '" + tok + "'");
      if (value >= std::numeric_limits<VertexId>::max())
        throw RangeError("line " + std::to_string(line_no) + ": vertex id " + tok +
                         " out of range");
      if (opts.num_vertices && value >= *opts.num_vertices)
        throw RangeError("line " + std::to_string(line_no) + ": vertex id " + tok +
                         " >= " + std::to_string(*opts.num_vertices));
      return value;
    };
    const std::uint64_t src = parse_id(a);
    const std::uint64_t dst = parse_id(b);
    raw.emplace_back(src, dst);
  }

  std::uint64_t num_vertices = 0;
  std::vector<std::pair<VertexId, VertexId>> edges;
  edges.reserve(raw.size());
  if (opts.num_vertices) {
    num_vertices = *opts.num_vertices;
    for (const auto& [s, d] : raw)
      edges.emplace_back(static_cast<VertexId>(s), static_cast<VertexId>(d));
  } else {
    std::vector<std::uint64_t> ids;
    ids.reserve(raw.size() * 2);
    for (const auto& [s, d] : raw) {
      ids.push_back(s);
      ids.push_back(d);
    }
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    auto dense = [&](std::uint64_t id) {
      return static_cast<VertexId>(std::lower_bound(ids.begin(), ids.end(), id) - ids.begin());
    };
    num_vertices = ids.size();
    for (const auto& [s, d] : raw) edges.emplace_back(dense(s), dense(d));
  }
  if (opts.add_self_loops)
    for (std::uint64_t v = 0; v < num_vertices; ++v)
      edges.emplace_back(static_cast<VertexId>(v), static_cast<VertexId>(v));
  return build_csr(num_vertices, std::move(edges), opts.num_features);
}

CsrGraph load_edge_list(const std::filesystem::path& path, const EdgeListOptions& opts) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open edge list " + path.string());
  return read_edge_list(in, opts);
}

void write_edge_list(const CsrGraph& g, std::ostream& out) {
  out << "# vertices " << g.num_vertices() << " edges " << g.num_edges() << " features "
      << g.num_features() << '\n';
  for (std::uint64_t v = 0; v < g.num_vertices(); ++v)
    for (VertexId n : g.neighbors(v)) out << v << ' ' << n << '\n';
}

std::string_view to_string(DegreeModel m) {
  switch (m) {
    case DegreeModel::UniformRandom: return "uniform-random";
    case DegreeModel::FixedDegree: return "fixed-degree";
    case DegreeModel::Skewed: return "skewed";
  }
  return "?";
}

DegreeModel degree_model_from_string(std::string_view s) {
  if (s == "uniform-random") return DegreeModel::UniformRandom;
  if (s == "fixed-degree") return DegreeModel::FixedDegree;
  if (s == "skewed") return DegreeModel::Skewed;
  throw ConfigError("unknown degree model '" + std::string(s) + "'");
}

namespace {

// Floyd's algorithm: `count` distinct values from [0, range), in draw order.
std::vector<std::uint64_t> sample_distinct(Rng& rng, std::uint64_t range, std::uint64_t count) {
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(count * 2);
  std::vector<std::uint64_t> out;
  out.reserve(count);
  for (std::uint64_t j = range - count; j < range; ++j) {
    const std::uint64_t t = rng.below(j + 1);
    const std::uint64_t pick = seen.insert(t).second ? t : j;
    if (pick == j) seen.insert(j);
    out.push_back(pick);
  }
  return out;
}

std::vector<std::uint64_t> skewed_degrees(Rng& rng, std::uint64_t v, double mean) {
  // Inverse CDF of p(x) ~ x^-2 on [1, V].
  const double upper = static_cast<double>(v);
  std::vector<double> raw(v);
  double sum = 0.0;
  for (auto& x : raw) {
    const double u = rng.uniform();
    x = 1.0 / (1.0 - u * (1.0 - 1.0 / upper));
    sum += x;
  }
  // Scale so the capped degrees keep the requested mean; the capped total is
  // monotone in the scale, so bisection finds it.
  const double target = mean * upper;
  auto capped_total = [&](double scale) {
    double t = 0.0;
    for (double x : raw) t += std::min(upper, x * scale);
    return t;
  };
  double lo = 0.0, hi = std::max(1.0, upper * upper / sum) * upper;
  for (int i = 0; i < 200 && capped_total(hi) < target; ++i) hi *= 2.0;
  for (int i = 0; i < 100; ++i) {
    const double mid = 0.5 * (lo + hi);
    (capped_total(mid) < target ? lo : hi) = mid;
  }
  std::vector<std::uint64_t> degrees(v);
  for (std::uint64_t i = 0; i < v; ++i)
    degrees[i] = static_cast<std::uint64_t>(std::min(upper, std::round(raw[i] * hi)));
  return degrees;
}

}  // namespace

CsrGraph generate_synthetic(const SyntheticSpec& spec) {
  const std::uint64_t v = spec.num_vertices;
  if (v == 0) throw ConfigError("synthetic graph needs at least one vertex");
  if (!(spec.avg_degree >= 0.0)) throw ConfigError("average degree must be >= 0");
  if (spec.avg_degree > static_cast<double>(v))
    throw InfeasibleError("average degree " + std::to_string(spec.avg_degree) +
                          " exceeds vertex count " + std::to_string(v));
  Rng rng(spec.seed);
  std::vector<std::pair<VertexId, VertexId>> edges;

  if (spec.model == DegreeModel::UniformRandom) {
    const auto cells = static_cast<std::uint64_t>(std::llround(spec.avg_degree * static_cast<double>(v)));
    for (std::uint64_t cell : sample_distinct(rng, v * v, cells))
      edges.emplace_back(static_cast<VertexId>(cell / v), static_cast<VertexId>(cell % v));
  } else {
    std::vector<std::uint64_t> degrees;
    if (spec.model == DegreeModel::FixedDegree)
      degrees.assign(v, static_cast<std::uint64_t>(std::llround(spec.avg_degree)));
    else
      degrees = skewed_degrees(rng, v, spec.avg_degree);
    std::uint64_t total = 0;
    for (auto d : degrees) total += d;
    edges.reserve(total);
    for (std::uint64_t row = 0; row < v; ++row)
      for (std::uint64_t n : sample_distinct(rng, v, degrees[row]))
        edges.emplace_back(static_cast<VertexId>(row), static_cast<VertexId>(n));
  }
  return build_csr(v, std::move(edges), spec.num_features);
}

CsrGraph batch_graphs(std::span<const CsrGraph> graphs, std::size_t batch_size) {
  if (graphs.empty() || batch_size == 0) throw ShapeError("empty batch");
  const std::size_t count = std::min(batch_size, graphs.size());
  const std::uint32_t features = graphs.front().num_features();
  std::vector<EdgeOffset> offsets{0};
  std::vector<VertexId> targets;
  std::uint64_t base = 0;
  for (std::size_t i = 0; i < count; ++i) {
    const CsrGraph& g = graphs[i];
    if (g.num_features() != features)
      throw ShapeError("graph " + std::to_string(i) + " has " +
                       std::to_string(g.num_features()) + " features, expected " +
                       std::to_string(features));
    const EdgeOffset edge_base = offsets.back();
    for (std::uint64_t v = 1; v <= g.num_vertices(); ++v)
      offsets.push_back(edge_base + g.vertex_array()[v]);
    for (VertexId n : g.edge_array()) targets.push_back(static_cast<VertexId>(base + n));
    base += g.num_vertices();
  }
  if (base > std::numeric_limits<VertexId>::max()) throw RangeError("batch too large");
  return CsrGraph(std::move(offsets), std::move(targets), features);
}

}  // namespace gnnflow
