#include "gnnflow/taxonomy.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "gnnflow/error.hpp"

namespace gnnflow {

char to_char(Dim d) {
  switch (d) {
    case Dim::V: return 'V';
    case Dim::F: return 'F';
    case Dim::N: return 'N';
    case Dim::G: return 'G';
  }
  return '?';
}

char to_char(Mapping m) {
  switch (m) {
    case Mapping::Spatial: return 's';
    case Mapping::Temporal: return 't';
    case Mapping::Either: return 'x';
  }
  return '?';
}

std::string_view to_string(Phase p) {
  return p == Phase::Aggregation ? "aggregation" : "combination";
}

std::string_view to_string(InterKind k) {
  switch (k) {
    case InterKind::Seq: return "Seq";
    case InterKind::SpArbitrary: return "SP-arbitrary";
    case InterKind::SpEngn: return "SP-EnGN";
    case InterKind::PP: return "PP";
  }
  return "?";
}

std::string_view to_string(Granularity g) {
  switch (g) {
    case Granularity::Element: return "element";
    case Granularity::Row: return "row";
    case Granularity::Column: return "column";
  }
  return "?";
}

Granularity granularity_from_string(std::string_view s) {
  std::string lower(s);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "element") return Granularity::Element;
  if (lower == "row") return Granularity::Row;
  if (lower == "column") return Granularity::Column;
  throw ConfigError("unknown granularity '" + std::string(s) + "'");
}

std::optional<std::size_t> LoopSpec::position(Dim d) const {
  for (std::size_t i = 0; i < loops.size(); ++i)
    if (loops[i].dim == d) return i;
  return std::nullopt;
}

const Loop& LoopSpec::at(Dim d) const {
  auto pos = position(d);
  if (!pos) throw SemanticError(std::string("loop spec has no ") + to_char(d) + " loop");
  return loops[*pos];
}

std::string LoopSpec::order() const {
  std::string out;
  for (const auto& l : loops) out.push_back(to_char(l.dim));
  return out;
}

std::uint64_t TileConfig::tile(Phase p, Dim d) const {
  if (p == Phase::Aggregation) {
    switch (d) {
      case Dim::V: return t_v_agg;
      case Dim::F: return t_f_agg;
      case Dim::N: return t_n;
      case Dim::G: break;
    }
  } else {
    switch (d) {
      case Dim::V: return t_v_cmb;
      case Dim::F: return t_f_cmb;
      case Dim::G: return t_g;
      case Dim::N: break;
    }
  }
  throw SemanticError(std::string("no ") + to_char(d) + " tile in " +
                      std::string(gnnflow::to_string(p)));
}

std::string TileConfig::to_string() const {
  std::ostringstream os;
  os << '(' << t_v_agg << ',' << t_n << ',' << t_f_agg << ',' << t_v_cmb << ',' << t_g << ','
     << t_f_cmb << ')';
  return os.str();
}

// --- parsing ---------------------------------------------------------------

namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  DataflowSpec run() {
    DataflowSpec spec;
    skip_ws();
    const std::size_t inter_at = pos_;
    std::string inter;
    while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_])))
      inter.push_back(text_[pos_++]);
    if (inter == "Seq" || inter == "SEQ" || inter == "seq") {
      spec.inter = {InterKind::Seq, std::nullopt};
    } else if (inter == "SP") {
      spec.inter = {InterKind::SpEngn, std::nullopt};
    } else if (inter == "PP") {
      spec.inter = {InterKind::PP, Granularity::Row};
    } else {
      throw SyntaxError(inter_at, "expected Seq, SP or PP");
    }
    expect('_');
    skip_ws();
    const std::size_t order_at = pos_;
    const std::string_view order = text_.substr(pos_, 2);
    if (order == "AC") {
      spec.order = PhaseOrder::AC;
    } else if (order == "CA") {
      spec.order = PhaseOrder::CA;
    } else {
      throw SyntaxError(order_at, "expected phase order AC or CA");
    }
    pos_ += 2;
    skip_ws();
    expect('(');
    spec.agg = loops(',');
    expect(',');
    spec.cmb = loops(')');
    expect(')');
    skip_ws();
    if (pos_ != text_.size()) throw SyntaxError(pos_, "trailing characters");
    check_phase(spec.agg, Phase::Aggregation);
    check_phase(spec.cmb, Phase::Combination);
    return spec;
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  void expect(char c) {
    skip_ws();
    if (pos_ >= text_.size() || text_[pos_] != c)
      throw SyntaxError(pos_, std::string("expected '") + c + "'");
    ++pos_;
  }

  LoopSpec loops(char terminator) {
    LoopSpec spec;
    std::optional<std::size_t> open_group;
    for (;;) {
      skip_ws();
      if (pos_ >= text_.size()) throw SyntaxError(pos_, "unexpected end of input");
      const char c = text_[pos_];
      if (c == terminator && !open_group) break;
      if (c == '{') {
        if (open_group) throw SyntaxError(pos_, "nested '{'");
        open_group = spec.loops.size();
        ++pos_;
        continue;
      }
      if (c == '}') {
        if (!open_group) throw SyntaxError(pos_, "unmatched '}'");
        if (*open_group == spec.loops.size()) throw SyntaxError(pos_, "empty '{}' group");
        spec.groups.push_back({*open_group, spec.loops.size()});
        open_group.reset();
        ++pos_;
        continue;
      }
      spec.loops.push_back(loop_token());
    }
    if (spec.loops.empty()) throw SyntaxError(pos_, "empty loop list");
    return spec;
  }

  Loop loop_token() {
    const std::size_t at = pos_;
    Loop loop{};
    switch (text_[pos_]) {
      case 'V': loop.dim = Dim::V; break;
      case 'F': loop.dim = Dim::F; break;
      case 'N': loop.dim = Dim::N; break;
      case 'G': loop.dim = Dim::G; break;
      default: throw SyntaxError(at, std::string("unknown dim '") + text_[pos_] + "'");
    }
    ++pos_;
    if (pos_ < text_.size() && text_[pos_] == '_') ++pos_;
    if (pos_ >= text_.size()) throw SyntaxError(pos_, "missing subscript");
    switch (text_[pos_]) {
      case 's': loop.mapping = Mapping::Spatial; break;
      case 't': loop.mapping = Mapping::Temporal; break;
      case 'x': loop.mapping = Mapping::Either; break;
      default: throw SyntaxError(pos_, std::string("unknown subscript '") + text_[pos_] + "'");
    }
    ++pos_;
    return loop;
  }

  static void check_phase(const LoopSpec& spec, Phase phase) {
    const Dim reduction = phase == Phase::Aggregation ? Dim::N : Dim::G;
    const Dim foreign = phase == Phase::Aggregation ? Dim::G : Dim::N;
    for (const auto& l : spec.loops) {
      if (l.dim == foreign)
        throw SemanticError(std::string(1, to_char(foreign)) + " loop in " +
                            std::string(to_string(phase)) + " spec");
    }
    for (Dim d : {Dim::V, Dim::F, reduction}) {
      const auto n = std::count_if(spec.loops.begin(), spec.loops.end(),
                                   [d](const Loop& l) { return l.dim == d; });
      if (n > 1)
        throw SemanticError(std::string("duplicate ") + to_char(d) + " loop in " +
                            std::string(to_string(phase)) + " spec");
      if (n == 0)
        throw SemanticError(std::string("missing ") + to_char(d) + " loop in " +
                            std::string(to_string(phase)) + " spec");
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

void format_loops(std::ostringstream& os, const LoopSpec& spec) {
  for (std::size_t i = 0; i < spec.loops.size(); ++i) {
    if (i) os << ' ';
    for (const auto& g : spec.groups)
      if (g.begin == i) os << '{';
    os << to_char(spec.loops[i].dim) << '_' << to_char(spec.loops[i].mapping);
    for (const auto& g : spec.groups)
      if (g.end == i + 1) os << '}';
  }
}

}  // namespace

DataflowSpec parse_dataflow(std::string_view text) { return Parser(text).run(); }

std::string format_dataflow(const DataflowSpec& spec) {
  std::ostringstream os;
  switch (spec.inter.kind) {
    case InterKind::Seq: os << "Seq"; break;
    case InterKind::SpArbitrary:
    case InterKind::SpEngn: os << "SP"; break;
    case InterKind::PP: os << "PP"; break;
  }
  os << '_' << (spec.order == PhaseOrder::AC ? "AC" : "CA") << '(';
  format_loops(os, spec.agg);
  os << ", ";
  format_loops(os, spec.cmb);
  os << ')';
  return os.str();
}

bool token_equivalent(std::string_view a, std::string_view b) {
  auto strip = [](std::string_view s) {
    std::string out;
    for (std::size_t i = 0; i < s.size(); ++i) {
      const char c = s[i];
      if (std::isspace(static_cast<unsigned char>(c))) continue;
      // "V_s" and "Vs" are the same token.
      if (c == '_' && i > 0 && std::string_view("VFNG").find(s[i - 1]) != std::string_view::npos)
        continue;
      out.push_back(c);
    }
    return out;
  };
  return strip(a) == strip(b);
}

// --- validation -------------------------------------------------------------

IntermediateAxes intermediate_axes(PhaseOrder order) {
  if (order == PhaseOrder::AC) return {Dim::V, Dim::F, Dim::V, Dim::F};
  return {Dim::N, Dim::F, Dim::V, Dim::G};
}

std::uint64_t row_tile_max(const DataflowSpec& spec) {
  const auto axes = intermediate_axes(spec.order);
  const TileConfig& t = spec.tiles.value();
  return std::max(t.tile(Phase::Aggregation, axes.agg_row), t.tile(Phase::Combination, axes.cmb_row));
}

std::uint64_t col_tile_max(const DataflowSpec& spec) {
  const auto axes = intermediate_axes(spec.order);
  const TileConfig& t = spec.tiles.value();
  return std::max(t.tile(Phase::Aggregation, axes.agg_col), t.tile(Phase::Combination, axes.cmb_col));
}

namespace {

// Every loop order reachable by permuting inside brace groups.
std::vector<std::vector<Dim>> admissible_orders(const LoopSpec& spec) {
  std::vector<Dim> base;
  for (const auto& l : spec.loops) base.push_back(l.dim);
  std::vector<std::vector<Dim>> out{base};
  for (const auto& g : spec.groups) {
    std::vector<std::vector<Dim>> next;
    for (auto order : out) {
      std::sort(order.begin() + static_cast<std::ptrdiff_t>(g.begin),
                order.begin() + static_cast<std::ptrdiff_t>(g.end));
      do {
        next.push_back(order);
      } while (std::next_permutation(order.begin() + static_cast<std::ptrdiff_t>(g.begin),
                                     order.begin() + static_cast<std::ptrdiff_t>(g.end)));
    }
    out = std::move(next);
  }
  return out;
}

template <typename Pred>
bool any_pair(const DataflowSpec& spec, Pred pred) {
  const auto aggs = admissible_orders(spec.agg);
  const auto cmbs = admissible_orders(spec.cmb);
  for (const auto& a : aggs)
    for (const auto& c : cmbs)
      if (pred(a, c)) return true;
  return false;
}

std::string dims_string(std::initializer_list<Dim> dims) {
  std::string s;
  for (Dim d : dims) s.push_back(to_char(d));
  return s;
}

bool multiple_of_smaller(std::uint64_t a, std::uint64_t b) {
  const auto lo = std::min(a, b);
  const auto hi = std::max(a, b);
  return lo > 0 && hi % lo == 0;
}

}  // namespace

ValidationReport validate(const DataflowSpec& spec, std::uint64_t pe_budget_agg,
                          std::uint64_t pe_budget_cmb) {
  ValidationReport report;
  auto violate = [&](std::string_view rule, std::string message) {
    report.violations.push_back({std::string(rule), std::move(message)});
  };
  if (!spec.tiles) {
    violate(rules::kMissingTiles, "no tile configuration attached");
    report.legal = false;
    return report;
  }
  const TileConfig& t = *spec.tiles;
  for (auto v : t.as_tuple())
    if (v == 0) violate(rules::kMissingTiles, "tile sizes must be >= 1");

  // (a) subscript vs tile size.
  for (Phase phase : {Phase::Aggregation, Phase::Combination}) {
    for (const auto& l : spec.loops(phase).loops) {
      const auto tile = t.tile(phase, l.dim);
      if (l.mapping == Mapping::Spatial && tile <= 1)
        violate(rules::kTileMapping, std::string(to_string(phase)) + " " + to_char(l.dim) +
                                         "_s needs tile > 1, got " + std::to_string(tile));
      if (l.mapping == Mapping::Temporal && tile != 1)
        violate(rules::kTileMapping, std::string(to_string(phase)) + " " + to_char(l.dim) +
                                         "_t needs tile = 1, got " + std::to_string(tile));
    }
  }

  // (b) PE fit.
  report.mapping_efficiency_agg =
      pe_budget_agg ? static_cast<double>(t.agg_product()) / static_cast<double>(pe_budget_agg) : 0.0;
  report.mapping_efficiency_cmb =
      pe_budget_cmb ? static_cast<double>(t.cmb_product()) / static_cast<double>(pe_budget_cmb) : 0.0;
  if (t.agg_product() > pe_budget_agg)
    violate(rules::kPeFit, "aggregation tiles use " + std::to_string(t.agg_product()) +
                               " PEs of " + std::to_string(pe_budget_agg));
  if (t.cmb_product() > pe_budget_cmb)
    violate(rules::kPeFit, "combination tiles use " + std::to_string(t.cmb_product()) +
                               " PEs of " + std::to_string(pe_budget_cmb));

  // (c) EnGN-like sequential pipeline keeps the intermediate tile in the PEs.
  if (spec.inter.kind == InterKind::SpEngn) {
    if (spec.order == PhaseOrder::CA) {
      report.warnings.push_back({std::string(rules::kUnspecified),
                                 "EnGN-like SP is only characterized for order AC"});
    } else {
      if (t.t_n != 1) violate(rules::kSpEngn, "reduction must be temporal (T_N = 1)");
      if (t.t_v_agg != t.t_v_cmb) violate(rules::kSpEngn, "T_V_AGG must equal T_V_CMB");
      if (t.t_f_agg != t.t_f_cmb) violate(rules::kSpEngn, "T_F_AGG must equal T_F_CMB");
      const bool order_ok = any_pair(spec, [](const auto& a, const auto& c) {
        return a[2] == Dim::N && c[2] == Dim::G && a[0] == c[0] && a[1] == c[1];
      });
      if (!order_ok)
        violate(rules::kSpEngn, "loop orders must be ({VF}N, {VF}G) with the same V,F order, got (" +
                                    spec.agg.order() + "," + spec.cmb.order() + ")");
    }
  }

  if (spec.inter.kind == InterKind::PP) {
    const auto ax = intermediate_axes(spec.order);
    const Granularity gran = spec.inter.granularity.value_or(Granularity::Row);
    const std::string pair = "(" + spec.agg.order() + "," + spec.cmb.order() + ")";
    // Both phases walk the intermediate matrix element by element.
    auto element_pattern = [&](const auto& a, const auto& c) {
      return (a[0] == ax.agg_row && a[1] == ax.agg_col && c[0] == ax.cmb_row && c[1] == ax.cmb_col) ||
             (a[0] == ax.agg_col && a[1] == ax.agg_row && c[0] == ax.cmb_col && c[1] == ax.cmb_row);
    };
    switch (gran) {
      case Granularity::Element:
        if (!any_pair(spec, element_pattern))
          violate(rules::kPpElement,
                  "element granularity needs the two outer dims of both phases to be the "
                  "intermediate row/column dims in the same order, got " + pair);
        break;
      case Granularity::Row:
        if (!any_pair(spec, [&](const auto& a, const auto& c) {
              return a[0] == ax.agg_row && c[0] == ax.cmb_row &&
                     !(a[1] == ax.agg_col && c[1] == ax.cmb_col);
            }))
          violate(rules::kPpRow, "row granularity needs outer dims (" +
                                     dims_string({ax.agg_row}) + "," + dims_string({ax.cmb_row}) +
                                     ") and not the element-wise pair, got " + pair);
        break;
      case Granularity::Column:
        if (!any_pair(spec, [&](const auto& a, const auto& c) {
              return a[0] == ax.agg_col && c[0] == ax.cmb_col &&
                     !(a[1] == ax.agg_row && c[1] == ax.cmb_row);
            }))
          violate(rules::kPpColumn, "column granularity needs outer dims (" +
                                        dims_string({ax.agg_col}) + "," +
                                        dims_string({ax.cmb_col}) +
                                        ") and not the element-wise pair, got " + pair);
        break;
    }
    const auto rows = std::make_pair(t.tile(Phase::Aggregation, ax.agg_row),
                                     t.tile(Phase::Combination, ax.cmb_row));
    const auto cols = std::make_pair(t.tile(Phase::Aggregation, ax.agg_col),
                                     t.tile(Phase::Combination, ax.cmb_col));
    if (!multiple_of_smaller(rows.first, rows.second))
      violate(rules::kTileMultiple, "row tiles " + std::to_string(rows.first) + " and " +
                                        std::to_string(rows.second) + " are not multiples");
    if (!multiple_of_smaller(cols.first, cols.second))
      violate(rules::kTileMultiple, "column tiles " + std::to_string(cols.first) + " and " +
                                        std::to_string(cols.second) + " are not multiples");
  }

  std::stable_sort(report.violations.begin(), report.violations.end(),
                   [](const Violation& a, const Violation& b) {
                     return a.rule != b.rule ? a.rule < b.rule : a.message < b.message;
                   });
  report.legal = report.violations.empty();
  return report;
}

}  // namespace gnnflow
