#include "report.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>

#include "gnnflow/error.hpp"
#include "sweep.hpp"

namespace gnnflow::cli {

ChartKind chart_kind_from_string(std::string_view s) {
  if (s == "runtime-bars") return ChartKind::RuntimeBars;
  if (s == "energy-stacked") return ChartKind::EnergyStacked;
  if (s == "gb-breakdown") return ChartKind::GbBreakdown;
  throw ConfigError("unknown chart kind '" + std::string(s) + "'");
}

std::string_view to_string(ChartKind k) {
  switch (k) {
    case ChartKind::RuntimeBars: return "runtime-bars";
    case ChartKind::EnergyStacked: return "energy-stacked";
    case ChartKind::GbBreakdown: return "gb-breakdown";
  }
  return "?";
}

namespace {

std::vector<std::string> split_csv_line(std::string_view line, std::size_t line_no) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else {
      fields.back() += c;
    }
  }
  if (quoted) throw ConfigError("csv line " + std::to_string(line_no) + ": unterminated quote");
  return fields;
}

double number(const std::string& s, std::size_t line_no) {
  char* end = nullptr;
  const double x = std::strtod(s.c_str(), &end);
  if (s.empty() || *end != '\0')
    throw ConfigError("csv line " + std::to_string(line_no) + ": '" + s + "' is not a number");
  return x;
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// Fixed palette indexed by operand.
constexpr const char* kOperandColor[kNumOperands] = {"#4e79a7", "#f28e2b", "#e15759",
                                                      "#76b7b2", "#59a14f", "#b07aa1"};

struct Layout {
  static constexpr double kLeft = 70, kTop = 40, kPlotH = 260, kPitch = 48, kBar = 32;
  static constexpr double kRight = 170;  // legend column
  std::size_t n;
  double width() const { return kLeft + kPitch * static_cast<double>(n) + kRight; }
  double height() const { return kTop + kPlotH + 150; }
  double bar_x(std::size_t i) const {
    return kLeft + kPitch * static_cast<double>(i) + (kPitch - kBar) / 2;
  }
  double base_y() const { return kTop + kPlotH; }
};

class Svg {
 public:
  Svg(const Layout& l, const std::string& title) : l_(l) {
    s_ += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(l.width()) + "\" height=\"" +
          fmt(l.height()) + "\" viewBox=\"0 0 " + fmt(l.width()) + " " + fmt(l.height()) +
          "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    s_ += "<rect x=\"0\" y=\"0\" width=\"" + fmt(l.width()) + "\" height=\"" + fmt(l.height()) +
          "\" fill=\"#ffffff\"/>\n";
    s_ += "<text x=\"" + fmt(l.kLeft) + "\" y=\"20\" font-size=\"14\">" + escape(title) +
          "</text>\n";
  }

  void raw(const std::string& s) { s_ += s; }

  void axes(double max_value, const std::string& unit) {
    const double x0 = l_.kLeft, y0 = l_.base_y();
    const double x1 = l_.kLeft + l_.kPitch * static_cast<double>(l_.n);
    s_ += "<line class=\"axis\" x1=\"" + fmt(x0) + "\" y1=\"" + fmt(y0) + "\" x2=\"" + fmt(x1) +
          "\" y2=\"" + fmt(y0) + "\" stroke=\"#000000\"/>\n";
    s_ += "<line class=\"axis\" x1=\"" + fmt(x0) + "\" y1=\"" + fmt(l_.kTop) + "\" x2=\"" +
          fmt(x0) + "\" y2=\"" + fmt(y0) + "\" stroke=\"#000000\"/>\n";
    for (int k = 0; k <= 4; ++k) {
      const double v = max_value * k / 4.0;
      const double y = y0 - l_.kPlotH * k / 4.0;
      char label[48];
      std::snprintf(label, sizeof label, "%.3g", v);
      s_ += "<text class=\"tick\" x=\"" + fmt(x0 - 6) + "\" y=\"" + fmt(y + 4) +
            "\" text-anchor=\"end\">" + label + "</text>\n";
    }
    s_ += "<text x=\"14\" y=\"" + fmt(l_.kTop + l_.kPlotH / 2) + "\" transform=\"rotate(-90 14 " +
          fmt(l_.kTop + l_.kPlotH / 2) + ")\" text-anchor=\"middle\">" + escape(unit) +
          "</text>\n";
  }

  void label(std::size_t i, const std::string& text) {
    const double x = l_.bar_x(i) + l_.kBar / 2;
    const double y = l_.base_y() + 12;
    s_ += "<text class=\"label\" x=\"" + fmt(x) + "\" y=\"" + fmt(y) + "\" transform=\"rotate(45 " +
          fmt(x) + " " + fmt(y) + ")\">" + escape(text) + "</text>\n";
  }

  void legend(const std::vector<std::pair<std::string, std::string>>& entries) {
    const double x = l_.kLeft + l_.kPitch * static_cast<double>(l_.n) + 20;
    double y = l_.kTop;
    for (const auto& [name, color] : entries) {
      s_ += "<rect class=\"legend\" x=\"" + fmt(x) + "\" y=\"" + fmt(y) +
            "\" width=\"12\" height=\"12\" fill=\"" + color + "\"/>\n";
      s_ += "<text x=\"" + fmt(x + 18) + "\" y=\"" + fmt(y + 10) + "\">" + escape(name) +
            "</text>\n";
      y += 18;
    }
  }

  std::string finish() { return s_ + "</svg>\n"; }

 private:
  const Layout& l_;
  std::string s_;
};

std::string row_label(const ChartRow& r) { return r.dataset + " / " + r.dataflow; }

double operand_energy(const ChartRow& r, std::size_t o) {
  double s = 0;
  for (const auto& level : r.energy)
    for (const auto& dir : level) s += dir[o];
  return s;
}

std::string render_runtime(const std::vector<ChartRow>& rows) {
  const Layout l{rows.size()};
  Svg svg(l, "Runtime normalized to baseline");
  double max_v = 1.0;
  for (const auto& r : rows) max_v = std::max(max_v, r.norm_runtime);
  max_v *= 1.1;
  svg.axes(max_v, "normalized runtime");
  const double scale = Layout::kPlotH / max_v;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double h = rows[i].norm_runtime * scale;
    svg.raw("<rect class=\"bar\" data-row=\"" + std::to_string(i) + "\" x=\"" + fmt(l.bar_x(i)) +
            "\" y=\"" + fmt(l.base_y() - h) + "\" width=\"" + fmt(Layout::kBar) + "\" height=\"" +
            fmt(h) + "\" fill=\"#4e79a7\"/>\n");
    svg.label(i, row_label(rows[i]));
  }
  const double y1 = l.base_y() - scale;
  svg.raw("<line class=\"baseline\" x1=\"" + fmt(Layout::kLeft) + "\" y1=\"" + fmt(y1) +
          "\" x2=\"" + fmt(Layout::kLeft + Layout::kPitch * static_cast<double>(rows.size())) +
          "\" y2=\"" + fmt(y1) + "\" stroke=\"#d62728\" stroke-dasharray=\"4 3\"/>\n");
  return svg.finish();
}

struct Segment {
  std::string name;
  std::string color;
  std::string attrs;
  double value;
};

std::string render_stacked(const std::vector<ChartRow>& rows, const std::string& title,
                           const std::string& unit,
                           const std::vector<std::vector<Segment>>& stacks, bool percent,
                           const std::vector<std::pair<std::string, std::string>>& legend) {
  const Layout l{rows.size()};
  Svg svg(l, title);
  double max_v = 0;
  for (const auto& s : stacks) {
    double t = 0;
    for (const auto& seg : s) t += seg.value;
    max_v = std::max(max_v, t);
  }
  if (percent || max_v <= 0) max_v = percent ? 100.0 : 1.0;
  svg.axes(max_v, unit);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    double total = 0;
    for (const auto& seg : stacks[i]) total += seg.value;
    double y = l.base_y();
    for (const auto& seg : stacks[i]) {
      if (seg.value <= 0) continue;
      const double v = percent ? (total > 0 ? 100.0 * seg.value / total : 0.0) : seg.value;
      const double h = v * Layout::kPlotH / max_v;
      y -= h;
      svg.raw("<rect class=\"segment\" data-row=\"" + std::to_string(i) + "\" " + seg.attrs +
              " x=\"" + fmt(l.bar_x(i)) + "\" y=\"" + fmt(y) + "\" width=\"" + fmt(Layout::kBar) +
              "\" height=\"" + fmt(h) + "\" fill=\"" + seg.color + "\"/>\n");
    }
    svg.label(i, row_label(rows[i]));
  }
  svg.legend(legend);
  return svg.finish();
}

}  // namespace

std::vector<ChartRow> parse_rows_csv(std::string_view text) {
  std::vector<std::string_view> lines;
  for (std::size_t pos = 0; pos < text.size();) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    pos = nl + 1;
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty()) throw ConfigError("csv is empty");
  const auto header = csv_header();
  if (split_csv_line(lines[0], 1) != header)
    throw ConfigError("csv header does not match the sweep schema");
  if (lines.size() == 1) throw ConfigError("csv has no rows");

  const std::size_t base = kBaseColumns.size();
  std::vector<ChartRow> rows;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const auto f = split_csv_line(lines[li], li + 1);
    if (f.size() != header.size())
      throw ConfigError("csv line " + std::to_string(li + 1) + ": expected " +
                        std::to_string(header.size()) + " fields, got " +
                        std::to_string(f.size()));
    ChartRow r;
    r.dataset = f[0];
    r.dataflow = f[1];
    for (std::size_t c = 2; c < header.size(); ++c) number(f[c], li + 1);
    r.norm_runtime = number(f[base - 1], li + 1);
    std::size_t c = base;
    for (auto& level : r.energy)
      for (auto& dir : level)
        for (auto& cell : dir) cell = number(f[c++], li + 1);
    rows.push_back(std::move(r));
  }
  return rows;
}

std::string render_chart(ChartKind kind, const std::vector<ChartRow>& rows) {
  if (rows.empty()) throw ConfigError("nothing to chart");
  std::vector<std::pair<std::string, std::string>> legend;
  std::vector<std::vector<Segment>> stacks;
  switch (kind) {
    case ChartKind::RuntimeBars: return render_runtime(rows);
    case ChartKind::EnergyStacked: {
      for (std::size_t o = 0; o < kNumOperands; ++o)
        legend.emplace_back(std::string(to_string(kOperands[o])), kOperandColor[o]);
      for (const auto& r : rows) {
        std::vector<Segment> s;
        for (std::size_t o = 0; o < kNumOperands; ++o) {
          const std::string name(to_string(kOperands[o]));
          s.push_back({name, kOperandColor[o], "data-operand=\"" + name + "\"",
                       operand_energy(r, o)});
        }
        stacks.push_back(std::move(s));
      }
      return render_stacked(rows, "On-chip buffer access energy by operand", "energy (pJ)",
                            stacks, false, legend);
    }
    case ChartKind::GbBreakdown: {
      const char* dirs[2] = {"read", "write"};
      for (std::size_t d = 0; d < 2; ++d)
        for (std::size_t o = 0; o < kNumOperands; ++o)
          legend.emplace_back(std::string(to_string(kOperands[o])) + " " + dirs[d],
                              std::string(kOperandColor[o]) + (d ? "99" : ""));
      for (const auto& r : rows) {
        std::vector<Segment> s;
        for (std::size_t d = 0; d < 2; ++d)
          for (std::size_t o = 0; o < kNumOperands; ++o) {
            const std::string name(to_string(kOperands[o]));
            s.push_back({name, std::string(kOperandColor[o]) + (d ? "99" : ""),
                         "data-operand=\"" + name + "\" data-direction=\"" + dirs[d] + "\"",
                         r.energy[0][d][o]});
          }
        stacks.push_back(std::move(s));
      }
      return render_stacked(rows, "Global buffer energy breakdown", "share of GB energy (%)",
                            stacks, true, legend);
    }
  }
  throw ConfigError("bad chart kind");
}

}  // namespace gnnflow::cli
