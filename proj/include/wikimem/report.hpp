#pragma once

// Figures and tables: SVG for inspection, CSV as the data contract.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "wikimem/consolidation.hpp"
#include "wikimem/contextualization.hpp"
#include "wikimem/csv.hpp"
#include "wikimem/deliberation.hpp"
#include "wikimem/error.hpp"
#include "wikimem/hash.hpp"
#include "wikimem/salience.hpp"
#include "wikimem/svg.hpp"

namespace wikimem {

enum class FigureKind { Line, Heatmap, StackedArea, TimelineBars, Table };

inline std::string_view to_string(FigureKind k) {
  switch (k) {
    case FigureKind::Line: return "Line";
    case FigureKind::Heatmap: return "Heatmap";
    case FigureKind::StackedArea: return "StackedArea";
    case FigureKind::TimelineBars: return "TimelineBars";
    case FigureKind::Table: return "Table";
  }
  return "Line";
}

struct FigureSpec {
  FigureKind kind = FigureKind::Line;
  std::string title;
  bool normalized = false;
};

struct LineSeries {
  std::string name;
  std::vector<std::optional<double>> values;  // aligned with LineData::x_labels; nullopt = no point
};

struct LineData {
  std::vector<std::string> x_labels;
  std::vector<LineSeries> series;
  std::string y_label;
};

struct HeatmapData {
  std::vector<std::string> row_labels;
  std::vector<std::string> col_labels;
  std::vector<double> values;            // row-major, expected in [0, 1]
  std::vector<std::size_t> row_breaks;   // rows where a new group starts (boundary lines)
  std::vector<std::size_t> col_breaks;
};

struct StackedAreaData {
  std::vector<std::string> x_labels;
  std::vector<LineSeries> layers;  // bottom to top; missing values count as 0
};

struct TimelineBarsData {
  std::vector<std::string> x_labels;
  std::vector<std::string> row_labels;
  std::vector<EgoCell> cells;  // row-major
};

struct TableData {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

using FigureData = std::variant<LineData, HeatmapData, StackedAreaData, TimelineBarsData, TableData>;

namespace detail {

inline FigureKind kind_of(const FigureData& d) {
  return static_cast<FigureKind>(d.index());
}

inline void check_series(const std::vector<std::string>& x, const std::vector<LineSeries>& series) {
  for (const auto& s : series) {
    if (s.values.size() != x.size()) {
      throw Error(ErrorKind::ShapeMismatch, "series '" + s.name + "' has " + std::to_string(s.values.size()) +
                                                " values for " + std::to_string(x.size()) + " periods");
    }
  }
}

inline void check_shape(const FigureData& data) {
  if (const auto* l = std::get_if<LineData>(&data)) check_series(l->x_labels, l->series);
  if (const auto* s = std::get_if<StackedAreaData>(&data)) check_series(s->x_labels, s->layers);
  if (const auto* h = std::get_if<HeatmapData>(&data)) {
    if (h->values.size() != h->row_labels.size() * h->col_labels.size()) {
      throw Error(ErrorKind::ShapeMismatch, "heatmap has " + std::to_string(h->values.size()) + " cells for " +
                                                std::to_string(h->row_labels.size()) + "x" +
                                                std::to_string(h->col_labels.size()));
    }
  }
  if (const auto* t = std::get_if<TimelineBarsData>(&data)) {
    if (t->cells.size() != t->row_labels.size() * t->x_labels.size()) {
      throw Error(ErrorKind::ShapeMismatch, "timeline has " + std::to_string(t->cells.size()) + " cells for " +
                                                std::to_string(t->row_labels.size()) + "x" +
                                                std::to_string(t->x_labels.size()));
    }
  }
  if (const auto* t = std::get_if<TableData>(&data)) {
    for (const auto& row : t->rows) {
      if (row.size() != t->header.size()) throw Error(ErrorKind::ShapeMismatch, "table row width differs from header");
    }
  }
}

// Scales each series by its own maximum so series of different magnitude share one axis.
inline std::vector<LineSeries> normalize_series(std::vector<LineSeries> series) {
  for (auto& s : series) {
    double peak = 0.0;
    for (const auto& v : s.values) {
      if (v) peak = std::max(peak, std::fabs(*v));
    }
    if (peak <= 0.0) continue;
    for (auto& v : s.values) {
      if (v) *v /= peak;
    }
  }
  return series;
}

// Converts stacked layers to shares of the column total.
inline std::vector<LineSeries> share_layers(std::vector<LineSeries> layers, std::size_t cols) {
  for (std::size_t c = 0; c < cols; ++c) {
    double total = 0.0;
    for (const auto& l : layers) total += l.values[c].value_or(0.0);
    for (auto& l : layers) {
      if (total > 0.0) l.values[c] = l.values[c].value_or(0.0) / total;
    }
  }
  return layers;
}

// Round-ish upper bound for an axis.
inline double nice_ceiling(double v) {
  if (v <= 0.0) return 1.0;
  const double mag = std::pow(10.0, std::floor(std::log10(v)));
  for (double step : {1.0, 2.0, 2.5, 5.0, 10.0}) {
    if (step * mag >= v) return step * mag;
  }
  return 10.0 * mag;
}

struct Frame {
  double left = 80, top = 40, width = 720, height = 320;
  double right() const { return left + width; }
  double bottom() const { return top + height; }
};

inline double x_at(const Frame& f, std::size_t i, std::size_t n) {
  if (n <= 1) return f.left + f.width / 2;
  return f.left + f.width * static_cast<double>(i) / static_cast<double>(n - 1);
}

inline void draw_axes(svg::Document& doc, const Frame& f, const std::vector<std::string>& x_labels, double y_max,
                      const std::string& y_label) {
  doc.line(f.left, f.bottom(), f.right(), f.bottom(), "#000000");
  doc.line(f.left, f.top, f.left, f.bottom(), "#000000");
  for (int t = 0; t <= 4; ++t) {
    const double v = y_max * t / 4.0;
    const double y = f.bottom() - f.height * t / 4.0;
    doc.line(f.left - 4, y, f.left, y, "#000000");
    doc.text(f.left - 6, y + 4, format_number(v, 2), "end", 10);
  }
  const std::size_t n = x_labels.size();
  const std::size_t every = std::max<std::size_t>(1, (n + 11) / 12);
  for (std::size_t i = 0; i < n; i += every) {
    const double x = x_at(f, i, n);
    doc.line(x, f.bottom(), x, f.bottom() + 4, "#000000");
    doc.text(x, f.bottom() + 16, x_labels[i], "middle", 10);
  }
  if (!y_label.empty()) {
    doc.text(16, f.top + f.height / 2, y_label, "middle", 11,
             "transform=\"rotate(-90 16 " + svg::num(f.top + f.height / 2) + ")\"");
  }
}

inline void draw_legend(svg::Document& doc, const Frame& f, const std::vector<LineSeries>& series) {
  double x = f.left;
  const double y = f.bottom() + 40;
  for (std::size_t i = 0; i < series.size(); ++i) {
    doc.rect(x, y - 9, 10, 10, std::string(svg::palette(i)));
    doc.text(x + 14, y, series[i].name, "start", 11);
    x += 24 + 7.0 * static_cast<double>(series[i].name.size());
  }
}

inline std::string render_line(const FigureSpec& spec, const LineData& data) {
  const auto series = spec.normalized ? normalize_series(data.series) : data.series;
  Frame f;
  svg::Document doc(f.right() + 20, f.bottom() + 60);
  doc.text(f.left, 24, spec.title, "start", 14);
  double peak = 0.0;
  for (const auto& s : series) {
    for (const auto& v : s.values) {
      if (v) peak = std::max(peak, *v);
    }
  }
  const double y_max = spec.normalized ? 1.0 : nice_ceiling(peak);
  draw_axes(doc, f, data.x_labels, y_max, spec.normalized ? "share of maximum" : data.y_label);
  const std::size_t n = data.x_labels.size();
  auto y_of = [&](double v) { return f.bottom() - f.height * std::clamp(v / y_max, 0.0, 1.0); };
  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto color = std::string(svg::palette(si));
    std::string path;
    bool pen_down = false;
    for (std::size_t i = 0; i < n; ++i) {
      if (!series[si].values[i]) {
        pen_down = false;
        continue;
      }
      path += (pen_down ? " L" : " M") + svg::num(x_at(f, i, n)) + " " + svg::num(y_of(*series[si].values[i]));
      pen_down = true;
    }
    if (!path.empty()) {
      doc.raw("<path d=\"" + path.substr(1) + "\" fill=\"none\" stroke=\"" + color + "\" stroke-width=\"1.5\"/>");
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (!series[si].values[i]) continue;
      doc.raw("<circle class=\"marker\" cx=\"" + svg::num(x_at(f, i, n)) + "\" cy=\"" +
              svg::num(y_of(*series[si].values[i])) + "\" r=\"2\" fill=\"" + color + "\"/>");
    }
  }
  draw_legend(doc, f, series);
  return doc.str(spec.title);
}

inline std::string render_stacked(const FigureSpec& spec, const StackedAreaData& data) {
  const std::size_t n = data.x_labels.size();
  const auto layers = spec.normalized ? share_layers(data.layers, n) : data.layers;
  Frame f;
  svg::Document doc(f.right() + 20, f.bottom() + 60);
  doc.text(f.left, 24, spec.title, "start", 14);
  std::vector<double> base(n, 0.0);
  double peak = 0.0;
  for (std::size_t c = 0; c < n; ++c) {
    double total = 0.0;
    for (const auto& l : layers) total += l.values[c].value_or(0.0);
    peak = std::max(peak, total);
  }
  const double y_max = spec.normalized ? 1.0 : nice_ceiling(peak);
  draw_axes(doc, f, data.x_labels, y_max, spec.normalized ? "share" : "outlinks");
  auto y_of = [&](double v) { return f.bottom() - f.height * std::clamp(v / y_max, 0.0, 1.0); };
  for (std::size_t li = 0; li < layers.size(); ++li) {
    std::vector<double> top(n);
    for (std::size_t c = 0; c < n; ++c) top[c] = base[c] + layers[li].values[c].value_or(0.0);
    std::string path;
    if (n == 1) {
      // A single column is drawn as a bar.
      const double x = x_at(f, 0, n);
      path = "M" + svg::num(x - 6) + " " + svg::num(y_of(base[0])) + " L" + svg::num(x - 6) + " " +
             svg::num(y_of(top[0])) + " L" + svg::num(x + 6) + " " + svg::num(y_of(top[0])) + " L" +
             svg::num(x + 6) + " " + svg::num(y_of(base[0]));
    } else {
      for (std::size_t c = 0; c < n; ++c) {
        path += (c ? " L" : "M") + svg::num(x_at(f, c, n)) + " " + svg::num(y_of(top[c]));
      }
      for (std::size_t c = n; c-- > 0;) path += " L" + svg::num(x_at(f, c, n)) + " " + svg::num(y_of(base[c]));
    }
    if (n > 0) {
      doc.raw("<path d=\"" + path + " Z\" fill=\"" + std::string(svg::palette(li)) +
              "\" fill-opacity=\"0.8\" stroke=\"none\"/>");
    }
    base = std::move(top);
  }
  draw_legend(doc, f, layers);
  return doc.str(spec.title);
}

// Largest side drawn cell-by-cell; bigger matrices are block-averaged.
inline constexpr std::size_t kHeatmapMaxCells = 400;

inline std::string render_heatmap(const FigureSpec& spec, const HeatmapData& data) {
  const std::size_t rows = data.row_labels.size(), cols = data.col_labels.size();
  const std::size_t rb = std::max<std::size_t>(1, (rows + kHeatmapMaxCells - 1) / kHeatmapMaxCells);
  const std::size_t cb = std::max<std::size_t>(1, (cols + kHeatmapMaxCells - 1) / kHeatmapMaxCells);
  const std::size_t dr = (rows + rb - 1) / rb, dc = (cols + cb - 1) / cb;
  const double cell = std::clamp(600.0 / static_cast<double>(std::max<std::size_t>({dr, dc, 1})), 1.0, 14.0);
  const bool row_text = rb == 1 && rows <= 150;
  const bool col_text = cb == 1 && cols <= 150;
  const double left = row_text ? 200 : 40, top = col_text ? 110 : 50;
  svg::Document doc(left + cell * static_cast<double>(dc) + 40, top + cell * static_cast<double>(dr) + 30);
  doc.text(10, 24, spec.title, "start", 14);
  for (std::size_t r = 0; r < dr; ++r) {
    for (std::size_t c = 0; c < dc; ++c) {
      double sum = 0.0;
      std::size_t count = 0;
      for (std::size_t i = r * rb; i < std::min(rows, (r + 1) * rb); ++i) {
        for (std::size_t j = c * cb; j < std::min(cols, (c + 1) * cb); ++j) {
          sum += data.values[i * cols + j];
          ++count;
        }
      }
      doc.rect(left + cell * static_cast<double>(c), top + cell * static_cast<double>(r), cell, cell,
               svg::ramp(count ? sum / static_cast<double>(count) : 0.0));
    }
  }
  for (std::size_t b : data.row_breaks) {
    if (b == 0 || b >= rows) continue;
    const double y = top + cell * static_cast<double>(b) / static_cast<double>(rb);
    doc.line(left, y, left + cell * static_cast<double>(dc), y, "#d62728", 1.0);
  }
  for (std::size_t b : data.col_breaks) {
    if (b == 0 || b >= cols) continue;
    const double x = left + cell * static_cast<double>(b) / static_cast<double>(cb);
    doc.line(x, top, x, top + cell * static_cast<double>(dr), "#d62728", 1.0);
  }
  if (row_text) {
    for (std::size_t r = 0; r < rows; ++r) {
      doc.text(left - 4, top + cell * (static_cast<double>(r) + 0.75), data.row_labels[r], "end",
               std::min(10.0, cell));
    }
  }
  if (col_text) {
    for (std::size_t c = 0; c < cols; ++c) {
      const double x = left + cell * (static_cast<double>(c) + 0.75), y = top - 4;
      doc.text(x, y, data.col_labels[c], "start", std::min(10.0, cell),
               "transform=\"rotate(-90 " + svg::num(x) + " " + svg::num(y) + ")\"");
    }
  }
  return doc.str(spec.title);
}

inline std::string render_timeline(const FigureSpec& spec, const TimelineBarsData& data) {
  const std::size_t rows = data.row_labels.size(), cols = data.x_labels.size();
  const double cell_w = std::clamp(720.0 / static_cast<double>(std::max<std::size_t>(cols, 1)), 1.0, 12.0);
  const double cell_h = 16, left = 180, top = 50;
  svg::Document doc(left + cell_w * static_cast<double>(cols) + 30, top + cell_h * static_cast<double>(rows) + 70);
  doc.text(10, 24, spec.title, "start", 14);
  for (std::size_t r = 0; r < rows; ++r) {
    const double y = top + cell_h * static_cast<double>(r);
    doc.text(left - 6, y + 12, data.row_labels[r], "end", 11);
    for (std::size_t c = 0; c < cols; ++c) {
      const EgoCell v = data.cells[r * cols + c];
      if (v == EgoCell::NotCreated) continue;
      doc.rect(left + cell_w * static_cast<double>(c), y + 2, cell_w, cell_h - 4,
               v == EgoCell::Included ? "#2ca02c" : "#dddddd");
    }
  }
  const double axis_y = top + cell_h * static_cast<double>(rows) + 14;
  const std::size_t every = std::max<std::size_t>(1, (cols + 11) / 12);
  for (std::size_t c = 0; c < cols; c += every) {
    doc.text(left + cell_w * static_cast<double>(c), axis_y, data.x_labels[c], "start", 10);
  }
  doc.rect(left, axis_y + 12, 10, 10, "#2ca02c");
  doc.text(left + 14, axis_y + 21, "links focal article", "start", 11);
  doc.rect(left + 150, axis_y + 12, 10, 10, "#dddddd");
  doc.text(left + 164, axis_y + 21, "no link", "start", 11);
  return doc.str(spec.title);
}

inline std::string optional_cell(const std::optional<double>& v) { return v ? format_number(*v) : ""; }

}  // namespace detail

// SVG for figure kinds, CSV for Table. Throws ShapeMismatch when the data does
// not fit the requested kind.
inline std::string render(const FigureSpec& spec, const FigureData& data) {
  if (detail::kind_of(data) != spec.kind) {
    throw Error(ErrorKind::ShapeMismatch, std::string("figure kind ") + std::string(to_string(spec.kind)) +
                                              " given " + std::string(to_string(detail::kind_of(data))) + " data");
  }
  detail::check_shape(data);
  switch (spec.kind) {
    case FigureKind::Line: return detail::render_line(spec, std::get<LineData>(data));
    case FigureKind::Heatmap: return detail::render_heatmap(spec, std::get<HeatmapData>(data));
    case FigureKind::StackedArea: return detail::render_stacked(spec, std::get<StackedAreaData>(data));
    case FigureKind::TimelineBars: return detail::render_timeline(spec, std::get<TimelineBarsData>(data));
    case FigureKind::Table: break;
  }
  CsvWriter w;
  const auto& t = std::get<TableData>(data);
  w.row(t.header);
  for (const auto& row : t.rows) w.row(row);
  return w.str();
}

// The values behind a figure, one CSV row per plotted row or period.
inline std::string render_csv(const FigureData& data) {
  detail::check_shape(data);
  CsvWriter w;
  if (const auto* l = std::get_if<LineData>(&data)) {
    std::vector<std::string> header{"period"};
    for (const auto& s : l->series) header.push_back(s.name);
    w.row(header);
    for (std::size_t i = 0; i < l->x_labels.size(); ++i) {
      std::vector<std::string> row{l->x_labels[i]};
      for (const auto& s : l->series) row.push_back(detail::optional_cell(s.values[i]));
      w.row(row);
    }
  } else if (const auto* s = std::get_if<StackedAreaData>(&data)) {
    std::vector<std::string> header{"period"};
    for (const auto& l : s->layers) header.push_back(l.name);
    w.row(header);
    for (std::size_t i = 0; i < s->x_labels.size(); ++i) {
      std::vector<std::string> row{s->x_labels[i]};
      for (const auto& l : s->layers) row.push_back(detail::optional_cell(l.values[i]));
      w.row(row);
    }
  } else if (const auto* h = std::get_if<HeatmapData>(&data)) {
    std::vector<std::string> header{""};
    header.insert(header.end(), h->col_labels.begin(), h->col_labels.end());
    w.row(header);
    for (std::size_t r = 0; r < h->row_labels.size(); ++r) {
      std::vector<std::string> row{h->row_labels[r]};
      for (std::size_t c = 0; c < h->col_labels.size(); ++c) {
        row.push_back(format_number(h->values[r * h->col_labels.size() + c]));
      }
      w.row(row);
    }
  } else if (const auto* t = std::get_if<TimelineBarsData>(&data)) {
    // 1 = links the focal article, 0 = does not, empty = not yet created.
    std::vector<std::string> header{"label"};
    header.insert(header.end(), t->x_labels.begin(), t->x_labels.end());
    w.row(header);
    for (std::size_t r = 0; r < t->row_labels.size(); ++r) {
      std::vector<std::string> row{t->row_labels[r]};
      for (std::size_t c = 0; c < t->x_labels.size(); ++c) {
        const EgoCell v = t->cells[r * t->x_labels.size() + c];
        row.push_back(v == EgoCell::NotCreated ? "" : v == EgoCell::Included ? "1" : "0");
      }
      w.row(row);
    }
  } else {
    const auto& table = std::get<TableData>(data);
    w.row(table.header);
    for (const auto& row : table.rows) w.row(row);
  }
  return w.str();
}

// Series with different period sets aligned on the sorted union of periods.
inline LineData line_data(const std::vector<TimeSeries>& series, const std::vector<std::string>& names,
                          std::string y_label = {}) {
  if (series.size() != names.size()) throw Error(ErrorKind::ShapeMismatch, "one name per series required");
  std::set<std::string> periods;
  for (const auto& s : series) {
    for (const auto& p : s.points) periods.insert(p.period);
  }
  LineData d;
  d.x_labels.assign(periods.begin(), periods.end());
  d.y_label = std::move(y_label);
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < d.x_labels.size(); ++i) col.emplace(d.x_labels[i], i);
  for (std::size_t i = 0; i < series.size(); ++i) {
    LineSeries ls{names[i], std::vector<std::optional<double>>(d.x_labels.size())};
    for (const auto& p : series[i].points) ls.values[col.at(p.period)] = static_cast<double>(p.value);
    d.series.push_back(std::move(ls));
  }
  return d;
}

// Inclusion matrix with rows in heatmap order and lines between clusters.
inline HeatmapData inclusion_heatmap(const InclusionMatrix& m, const ClusterAssignment& a) {
  if (a.order.size() != m.rows() || a.labels.size() != m.rows()) {
    throw Error(ErrorKind::ShapeMismatch, "cluster assignment does not match the inclusion matrix");
  }
  HeatmapData h;
  h.col_labels = m.periods;
  for (std::size_t i = 0; i < a.order.size(); ++i) {
    const std::size_t r = a.order[i];
    if (i > 0 && a.labels[r] != a.labels[a.order[i - 1]]) h.row_breaks.push_back(i);
    h.row_labels.push_back(m.outlinks[r]);
    for (std::size_t c = 0; c < m.cols(); ++c) h.values.push_back(m.at(r, c));
  }
  return h;
}

// Similarity matrix in heatmap order, with cluster boundaries on both axes.
inline HeatmapData similarity_heatmap(const SimilarityMatrix& s, const ClusterAssignment& a) {
  if (a.order.size() != s.size() || a.labels.size() != s.size()) {
    throw Error(ErrorKind::ShapeMismatch, "cluster assignment does not match the similarity matrix");
  }
  HeatmapData h;
  for (std::size_t i = 0; i < a.order.size(); ++i) {
    if (i > 0 && a.labels[a.order[i]] != a.labels[a.order[i - 1]]) h.row_breaks.push_back(i);
    h.row_labels.push_back(s.labels[a.order[i]]);
  }
  h.col_labels = h.row_labels;
  h.col_breaks = h.row_breaks;
  for (std::size_t i : a.order) {
    for (std::size_t j : a.order) h.values.push_back(s.at(i, j));
  }
  return h;
}

inline LineData cluster_count_lines(const InclusionMatrix& m, const std::vector<ClusterProfile>& profiles) {
  LineData d;
  d.x_labels = m.periods;
  d.y_label = "included outlinks";
  for (const auto& p : profiles) {
    LineSeries s{"cluster " + std::to_string(p.id) + " (" + std::string(to_string(p.classification)) + ")", {}};
    for (auto v : p.counts) s.values.push_back(static_cast<double>(v));
    d.series.push_back(std::move(s));
  }
  return d;
}

inline StackedAreaData ill_stacked(const IllSeries& s) {
  StackedAreaData d;
  d.x_labels = s.periods;
  for (IllStatus st : kIllStatuses) {
    LineSeries layer{std::string(table_caption(st)), {}};
    for (auto v : s.counts[static_cast<std::size_t>(st)]) layer.values.push_back(static_cast<double>(v));
    d.layers.push_back(std::move(layer));
  }
  return d;
}

// Table with one count/fraction column pair per direction, three status rows
// and a total row.
inline TableData ill_table_data(const IllTable& t) {
  TableData d;
  d.header = {"status"};
  for (const auto& dir : t.directions) {
    d.header.push_back(dir.source_lang + "_count");
    d.header.push_back(dir.source_lang + "_fraction");
  }
  for (IllStatus st : kIllStatuses) {
    std::vector<std::string> row{std::string(table_caption(st))};
    for (const auto& dir : t.directions) {
      row.push_back(std::to_string(dir.count(st)));
      row.push_back(format_percent(dir.count(st), dir.total));
    }
    d.rows.push_back(std::move(row));
  }
  std::vector<std::string> total{"Total"};
  for (const auto& dir : t.directions) {
    total.push_back(std::to_string(dir.total));
    total.push_back(dir.total ? "100.0%" : "--");
  }
  d.rows.push_back(std::move(total));
  return d;
}

inline TimelineBarsData timeline_data(const ConsolidationMatrix& m) {
  TimelineBarsData d;
  for (const auto& month : m.months) d.x_labels.push_back(month.to_string());
  d.row_labels = m.labels;
  d.cells = m.cells;
  return d;
}

// ---- output files and the index ----

inline void write_output(const std::filesystem::path& path, std::string_view bytes) {
  std::filesystem::create_directories(path.parent_path());
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorKind::Config, "cannot write " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

inline constexpr std::string_view kIndexName = "index.md";

struct IndexEntry {
  std::string path;  // relative to the out dir, '/' separated
  std::uint64_t bytes = 0;
  std::string sha256;
};

inline std::vector<IndexEntry> list_artifacts(const std::filesystem::path& out_dir) {
  std::vector<IndexEntry> out;
  if (!std::filesystem::is_directory(out_dir)) return out;
  for (const auto& e : std::filesystem::recursive_directory_iterator(out_dir)) {
    if (!e.is_regular_file()) continue;
    const auto rel = e.path().lexically_relative(out_dir).generic_string();
    const auto ext = e.path().extension();
    if (rel == kIndexName || (ext != ".svg" && ext != ".csv")) continue;
    std::ifstream in(e.path(), std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string data = buf.str();
    out.push_back({rel, data.size(), sha256_hex(data)});
  }
  std::sort(out.begin(), out.end(), [](const IndexEntry& a, const IndexEntry& b) { return a.path < b.path; });
  return out;
}

inline std::string render_index(const std::vector<IndexEntry>& entries) {
  std::string md = "# wikimem outputs\n\n| file | bytes | sha256 |\n|---|---:|---|\n";
  for (const auto& e : entries) {
    md += "| [" + e.path + "](" + e.path + ") | " + std::to_string(e.bytes) + " | `" + e.sha256 + "` |\n";
  }
  return md;
}

// Writes {out_dir}/index.md listing every CSV/SVG with its SHA-256.
inline std::vector<IndexEntry> write_index(const std::filesystem::path& out_dir) {
  auto entries = list_artifacts(out_dir);
  if (entries.empty()) throw Error(ErrorKind::NothingToReport, "no outputs under " + out_dir.string());
  write_output(out_dir / std::string(kIndexName), render_index(entries));
  return entries;
}

}  // namespace wikimem
