#pragma once
// Turns per-model metric rows into a cross-model report: means per
// (strategy, benchmark, exposure) cell, paired significance against the
// no-update baseline, and deterministic markdown, csv, and svg output.

#include <algorithm>
#include <cfenv>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "bdc/errors.hpp"
#include "bdc/eval_vector.hpp"
#include "bdc/records.hpp"
#include "bdc/stats.hpp"
#include "bdc/strategy.hpp"

namespace bdc::report {

struct ModelMetrics {
  std::string model_id;
  double fidelity = 0.0;
  double resistance = 0.0;
};

// All per-model rows of one (strategy, benchmark, exposure) combination.
struct Cell {
  std::string strategy_id;
  std::string benchmark_id;
  ContaminationType ctype = ContaminationType::Mild;
  std::vector<ModelMetrics> rows;
};

struct CellResult {
  std::string strategy_id;
  std::string benchmark_id;
  ContaminationType ctype = ContaminationType::Mild;
  std::size_t models = 0;
  double mean_fidelity = 0.0;
  double mean_resistance = 0.0;
  // one-sided paired tests against the no-update baseline across models
  double fidelity_drop_p = 1.0;   // baseline fidelity > strategy fidelity
  double resistance_gain_p = 1.0; // strategy resistance > baseline resistance
  bool fidelity_differs = false;
  bool resistance_differs = false;
  bool semantic_altering = false;
};

namespace detail {

inline std::vector<ModelMetrics> sorted_rows(const Cell& cell) {
  auto rows = cell.rows;
  std::sort(rows.begin(), rows.end(),
            [](const ModelMetrics& a, const ModelMetrics& b) { return a.model_id < b.model_id; });
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (rows[i].model_id == rows[i - 1].model_id)
      throw Error("duplicate model in cell: " + rows[i].model_id);
  return rows;
}

inline bool known_semantic_altering(const std::string& strategy_id) {
  const auto& reg = strategy_registry();
  auto it = reg.find(strategy_id);
  return it != reg.end() && it->second.semantic_altering;
}

inline std::string display_name(const std::string& strategy_id) {
  const auto& reg = strategy_registry();
  auto it = reg.find(strategy_id);
  return it == reg.end() ? strategy_id : it->second.name;
}

}  // namespace detail

inline CellResult aggregate_cell(const Cell& cell, const Cell& baseline, double alpha = 0.05) {
  if (cell.rows.size() < 2) throw TooFewModels("cell needs at least two models");
  auto rows = detail::sorted_rows(cell);
  auto base = detail::sorted_rows(baseline);
  if (rows.size() != base.size()) throw ModelSetMismatch("baseline covers a different model set");
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (rows[i].model_id != base[i].model_id)
      throw ModelSetMismatch("baseline model set differs at " + rows[i].model_id);

  CellResult out;
  out.strategy_id = cell.strategy_id;
  out.benchmark_id = cell.benchmark_id;
  out.ctype = cell.ctype;
  out.models = rows.size();
  out.semantic_altering = detail::known_semantic_altering(cell.strategy_id);

  std::vector<std::string> labels;
  std::vector<double> fid, res, base_fid, base_res;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    labels.push_back(rows[i].model_id);
    fid.push_back(rows[i].fidelity);
    res.push_back(rows[i].resistance);
    base_fid.push_back(base[i].fidelity);
    base_res.push_back(base[i].resistance);
    out.mean_fidelity += rows[i].fidelity;
    out.mean_resistance += rows[i].resistance;
  }
  out.mean_fidelity /= static_cast<double>(rows.size());
  out.mean_resistance /= static_cast<double>(rows.size());

  auto fid_test = stats::paired_t_one_sided({labels, base_fid, fid}, alpha);
  auto res_test = stats::paired_t_one_sided({labels, res, base_res}, alpha);
  out.fidelity_drop_p = fid_test.p_value;
  out.resistance_gain_p = res_test.p_value;
  out.fidelity_differs = fid_test.significant;
  out.resistance_differs = res_test.significant;
  return out;
}

// Groups metric rows into cells and aggregates each against the vanilla
// cell of its benchmark and exposure. Rows missing a metric or an
// exposure label cannot be aggregated.
inline std::vector<CellResult> build_cells(const std::vector<records::MetricRecord>& rows,
                                           double alpha = 0.05) {
  if (rows.empty()) throw EmptyInput("no metric rows");
  std::map<std::tuple<std::string, std::string, std::string>, Cell> groups;
  for (const auto& r : rows) {
    if (!r.contamination_type)
      throw FormatError("metric row without a contamination type: " + r.model_id);
    if (!r.fidelity || !r.resistance)
      throw FormatError("metric row without both metrics: " + r.model_id + "/" + r.strategy_id);
    std::string ct = to_string(*r.contamination_type);
    auto key = std::make_tuple(r.strategy_id, r.benchmark_id, ct);
    auto& cell = groups[key];
    cell.strategy_id = r.strategy_id;
    cell.benchmark_id = r.benchmark_id;
    cell.ctype = *r.contamination_type;
    cell.rows.push_back({r.model_id, *r.fidelity, *r.resistance});
  }

  std::vector<CellResult> out;
  for (auto& [key, cell] : groups) {
    auto base_key = std::make_tuple(std::string("vanilla"), cell.benchmark_id,
                                    to_string(cell.ctype));
    auto base = groups.find(base_key);
    if (base == groups.end())
      throw NoCorrectBaseline("vanilla baseline required for benchmark " + cell.benchmark_id +
                              " (" + to_string(cell.ctype) + ")");
    out.push_back(aggregate_cell(cell, base->second, alpha));
  }
  return out;
}

// ---- ordering and formatting ----------------------------------------------

namespace detail {

// Strategies sort lexicographically with the baseline pinned to the end.
inline bool strategy_before(const std::string& a, const std::string& b) {
  if (a == "vanilla") return false;
  if (b == "vanilla") return true;
  return a < b;
}

inline int ctype_rank(ContaminationType t) { return t == ContaminationType::Mild ? 0 : 1; }

inline std::vector<CellResult> canonical_order(std::vector<CellResult> cells) {
  std::sort(cells.begin(), cells.end(), [](const CellResult& x, const CellResult& y) {
    if (int c = ctype_rank(x.ctype) - ctype_rank(y.ctype); c != 0) return c < 0;
    if (x.strategy_id != y.strategy_id) return strategy_before(x.strategy_id, y.strategy_id);
    return x.benchmark_id < y.benchmark_id;
  });
  return cells;
}

// Three decimals, ties to even, so rerendering never flickers on .0005s.
inline std::string fmt3(double x) {
  double scaled = std::nearbyint(x * 1000.0);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", scaled / 1000.0);
  return buf;
}

inline std::string fmt_g(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

inline std::string fmt2(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", x);
  return buf;
}

inline std::vector<std::string> ordered_strategies(const std::vector<CellResult>& cells) {
  std::set<std::string> seen;
  for (const auto& c : cells) seen.insert(c.strategy_id);
  std::vector<std::string> out(seen.begin(), seen.end());
  std::sort(out.begin(), out.end(), strategy_before);
  return out;
}

inline std::vector<std::string> ordered_benchmarks(const std::vector<CellResult>& cells) {
  std::set<std::string> seen;
  for (const auto& c : cells) seen.insert(c.benchmark_id);
  return {seen.begin(), seen.end()};
}

inline std::vector<ContaminationType> ordered_ctypes(const std::vector<CellResult>& cells) {
  std::set<int> seen;
  for (const auto& c : cells) seen.insert(ctype_rank(c.ctype));
  std::vector<ContaminationType> out;
  if (seen.count(0)) out.push_back(ContaminationType::Mild);
  if (seen.count(1)) out.push_back(ContaminationType::Intensive);
  return out;
}

inline const CellResult* find_cell(const std::vector<CellResult>& cells,
                                   const std::string& strategy, const std::string& benchmark,
                                   ContaminationType ctype) {
  for (const auto& c : cells)
    if (c.strategy_id == strategy && c.benchmark_id == benchmark && c.ctype == ctype) return &c;
  return nullptr;
}

}  // namespace detail

// Mean of per-benchmark cell means: one (fidelity, resistance) point per
// strategy under one exposure, for the tradeoff scatter.
struct ScatterPoint {
  std::string strategy_id;
  double fidelity = 0.0;
  double resistance = 0.0;
};

inline std::vector<ScatterPoint> scatter_points(const std::vector<CellResult>& cells,
                                                ContaminationType ctype) {
  auto strategies = detail::ordered_strategies(cells);
  std::vector<ScatterPoint> out;
  for (const auto& s : strategies) {
    double fid = 0.0, res = 0.0;
    std::size_t n = 0;
    for (const auto& c : cells) {
      if (c.strategy_id != s || c.ctype != ctype) continue;
      fid += c.mean_fidelity;
      res += c.mean_resistance;
      ++n;
    }
    if (n == 0) continue;
    out.push_back({s, fid / static_cast<double>(n), res / static_cast<double>(n)});
  }
  return out;
}

// ---- renderers --------------------------------------------------------

enum class Format { Markdown, Csv, Svg };

inline Format format_from_string(const std::string& s) {
  if (s == "markdown" || s == "md") return Format::Markdown;
  if (s == "csv") return Format::Csv;
  if (s == "svg") return Format::Svg;
  throw UnsupportedFormat("unsupported report format: " + s);
}

// Fidelity does not involve the contaminated model, so it is printed once;
// resistance gets a table per exposure type.
inline std::string render_markdown(const std::vector<CellResult>& cells) {
  if (cells.empty()) throw EmptyInput("no cells to render");
  auto ordered = detail::canonical_order(cells);
  auto strategies = detail::ordered_strategies(ordered);
  auto benchmarks = detail::ordered_benchmarks(ordered);
  auto ctypes = detail::ordered_ctypes(ordered);

  std::string md = "# Benchmark Update Report\n\n";
  md += "Strategy means across models; `*` marks a significant one-sided paired\n";
  md += "difference from the no-update baseline, `!` marks strategies whose\n";
  md += "regenerated answers need manual review.\n";

  auto row_label = [](const std::string& s) {
    std::string label = s == "vanilla" ? "vanilla (no update)" : s + " " +
                        detail::display_name(s);
    if (detail::known_semantic_altering(s)) label += " !";
    return label;
  };

  md += "\n## Fidelity\n\n";
  md += "| Strategy |";
  for (const auto& b : benchmarks) md += " " + b + " |";
  md += "\n|---|";
  for (std::size_t i = 0; i < benchmarks.size(); ++i) md += "---|";
  md += "\n";
  ContaminationType fid_ct = ctypes.front();
  for (const auto& s : strategies) {
    md += "| " + row_label(s) + " |";
    for (const auto& b : benchmarks) {
      const auto* c = detail::find_cell(ordered, s, b, fid_ct);
      if (c == nullptr) {
        md += " - |";
        continue;
      }
      std::string mark = (c->fidelity_differs && s != "vanilla") ? "*" : "";
      md += " " + detail::fmt3(c->mean_fidelity) + mark + " |";
    }
    md += "\n";
  }

  for (auto ct : ctypes) {
    md += std::string("\n## Resistance (") + to_string(ct) + " contamination)\n\n";
    md += "| Strategy |";
    for (const auto& b : benchmarks) md += " " + b + " |";
    md += "\n|---|";
    for (std::size_t i = 0; i < benchmarks.size(); ++i) md += "---|";
    md += "\n";
    for (const auto& s : strategies) {
      md += "| " + row_label(s) + " |";
      for (const auto& b : benchmarks) {
        const auto* c = detail::find_cell(ordered, s, b, ct);
        if (c == nullptr) {
          md += " - |";
          continue;
        }
        std::string mark = (c->resistance_differs && s != "vanilla") ? "*" : "";
        md += " " + detail::fmt3(c->mean_resistance) + mark + " |";
      }
      md += "\n";
    }
  }
  return md;
}

inline std::string render_csv(const std::vector<CellResult>& cells) {
  if (cells.empty()) throw EmptyInput("no cells to render");
  auto ordered = detail::canonical_order(cells);
  std::string csv =
      "contamination,strategy,benchmark,models,fidelity,resistance,"
      "fidelity_drop_p,resistance_gain_p,fidelity_differs,resistance_differs,"
      "semantic_altering\n";
  for (const auto& c : ordered) {
    csv += std::string(to_string(c.ctype)) + "," + c.strategy_id + "," + c.benchmark_id + "," +
           std::to_string(c.models) + "," + detail::fmt_g(c.mean_fidelity) + "," +
           detail::fmt_g(c.mean_resistance) + "," + detail::fmt_g(c.fidelity_drop_p) + "," +
           detail::fmt_g(c.resistance_gain_p) + "," + (c.fidelity_differs ? "1" : "0") + "," +
           (c.resistance_differs ? "1" : "0") + "," + (c.semantic_altering ? "1" : "0") + "\n";
  }
  return csv;
}

// One square panel per exposure type: fidelity on x, resistance on y,
// every strategy a labeled point.
inline std::string render_svg(const std::vector<CellResult>& cells) {
  if (cells.empty()) throw EmptyInput("no cells to render");
  auto ordered = detail::canonical_order(cells);
  auto ctypes = detail::ordered_ctypes(ordered);

  const double plot = 300.0, margin = 50.0, gap = 40.0;
  const double panel_w = margin + plot + gap;
  const double width = panel_w * static_cast<double>(ctypes.size()) + margin - gap;
  const double height = margin + plot + margin;

  auto x_of = [&](double v, std::size_t panel) {
    return panel_w * static_cast<double>(panel) + margin + v * plot;
  };
  auto y_of = [&](double v) { return margin + (1.0 - v) * plot; };

  std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
                    detail::fmt2(width) + "\" height=\"" + detail::fmt2(height) +
                    "\" viewBox=\"0 0 " + detail::fmt2(width) + " " + detail::fmt2(height) +
                    "\">\n";
  svg += "<style>text{font-family:sans-serif;font-size:10px}.axis{stroke:#444;stroke-width:1}"
         ".pt{fill:#1f6fb4}.lbl{fill:#222}</style>\n";

  for (std::size_t p = 0; p < ctypes.size(); ++p) {
    auto ct = ctypes[p];
    svg += "<g>\n";
    svg += "<text x=\"" + detail::fmt2(x_of(0.5, p)) + "\" y=\"" + detail::fmt2(margin - 20.0) +
           "\" text-anchor=\"middle\">resistance vs fidelity (" + to_string(ct) +
           " contamination)</text>\n";
    svg += "<line class=\"axis\" x1=\"" + detail::fmt2(x_of(0.0, p)) + "\" y1=\"" +
           detail::fmt2(y_of(0.0)) + "\" x2=\"" + detail::fmt2(x_of(1.0, p)) + "\" y2=\"" +
           detail::fmt2(y_of(0.0)) + "\"/>\n";
    svg += "<line class=\"axis\" x1=\"" + detail::fmt2(x_of(0.0, p)) + "\" y1=\"" +
           detail::fmt2(y_of(0.0)) + "\" x2=\"" + detail::fmt2(x_of(0.0, p)) + "\" y2=\"" +
           detail::fmt2(y_of(1.0)) + "\"/>\n";
    for (const auto& pt : scatter_points(ordered, ct)) {
      double cx = x_of(pt.fidelity, p), cy = y_of(pt.resistance);
      svg += "<circle class=\"pt\" cx=\"" + detail::fmt2(cx) + "\" cy=\"" + detail::fmt2(cy) +
             "\" r=\"3\"/>\n";
      svg += "<text class=\"lbl\" x=\"" + detail::fmt2(cx + 5.0) + "\" y=\"" +
             detail::fmt2(cy - 3.0) + "\">" + pt.strategy_id + "</text>\n";
    }
    svg += "</g>\n";
  }
  svg += "</svg>\n";
  return svg;
}

inline std::string render(const std::vector<CellResult>& cells, Format format) {
  switch (format) {
    case Format::Markdown: return render_markdown(cells);
    case Format::Csv: return render_csv(cells);
    case Format::Svg: return render_svg(cells);
  }
  throw UnsupportedFormat("unsupported report format");
}

}  // namespace bdc::report
