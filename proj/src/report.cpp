#include "sopa/report.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>

#include "sopa/error.hpp"
#include "sopa/xml.hpp"

namespace sopa {

using Json = nlohmann::ordered_json;

namespace {

std::string signed_exact(const mpq_class& q) {
  const std::string magnitude = ExactDecimal::from_rational(abs(q)).to_string();
  return sgn(q) < 0 ? "-" + magnitude : magnitude;
}

ComparisonRow compare_values(std::string name, std::optional<ExactDecimal> baseline,
                             std::optional<ExactDecimal> candidate) {
  ComparisonRow row{std::move(name), baseline, candidate, std::nullopt, RowStatus::Both};
  if (!baseline) {
    row.status = RowStatus::CandidateOnly;
  } else if (!candidate) {
    row.status = RowStatus::BaselineOnly;
  } else if (baseline->is_zero()) {
    if (candidate->is_zero()) row.relative = mpq_class(0);
    else row.status = RowStatus::Undefined;
  } else {
    row.relative = (candidate->rational() - baseline->rational()) / baseline->rational();
  }
  return row;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string md_cell(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '|') out += '\\';
    out += c;
  }
  return out;
}

std::string status_name(RowStatus s) {
  switch (s) {
    case RowStatus::Both: return "both";
    case RowStatus::BaselineOnly: return "baseline-only";
    case RowStatus::CandidateOnly: return "candidate-only";
    case RowStatus::Undefined: return "undefined";
  }
  return "?";
}

Json report_json(const CostReport& r, const RenderOptions& o) {
  Json j;
  j["scenario"] = r.scenario;
  j["traceCount"] = r.trace_count;
  Json rows = Json::array();
  for (const auto& a : r.per_activity)
    rows.push_back({{"name", a.name},
                    {"averageCost", a.average_cost.to_string()},
                    {"averageCostDisplay", a.average_cost.to_scientific(o.significant_digits)},
                    {"occurrences", a.occurrences}});
  j["perActivity"] = rows;
  j["averageProcessInstanceCost"] = r.average_process_instance_cost.to_string();
  j["averageProcessInstanceCostDisplay"] = r.average_process_instance_cost.to_scientific(o.significant_digits);
  Json variants = Json::array();
  for (const auto& v : r.variants)
    variants.push_back({{"id", v.id}, {"traceCount", v.trace_count}, {"averageCost", v.average_cost.to_string()}});
  j["variants"] = variants;
  j["warnings"] = r.warning_count;
  j["warningMessages"] = r.warnings;
  return j;
}

Json comparison_row_json(const ComparisonRow& row, const RenderOptions& o) {
  Json j;
  j["name"] = row.name;
  j["baseline"] = row.baseline ? Json(row.baseline->to_string()) : Json(nullptr);
  j["candidate"] = row.candidate ? Json(row.candidate->to_string()) : Json(nullptr);
  j["relativeDifference"] = row.relative ? Json(signed_exact(*row.relative)) : Json(nullptr);
  j["display"] = format_relative(row, o.percent_decimals);
  j["status"] = status_name(row.status);
  return j;
}

std::string fmt2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

const char* kPalette[] = {"#4e79a7", "#f28e2b", "#59a14f", "#e15759", "#76b7b2", "#edc948", "#b07aa1", "#9c755f"};

// Grouped vertical bars: one group per category, one bar per series.
std::string svg_grouped_bars(const std::string& title, const std::vector<std::string>& categories,
                             const std::vector<std::string>& series,
                             const std::vector<std::vector<std::optional<ExactDecimal>>>& values,  // [series][category]
                             const RenderOptions& o) {
  const double bar_w = 14.0;
  const double group_gap = 18.0;
  const double left = 80.0, top = 50.0, plot_h = 300.0, label_h = 260.0;
  const double group_w = bar_w * static_cast<double>(std::max<std::size_t>(series.size(), 1)) + group_gap;
  const double plot_w = std::max(200.0, group_w * static_cast<double>(categories.size()));
  const double width = left + plot_w + 180.0;
  const double height = top + plot_h + label_h;

  double max_v = 0.0;
  for (const auto& s : values)
    for (const auto& v : s)
      if (v) max_v = std::max(max_v, v->to_double());
  if (max_v <= 0.0) max_v = 1.0;

  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt2(width) + "\" height=\"" + fmt2(height) +
         "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  out += "  <title>" + xml::escape(title) + "</title>\n";
  out += "  <text x=\"" + fmt2(left) + "\" y=\"24\" font-size=\"14\">" + xml::escape(title) + "</text>\n";
  const double base_y = top + plot_h;
  out += "  <line x1=\"" + fmt2(left) + "\" y1=\"" + fmt2(base_y) + "\" x2=\"" + fmt2(left + plot_w) + "\" y2=\"" +
         fmt2(base_y) + "\" stroke=\"#333\"/>\n";
  out += "  <line x1=\"" + fmt2(left) + "\" y1=\"" + fmt2(top) + "\" x2=\"" + fmt2(left) + "\" y2=\"" + fmt2(base_y) +
         "\" stroke=\"#333\"/>\n";
  for (int tick = 0; tick <= 4; ++tick) {
    const double frac = tick / 4.0;
    const double y = base_y - frac * plot_h;
    const mpq_class tick_value(max_v * frac);
    out += "  <text x=\"" + fmt2(left - 6) + "\" y=\"" + fmt2(y + 4) + "\" text-anchor=\"end\">" +
           format_scientific(tick_value, o.significant_digits) + "</text>\n";
  }
  for (std::size_t c = 0; c < categories.size(); ++c) {
    const double gx = left + group_gap / 2 + group_w * static_cast<double>(c);
    for (std::size_t s = 0; s < series.size(); ++s) {
      const auto& v = values[s][c];
      if (!v) continue;
      const double h = v->to_double() / max_v * plot_h;
      const double x = gx + bar_w * static_cast<double>(s);
      out += "  <rect x=\"" + fmt2(x) + "\" y=\"" + fmt2(base_y - h) + "\" width=\"" + fmt2(bar_w - 2) + "\" height=\"" +
             fmt2(h) + "\" fill=\"" + kPalette[s % 8] + "\"><title>" + xml::escape(series[s]) + ": " +
             xml::escape(v->to_scientific(o.significant_digits)) + "</title></rect>\n";
    }
    const double lx = gx + (group_w - group_gap) / 2;
    out += "  <text transform=\"translate(" + fmt2(lx) + "," + fmt2(base_y + 10) +
           ") rotate(60)\" text-anchor=\"start\">" + xml::escape(categories[c]) + "</text>\n";
  }
  for (std::size_t s = 0; s < series.size(); ++s) {
    const double y = top + 16.0 * static_cast<double>(s);
    const double x = left + plot_w + 20;
    out += "  <rect x=\"" + fmt2(x) + "\" y=\"" + fmt2(y) + "\" width=\"10\" height=\"10\" fill=\"" + kPalette[s % 8] + "\"/>\n";
    out += "  <text x=\"" + fmt2(x + 16) + "\" y=\"" + fmt2(y + 9) + "\">" + xml::escape(series[s]) + "</text>\n";
  }
  out += "</svg>\n";
  return out;
}

std::string label_of(const CostReport& r, std::size_t i) {
  return r.scenario.empty() ? "Scenario " + std::to_string(i + 1) : r.scenario;
}

}  // namespace

ComparisonReport compare(const CostReport& baseline, const CostReport& candidate) {
  if (baseline.per_activity.empty() || candidate.per_activity.empty())
    throw ValidationError("cannot compare empty reports");
  ComparisonReport out;
  out.baseline_label = baseline.scenario;
  out.candidate_label = candidate.scenario;
  std::set<std::string> names;
  for (const auto& r : baseline.per_activity) names.insert(r.name);
  for (const auto& r : candidate.per_activity) names.insert(r.name);
  for (const auto& name : names) {
    std::optional<ExactDecimal> b, c;
    if (const auto* row = baseline.find(name)) b = row->average_cost;
    if (const auto* row = candidate.find(name)) c = row->average_cost;
    out.rows.push_back(compare_values(name, b, c));
  }
  out.overall = compare_values("Average Environmental Process Instance Cost", baseline.average_process_instance_cost,
                               candidate.average_process_instance_cost);
  return out;
}

Format parse_format(std::string_view name) {
  if (name == "json") return Format::Json;
  if (name == "csv") return Format::Csv;
  if (name == "svg-bar" || name == "svg") return Format::SvgBar;
  if (name == "markdown-table" || name == "markdown" || name == "md") return Format::MarkdownTable;
  throw ValidationError("unknown format '" + std::string(name) + "' (expected json, csv, svg-bar, markdown-table)");
}

std::string format_relative(const ComparisonRow& row, int decimals) {
  switch (row.status) {
    case RowStatus::BaselineOnly: return "only in baseline";
    case RowStatus::CandidateOnly: return "only in candidate";
    case RowStatus::Undefined: return std::string(kUndefinedMarker);
    case RowStatus::Both: break;
  }
  if (sgn(*row.relative) == 0) return "0%";
  const std::string digits = format_fixed_truncated(*row.relative * 100, decimals);
  return (sgn(*row.relative) > 0 ? "+" : "") + digits + "%";
}

std::string render(const CostReport& report, Format format, const RenderOptions& options) {
  if (format == Format::Json) return report_json(report, options).dump(2) + "\n";
  return render(std::vector<CostReport>{report}, format, options);
}

std::string render(const std::vector<CostReport>& reports, Format format, const RenderOptions& o) {
  if (reports.empty()) throw ValidationError("nothing to render");
  std::vector<std::string> names;
  {
    std::set<std::string> all;
    for (const auto& r : reports)
      for (const auto& a : r.per_activity) all.insert(a.name);
    names.assign(all.begin(), all.end());
  }
  switch (format) {
    case Format::Json: {
      if (reports.size() == 1) return report_json(reports.front(), o).dump(2) + "\n";
      Json arr = Json::array();
      for (const auto& r : reports) arr.push_back(report_json(r, o));
      return arr.dump(2) + "\n";
    }
    case Format::Csv: {
      std::string out = reports.size() == 1 ? "activity,averageCost,averageCostExact,occurrences\n"
                                            : "scenario,activity,averageCost,averageCostExact,occurrences\n";
      for (std::size_t i = 0; i < reports.size(); ++i)
        for (const auto& a : reports[i].per_activity) {
          if (reports.size() > 1) out += csv_field(label_of(reports[i], i)) + ",";
          out += csv_field(a.name) + "," + a.average_cost.to_scientific(o.significant_digits) + "," +
                 a.average_cost.to_string() + "," + std::to_string(a.occurrences) + "\n";
        }
      return out;
    }
    case Format::MarkdownTable: {
      std::string out = "| Parameter |";
      std::string rule = "|---|";
      for (std::size_t i = 0; i < reports.size(); ++i) {
        out += " " + md_cell(label_of(reports[i], i)) + " |";
        rule += "---|";
      }
      out += "\n" + rule + "\n";
      for (const auto& name : names) {
        out += "| " + md_cell(name) + " |";
        for (const auto& r : reports) {
          const auto* row = r.find(name);
          out += " " + (row ? row->average_cost.to_scientific(o.significant_digits) : std::string("-")) + " |";
        }
        out += "\n";
      }
      out += "| **Average Environmental Process Instance Cost** |";
      for (const auto& r : reports) out += " " + r.average_process_instance_cost.to_scientific(o.significant_digits) + " |";
      return out + "\n";
    }
    case Format::SvgBar: {
      std::vector<std::string> series;
      for (std::size_t i = 0; i < reports.size(); ++i) series.push_back(label_of(reports[i], i));
      if (o.chart == Chart::Instances) {
        std::vector<std::vector<std::optional<ExactDecimal>>> values(1);
        for (const auto& r : reports) values[0].push_back(r.average_process_instance_cost);
        return svg_grouped_bars("Average environmental process instance cost per scenario", series,
                                {"Average process instance cost"}, values, o);
      }
      std::vector<std::vector<std::optional<ExactDecimal>>> values;
      for (const auto& r : reports) {
        std::vector<std::optional<ExactDecimal>> row;
        for (const auto& name : names) {
          const auto* a = r.find(name);
          row.push_back(a ? std::optional<ExactDecimal>(a->average_cost) : std::nullopt);
        }
        values.push_back(std::move(row));
      }
      return svg_grouped_bars("Average environmental activity cost per scenario", names, series, values, o);
    }
  }
  return {};
}

std::string render(const std::vector<ComparisonReport>& comparisons, Format format, const RenderOptions& o) {
  if (comparisons.empty()) throw ValidationError("nothing to render");
  std::set<std::string> all;
  for (const auto& c : comparisons)
    for (const auto& r : c.rows) all.insert(r.name);
  auto find_row = [](const ComparisonReport& c, const std::string& name) -> const ComparisonRow* {
    for (const auto& r : c.rows)
      if (r.name == name) return &r;
    return nullptr;
  };
  auto column = [](const ComparisonReport& c) {
    return (c.baseline_label.empty() ? std::string("baseline") : c.baseline_label) + " -> " +
           (c.candidate_label.empty() ? std::string("candidate") : c.candidate_label);
  };
  switch (format) {
    case Format::Json: {
      Json arr = Json::array();
      for (const auto& c : comparisons) {
        Json j;
        j["baseline"] = c.baseline_label;
        j["candidate"] = c.candidate_label;
        Json rows = Json::array();
        for (const auto& r : c.rows) rows.push_back(comparison_row_json(r, o));
        j["perActivity"] = rows;
        j["averageProcessInstanceCost"] = comparison_row_json(c.overall, o);
        arr.push_back(j);
      }
      return (comparisons.size() == 1 ? arr[0] : arr).dump(2) + "\n";
    }
    case Format::Csv: {
      std::string out = "baseline,candidate,activity,baselineCost,candidateCost,relativeDifference,display\n";
      for (const auto& c : comparisons) {
        auto line = [&](const ComparisonRow& r) {
          out += csv_field(c.baseline_label) + "," + csv_field(c.candidate_label) + "," + csv_field(r.name) + "," +
                 (r.baseline ? r.baseline->to_string() : "") + "," + (r.candidate ? r.candidate->to_string() : "") + "," +
                 (r.relative ? signed_exact(*r.relative) : "") + "," + csv_field(format_relative(r, o.percent_decimals)) + "\n";
        };
        for (const auto& r : c.rows) line(r);
        line(c.overall);
      }
      return out;
    }
    case Format::MarkdownTable: {
      std::string out = "| Parameter |";
      std::string rule = "|---|";
      for (const auto& c : comparisons) {
        out += " " + md_cell(column(c)) + " |";
        rule += "---|";
      }
      out += "\n" + rule + "\n";
      for (const auto& name : all) {
        out += "| " + md_cell(name) + " |";
        for (const auto& c : comparisons) {
          const auto* r = find_row(c, name);
          out += " " + (r ? md_cell(format_relative(*r, o.percent_decimals)) : std::string("-")) + " |";
        }
        out += "\n";
      }
      out += "| **Average Environmental Process Instance Cost** |";
      for (const auto& c : comparisons) out += " " + md_cell(format_relative(c.overall, o.percent_decimals)) + " |";
      return out + "\n";
    }
    case Format::SvgBar:
      throw ValidationError("svg-bar rendering is available for cost reports, not comparisons");
  }
  return {};
}

std::string render(const Expectation& e, Format format, const RenderOptions& o) {
  switch (format) {
    case Format::Json: {
      Json j;
      Json rows = Json::array();
      for (const auto& a : e.per_activity)
        rows.push_back({{"name", a.name},
                        {"averageCost", a.average_cost.to_string()},
                        {"averageCostDisplay", a.average_cost.to_scientific(o.significant_digits)},
                        {"expectedOccurrencesPerInstance", a.expected_executions.to_string()},
                        {"expectedOccurrencesPerInstanceDisplay", a.expected_executions.to_scientific(6)}});
      j["perActivity"] = rows;
      j["averageProcessInstanceCost"] = e.average_process_instance_cost.to_string();
      j["averageProcessInstanceCostDisplay"] = e.average_process_instance_cost.to_scientific(o.significant_digits);
      return j.dump(2) + "\n";
    }
    case Format::Csv: {
      std::string out = "activity,averageCost,averageCostExact,expectedOccurrencesPerInstance\n";
      for (const auto& a : e.per_activity)
        out += csv_field(a.name) + "," + a.average_cost.to_scientific(o.significant_digits) + "," +
               a.average_cost.to_string() + "," + a.expected_executions.to_string() + "\n";
      return out;
    }
    case Format::MarkdownTable: {
      std::string out = "| Parameter | Expected occurrences | Average cost |\n|---|---|---|\n";
      for (const auto& a : e.per_activity)
        out += "| " + md_cell(a.name) + " | " + a.expected_executions.to_scientific(6) + " | " +
               a.average_cost.to_scientific(o.significant_digits) + " |\n";
      out += "| **Average Environmental Process Instance Cost** | | " +
             e.average_process_instance_cost.to_scientific(o.significant_digits) + " |\n";
      return out;
    }
    case Format::SvgBar:
      throw ValidationError("svg-bar rendering is available for cost reports, not expectations");
  }
  return {};
}

CostReport parse_report_json(std::string_view text, std::string_view source) {
  const std::string src(source);
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what(), {src, 0, {}});
  }
  try {
    CostReport r;
    r.scenario = j.value("scenario", "");
    r.trace_count = j.value("traceCount", std::uint64_t{0});
    for (const auto& a : j.at("perActivity"))
      r.per_activity.push_back({a.at("name").get<std::string>(), ExactDecimal::parse(a.at("averageCost").get<std::string>()),
                                a.value("occurrences", std::uint64_t{0})});
    std::sort(r.per_activity.begin(), r.per_activity.end(),
              [](const ActivityCostRow& x, const ActivityCostRow& y) { return x.name < y.name; });
    r.average_process_instance_cost = ExactDecimal::parse(j.at("averageProcessInstanceCost").get<std::string>());
    if (j.contains("variants"))
      for (const auto& v : j.at("variants"))
        r.variants.push_back({v.at("id").get<std::string>(), v.value("traceCount", std::uint64_t{0}),
                              ExactDecimal::parse(v.value("averageCost", std::string("0")))});
    r.warning_count = j.value("warnings", std::uint64_t{0});
    if (j.contains("warningMessages")) r.warnings = j.at("warningMessages").get<std::vector<std::string>>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("cost report JSON: ") + e.what(), {src, 0, {}});
  } catch (const Error& e) {
    throw ParseError("cost report JSON: " + e.message(), {src, 0, {}});
  }
}

}  // namespace sopa
