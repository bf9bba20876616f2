#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sopa/costing.hpp"
#include "sopa/oracle.hpp"

namespace sopa {

enum class RowStatus { Both, BaselineOnly, CandidateOnly, Undefined };

struct ComparisonRow {
  std::string name;
  std::optional<ExactDecimal> baseline;
  std::optional<ExactDecimal> candidate;
  // (candidate - baseline) / baseline; empty unless status is Both.
  std::optional<mpq_class> relative;
  RowStatus status = RowStatus::Both;
};

struct ComparisonReport {
  std::string baseline_label;
  std::string candidate_label;
  std::vector<ComparisonRow> rows;  // sorted by activity name
  ComparisonRow overall;            // average process instance cost
};

ComparisonReport compare(const CostReport& baseline, const CostReport& candidate);

enum class Format { Json, Csv, SvgBar, MarkdownTable };
enum class Chart { Activities, Instances };

Format parse_format(std::string_view name);  // throws ValidationError

struct RenderOptions {
  int significant_digits = 3;  // cost values
  int percent_decimals = 2;    // relative differences, truncated
  Chart chart = Chart::Activities;
};

// "-89.20%", "+12.50%", "0%", or the division-by-zero marker.
std::string format_relative(const ComparisonRow& row, int decimals = 2);
inline constexpr std::string_view kUndefinedMarker = "undefined (division by zero)";

std::string render(const CostReport& report, Format format, const RenderOptions& options = {});
// Several scenarios side by side (markdown table, grouped bar chart, csv,
// json array).
std::string render(const std::vector<CostReport>& reports, Format format, const RenderOptions& options = {});
// Comparisons sharing a baseline, one column per candidate.
std::string render(const std::vector<ComparisonReport>& comparisons, Format format, const RenderOptions& options = {});
std::string render(const Expectation& expectation, Format format, const RenderOptions& options = {});

// Reads the JSON produced by render(report, Format::Json).
CostReport parse_report_json(std::string_view json, std::string_view source = {});

}  // namespace sopa
