#include <doctest.h>

#include <random>

#include "sopa/error.hpp"
#include "sopa/report.hpp"
#include "support.hpp"

using namespace sopa;

namespace {

ExactDecimal d(const char* s) { return ExactDecimal::parse(s); }

CostReport report(const char* scenario, std::vector<std::pair<const char*, const char*>> rows, const char* average) {
  CostReport r;
  r.scenario = scenario;
  r.trace_count = 500;
  for (auto [name, cost] : rows) r.per_activity.push_back({name, d(cost), 10});
  r.average_process_instance_cost = d(average);
  r.variants.push_back({scenario, 500, d(average)});
  return r;
}

const ComparisonRow& row(const ComparisonReport& c, const std::string& name) {
  for (const auto& r : c.rows)
    if (r.name == name) return r;
  throw std::runtime_error("missing row " + name);
}

}  // namespace

TEST_CASE("relative differences render as signed truncated percentages") {
  const auto a = report("A", {{"Mail", "3.91e-5"}, {"Contract", "2.54e-5"}, {"Interview", "3.5e-5"}}, "7.00e-4");
  const auto b = report("B", {{"Mail", "4.22e-6"}, {"Contract", "2.54e-5"}, {"Interview", "3.5e-5"}}, "3.48e-4");
  const auto c = report("C", {{"Mail", "1.51e-7"}, {"Contract", "1.95e-5"}, {"Interview", "3.5e-5"}}, "2.44e-4");
  const auto ab = compare(a, b);
  const auto ac = compare(a, c);
  CHECK(format_relative(row(ab, "Mail")) == "-89.20%");
  CHECK(format_relative(row(ac, "Mail")) == "-99.61%");
  CHECK(format_relative(row(ac, "Contract")) == "-23.22%");
  CHECK(format_relative(row(ab, "Contract")) == "0%");
  CHECK(format_relative(ab.overall) == "-50.28%");
  CHECK(*row(ab, "Mail").relative == mpq_class(-1744, 1955));
  CHECK(format_relative(compare(b, a).overall) == "+101.14%");
}

TEST_CASE("identical reports compare to zero everywhere") {
  const auto a = report("A", {{"Mail", "3.91e-5"}, {"Zero", "0"}}, "7.00e-4");
  const auto c = compare(a, a);
  for (const auto& r : c.rows) CHECK(format_relative(r) == "0%");
  CHECK(format_relative(c.overall) == "0%");
}

TEST_CASE("zero baselines and one-sided rows are flagged") {
  const auto a = report("A", {{"Zero", "0"}, {"OnlyA", "1e-5"}}, "1e-5");
  const auto b = report("B", {{"Zero", "2e-5"}, {"OnlyB", "1e-5"}}, "3e-5");
  const auto c = compare(a, b);
  CHECK(row(c, "Zero").status == RowStatus::Undefined);
  CHECK(format_relative(row(c, "Zero")) == std::string(kUndefinedMarker));
  CHECK(row(c, "OnlyA").status == RowStatus::BaselineOnly);
  CHECK(row(c, "OnlyB").status == RowStatus::CandidateOnly);
  CHECK(format_relative(c.overall) == "+200.00%");
  CHECK_THROWS_AS(compare(CostReport{}, a), ValidationError);
}

TEST_CASE("antisymmetry at the ratio level") {
  std::mt19937_64 rng(13);
  std::uniform_int_distribution<int> digits(1, 99999);
  for (int i = 0; i < 100; ++i) {
    const std::string x = std::to_string(digits(rng)) + "e-9";
    const std::string y = std::to_string(digits(rng)) + "e-9";
    const auto a = report("A", {{"t", x.c_str()}}, x.c_str());
    const auto b = report("B", {{"t", y.c_str()}}, y.c_str());
    const mpq_class forward = *compare(a, b).overall.relative;
    const mpq_class backward = *compare(b, a).overall.relative;
    CHECK((1 + forward) * (1 + backward) == 1);
  }
}

TEST_CASE("json report round trips exactly") {
  auto r = report("A", {{"Check \"contents\"", "1/3"}, {"Sift", "5.85e-5"}}, "7.0084e-4");
  r.warning_count = 3;
  r.warnings = {"w1"};
  const auto json = render(r, Format::Json);
  CHECK(json.find("\"averageCostDisplay\": \"5.85e-5\"") != std::string::npos);
  CHECK(parse_report_json(json) == r);
  CHECK(render(parse_report_json(json), Format::Json) == json);
  CHECK_THROWS_AS(parse_report_json("{"), ParseError);
  CHECK_THROWS_AS(parse_report_json("{\"perActivity\": 3}"), ParseError);
}

TEST_CASE("csv has a header and one row per activity") {
  const auto r = report("A", {{"Mail, internal", "3.91e-5"}, {"Sift", "5.85e-5"}}, "7.00e-4");
  const auto csv = render(r, Format::Csv);
  CHECK(csv == "activity,averageCost,averageCostExact,occurrences\n\"Mail, internal\",3.91e-5,0.0000391,10\nSift,5.85e-5,0.0000585,10\n");
}

TEST_CASE("markdown tables") {
  const auto a = report("A", {{"Mail", "3.91e-5"}}, "7.00e-4");
  const auto b = report("B", {{"Mail", "4.22e-6"}}, "3.48e-4");
  const auto table = render(std::vector<CostReport>{a, b}, Format::MarkdownTable);
  CHECK(table ==
        "| Parameter | A | B |\n|---|---|---|\n| Mail | 3.91e-5 | 4.22e-6 |\n"
        "| **Average Environmental Process Instance Cost** | 7.00e-4 | 3.48e-4 |\n");
  const auto cmp = render(std::vector<ComparisonReport>{compare(a, b)}, Format::MarkdownTable);
  CHECK(cmp ==
        "| Parameter | A -> B |\n|---|---|\n| Mail | -89.20% |\n"
        "| **Average Environmental Process Instance Cost** | -50.28% |\n");
}

TEST_CASE("svg bar charts are deterministic and grouped") {
  const auto a = report("A", {{"Mail", "3.91e-5"}, {"Sift", "5.85e-5"}}, "7.00e-4");
  const auto b = report("B", {{"Mail", "4.22e-6"}, {"Sift", "5.85e-5"}}, "3.48e-4");
  const auto c = report("C", {{"Mail", "1.51e-7"}, {"Sift", "2.925e-5"}}, "2.44e-4");
  const std::vector<CostReport> all{a, b, c};
  const auto svg = render(all, Format::SvgBar);
  CHECK(svg == render(all, Format::SvgBar));
  CHECK(svg.rfind("<svg ", 0) == 0);
  std::size_t bars = 0;
  for (auto pos = svg.find("<rect x"); pos != std::string::npos; pos = svg.find("<rect x", pos + 1)) ++bars;
  CHECK(bars == 6 + 3);  // 2 activities x 3 series plus 3 legend swatches
  RenderOptions instances;
  instances.chart = Chart::Instances;
  const auto fig = render(all, Format::SvgBar, instances);
  std::size_t instance_bars = 0;
  for (auto pos = fig.find("<rect x"); pos != std::string::npos; pos = fig.find("<rect x", pos + 1)) ++instance_bars;
  CHECK(instance_bars == 3 + 1);
  CHECK(fig.find(": 2.44e-4</title>") != std::string::npos);
  CHECK_THROWS_AS(render(std::vector<ComparisonReport>{compare(a, b)}, Format::SvgBar), ValidationError);
}

TEST_CASE("format names") {
  CHECK(parse_format("json") == Format::Json);
  CHECK(parse_format("csv") == Format::Csv);
  CHECK(parse_format("svg-bar") == Format::SvgBar);
  CHECK(parse_format("markdown-table") == Format::MarkdownTable);
  CHECK_THROWS_AS(parse_format("pdf"), ValidationError);
}
