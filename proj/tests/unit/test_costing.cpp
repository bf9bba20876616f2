#include <doctest.h>

#include <algorithm>
#include <random>

#include "sopa/costing.hpp"
#include "sopa/error.hpp"
#include "support.hpp"

using namespace sopa;

namespace {

ExactDecimal d(const char* s) { return ExactDecimal::parse(s); }

ActivityInstance act(const char* name, std::vector<std::string> drivers) {
  ActivityInstance ai;
  ai.activity = name;
  for (auto& x : drivers) ai.add_driver({std::move(x), std::nullopt});
  return ai;
}

ProcessInstance trace(const char* id, const char* variant, std::vector<ActivityInstance> instances) {
  ProcessInstance t;
  t.id = id;
  t.variant = variant;
  for (std::size_t i = 0; i < instances.size(); ++i) instances[i].sequence = i;
  t.instances = std::move(instances);
  return t;
}

// Two variants realizing abstract drivers d1 (sifting), d2 (list
// compilation) and d3 (interview). v1 concretizes d1/d2 as c1/c5, v2 as
// c2/c3.
CostVariantConfig small_config() {
  return parse_variant_config(R"(<costVariantConfig count="3">
    <variant id="v1" frequency="1/3">
      <driver id="d1" cost="5.85e-5"/><driver id="d2" cost="1.34e-5"/><driver id="d3" cost="3.5e-5"/>
    </variant>
    <variant id="v2" frequency="2/3">
      <driver id="d1" cost="2.00e-5"/><driver id="d2" cost="1.63e-5"/><driver id="d3" cost="3.5e-5"/>
    </variant>
  </costVariantConfig>)");
}

EventLog small_log() {
  EventLog log;
  log.traces.push_back(trace("t1", "v1", {act("a", {"d1", "d2"}), act("b", {"d3"})}));
  log.traces.push_back(trace("t2", "v2", {act("a", {"d1", "d2"}), act("b", {"d3"}), act("a", {"d1", "d2"})}));
  log.traces.push_back(trace("t3", "v2", {act("a", {"d1", "d2"}), act("b", {"d3"})}));
  return log;
}

}  // namespace

TEST_CASE("small log: activity instance cost") {
  const auto config = small_config();
  const CostResolver costs(&config);
  CHECK(activity_instance_cost(act("a", {"d1", "d2"}), "v1", costs) == d("7.19e-5"));
  CHECK(activity_instance_cost(act("a", {}), "v1", costs) == ExactDecimal(0));
}

TEST_CASE("small log: process instance cost") {
  const auto config = small_config();
  const CostResolver costs(&config);
  CHECK(process_instance_cost(small_log().traces[0], costs) == d("10.69e-5"));
}

TEST_CASE("small log: average activity cost") {
  const auto config = small_config();
  const CostResolver costs(&config);
  const auto log = small_log();
  CHECK(average_activity_cost("a", log, costs) == d("4.52e-5"));
  CHECK(average_activity_cost("b", log, costs) == d("3.5e-5"));
  CHECK(occurrence_count("a", log.traces[1]) == 2);
  CHECK(specific_count("a", {"d1@v2", "d2@v2"}, log.traces[1], costs) == 2);
  CHECK(specific_count("a", {"d1@v1", "d2@v1"}, log.traces[1], costs) == 0);
  CHECK_THROWS_AS(average_activity_cost("z", log, costs), CostingError);
}

TEST_CASE("small log: average process instance cost") {
  EventLog log;
  const char* scores[] = {"10.69e-5", "13.31e-5", "9.00e-5"};
  for (int i = 0; i < 3; ++i) {
    ProcessInstance t;
    t.id = std::to_string(i);
    ActivityInstance ai;
    ai.activity = "a";
    ai.add_driver({"score", d(scores[i])});
    t.instances.push_back(ai);
    log.traces.push_back(t);
  }
  CHECK(average_process_instance_cost(log, CostResolver()) == d("11e-5"));
  CHECK_THROWS_AS(average_process_instance_cost(EventLog{}, CostResolver()), CostingError);
}

TEST_CASE("inline costs take precedence over the config") {
  const auto config = small_config();
  const CostResolver costs(&config);
  ActivityInstance ai = act("a", {"d1"});
  ai.drivers[0].inline_cost = d("1e-3");
  CHECK(activity_instance_cost(ai, "v1", costs) == d("1e-3"));
}

TEST_CASE("strict and lenient resolution") {
  const auto config = small_config();
  EventLog log;
  log.traces.push_back(trace("t1", "v1", {act("a", {"d1", "unknown"})}));
  log.traces.push_back(trace("t2", "v9", {act("a", {"d1"})}));
  CHECK_THROWS_AS(analyze(log, &config), CostingError);
  try {
    analyze(log, &config);
  } catch (const CostingError& e) {
    CHECK(std::string(e.what()).find("trace 't1'") != std::string::npos);
    CHECK(std::string(e.what()).find("'unknown'") != std::string::npos);
  }
  AnalyzeOptions lenient;
  lenient.mode = Resolution::Lenient;
  const auto report = analyze(log, &config, lenient);
  CHECK(report.warning_count == 2);
  CHECK(report.warnings.size() == 2);
  CHECK(report.find("a")->average_cost == d("5.85e-5") / 2u);
  // Without a config only inline scores resolve.
  CHECK_THROWS_AS(analyze(log, nullptr), CostingError);
}

TEST_CASE("analyze report") {
  const auto config = small_config();
  AnalyzeOptions options;
  options.scenario = "small";
  const auto r = analyze(small_log(), &config, options);
  CHECK(r.scenario == "small");
  CHECK(r.trace_count == 3);
  REQUIRE(r.per_activity.size() == 2);
  CHECK(r.per_activity[0].name == "a");
  CHECK(r.per_activity[0].occurrences == 4);
  CHECK(r.per_activity[0].average_cost == d("4.52e-5"));
  CHECK(r.per_activity[1].average_cost == d("3.5e-5"));
  CHECK(r.average_process_instance_cost == (d("10.69e-5") + d("10.76e-5") + d("7.13e-5")) / 3u);
  REQUIRE(r.variants.size() == 2);
  CHECK(r.variants[0].id == "v1");
  CHECK(r.variants[1].trace_count == 2);
  CHECK(r.warning_count == 0);
  CHECK_THROWS_AS(analyze(EventLog{}, &config), CostingError);
}

TEST_CASE("costing invariants on randomized logs") {
  std::mt19937_64 rng(11);
  const std::vector<std::string> drivers = {"mail", "paper", "energy"};
  const std::vector<std::string> activities = {"A", "B", "C", "D", "E"};
  for (int round = 0; round < 40; ++round) {
    const auto config = testsupport::random_config(rng, drivers, 1 + round % 4);
    auto log = testsupport::random_costed_log(rng, config, activities, 1 + round * 3);
    const CostResolver costs(&config);
    const auto report = analyze(log, &config);

    // Decomposition: trace totals = activity totals = n * average.
    ExactDecimal trace_total, activity_total, variant_total;
    for (const auto& t : log.traces) trace_total += process_instance_cost(t, costs);
    for (const auto& row : report.per_activity) {
      activity_total += row.average_cost * row.occurrences;
      CHECK(row.average_cost == average_activity_cost(row.name, log, costs));
    }
    for (const auto& v : report.variants) variant_total += v.average_cost * v.trace_count;
    CHECK(trace_total == activity_total);
    CHECK(trace_total == variant_total);
    CHECK(report.average_process_instance_cost * report.trace_count == trace_total);
    CHECK(report.average_process_instance_cost == average_process_instance_cost(log, costs));

    // Bounds: every average lies between the extreme instance costs.
    for (const auto& row : report.per_activity) {
      std::optional<ExactDecimal> lo, hi;
      for (const auto& t : log.traces)
        for (const auto& ai : t.instances)
          if (ai.activity == row.name) {
            const auto c = activity_instance_cost(ai, t.variant, costs);
            if (!lo || c < *lo) lo = c;
            if (!hi || *hi < c) hi = c;
          }
      CHECK(*lo <= row.average_cost);
      CHECK(row.average_cost <= *hi);
    }

    // Permutation invariance and thread independence.
    std::shuffle(log.traces.begin(), log.traces.end(), rng);
    CHECK(analyze(log, &config) == report);
    AnalyzeOptions threaded;
    threaded.threads = 4;
    CHECK(analyze(log, &config, threaded) == report);
  }
}
