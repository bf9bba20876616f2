#include <doctest.h>

#include <random>

#include "sopa/error.hpp"
#include "sopa/xes.hpp"
#include "support.hpp"

using namespace sopa;

namespace {

ActivityInstance instance(std::string name, std::vector<std::string> drivers, const char* start, const char* complete) {
  ActivityInstance ai;
  ai.activity = std::move(name);
  for (auto& d : drivers) ai.add_driver({std::move(d), std::nullopt});
  ai.start = Timestamp::parse(start);
  ai.complete = Timestamp::parse(complete);
  return ai;
}

std::string one_trace(const std::string& events) {
  return "<log><trace><string key=\"concept:name\" value=\"1\"/>" + events + "</trace></log>";
}

std::string event(const char* name, const char* transition, const char* extra = "") {
  return std::string("<event><string key=\"concept:name\" value=\"") + name + "\"/>" + extra +
         "<string key=\"lifecycle:transition\" value=\"" + transition +
         "\"/><date key=\"time:timestamp\" value=\"2026-07-17T15:35:28+02:00\"/></event>";
}

}  // namespace

TEST_CASE("sample trace parses to the documented structure") {
  const auto r = parse_xes(testsupport::read_text(testsupport::fixture_path("hiring/sample-trace.xes")));
  CHECK(r.warnings.empty());
  REQUIRE(r.log.traces.size() == 1);
  const auto& t = r.log.traces[0];
  CHECK(t.id == "410");
  CHECK(t.variant == std::optional<std::string>("standard procedure"));
  REQUIRE(t.instances.size() == 2);
  CHECK(t.instances[0].activity == "Hiring required");
  CHECK(t.instances[0].drivers.empty());
  CHECK(t.instances[0].start.to_string() == "2026-07-17T15:35:28+02:00");
  CHECK(t.instances[0].complete.to_string() == "2026-07-17T15:35:28+02:00");
  CHECK(t.instances[1].activity == "Submit request for job advertisement (Department)");
  CHECK(t.instances[1].drivers == std::vector<DriverRef>{{"Request for job advertisement", std::nullopt}});
  CHECK(t.instances[1].start.to_string() == "2026-07-17T15:35:28+02:00");
  CHECK(t.instances[1].complete.to_string() == "2026-07-17T16:12:16+02:00");
  CHECK(t.instances[1].sequence == 1);
}

TEST_CASE("writer reproduces the sample trace layout") {
  EventLog log;
  ProcessInstance t;
  t.id = "410";
  t.variant = "standard procedure";
  t.instances.push_back(instance("Hiring required", {}, "2026-07-17T15:35:28+02:00", "2026-07-17T15:35:28+02:00"));
  t.instances.push_back(instance("Submit request for job advertisement (Department)", {"Request for job advertisement"},
                                 "2026-07-17T15:35:28+02:00", "2026-07-17T16:12:16+02:00"));
  t.instances[1].sequence = 1;
  log.traces.push_back(t);
  const std::string xes = write_xes(log);
  // The sample elides the remaining events with "..."; compare everything
  // above that line.
  std::string sample = testsupport::read_text(testsupport::fixture_path("hiring/sample-trace.xes"));
  sample = sample.substr(0, sample.find("    \t..."));
  std::string expected;
  // The sample shows the trace element itself without its log indentation.
  const auto begin = xes.find("\t<trace>\n") + 1;
  const auto end = xes.find("\t</trace>");
  const std::string trace = xes.substr(begin, end - begin);
  CHECK(trace == sample);
  CHECK(parse_xes(xes).log == log);
}

TEST_CASE("multiple drivers become sibling strings and inline costs nest") {
  EventLog log;
  ProcessInstance t;
  t.id = "1";
  auto ai = instance("Sift", {"Sifting", "Paper"}, "2026-01-01T00:00:00Z", "2026-01-01T00:00:01Z");
  ai.drivers[1].inline_cost = ExactDecimal::parse("1.34e-5");
  t.instances.push_back(ai);
  log.traces.push_back(t);
  const auto xes = write_xes(log);
  CHECK(xes.find("<string key=\"cost:driver\" value=\"Sifting\"/>\n\t\t\t<string key=\"cost:driver\" value=\"Paper\">") !=
        std::string::npos);
  CHECK(xes.find("<float key=\"cost:value\" value=\"0.0000134\"/>") != std::string::npos);
  CHECK(xes.find("cost:variant") == std::string::npos);
  CHECK(parse_xes(xes).log == log);
}

TEST_CASE("duplicate drivers collapse with a warning") {
  const auto r = parse_xes(one_trace(event("A", "start") +
                                     event("A", "complete",
                                           R"(<string key="cost:driver" value="d"/><string key="cost:driver" value="d"/>)")));
  CHECK(r.log.traces[0].instances[0].drivers.size() == 1);
  CHECK(r.warnings.size() == 1);
}

TEST_CASE("start and complete events pair FIFO per activity") {
  const auto r = parse_xes(one_trace(event("A", "start") + event("B", "start") + event("A", "start") +
                                     event("A", "complete", R"(<string key="cost:driver" value="first"/>)") +
                                     event("B", "complete") + event("A", "complete", R"(<string key="cost:driver" value="second"/>)")));
  const auto& inst = r.log.traces[0].instances;
  REQUIRE(inst.size() == 3);
  CHECK(inst[0].activity == "A");
  CHECK(inst[0].drivers[0].id == "first");
  CHECK(inst[1].activity == "B");
  CHECK(inst[2].drivers[0].id == "second");
}

TEST_CASE("event-level cost values") {
  const auto r = parse_xes(one_trace(event("A", "start") + event("A", "complete", R"(<float key="cost:value" value="2.5e-5"/>)")));
  CHECK(r.log.traces[0].instances[0].drivers == std::vector<DriverRef>{{"A", ExactDecimal::parse("2.5e-5")}});
  CHECK_THROWS_AS(parse_xes(one_trace(event("A", "start") +
                                      event("A", "complete",
                                            R"(<string key="cost:driver" value="x"/><string key="cost:driver" value="y"/><float key="cost:value" value="1"/>)"))),
                  ParseError);
}

TEST_CASE("malformed logs") {
  CHECK_THROWS_AS(parse_xes(one_trace(event("A", "complete"))), ParseError);
  CHECK_THROWS_AS(parse_xes(one_trace(event("A", "start"))), ParseError);
  CHECK_THROWS_AS(parse_xes(R"(<log><trace><string key="concept:name" value="1"/><event><string key="concept:name" value="A"/><date key="time:timestamp" value="yesterday"/></event></trace></log>)"),
                  ParseError);
  CHECK_THROWS_AS(parse_xes(R"(<log><trace><string key="concept:name" value="1"/><event><string key="concept:name" value="A"/></event></trace></log>)"),
                  ParseError);
  CHECK_THROWS_AS(parse_xes("<log><trace>"), ParseError);
  CHECK_THROWS_AS(parse_xes("<events/>"), ParseError);
  CHECK_THROWS_AS(parse_xes(one_trace(event("A", "start") + event("A", "complete")), {true}), ParseError);
  try {
    parse_xes("<log>\n<trace>\n<string key=\"concept:name\" value=\"1\"/>\n" + event("A", "complete") + "</trace></log>", {},
              "l.xes");
    FAIL("expected an error");
  } catch (const ParseError& e) {
    CHECK(e.context().file == "l.xes");
    CHECK(e.context().line == 4);
    CHECK(e.context().element == "event");
  }
}

TEST_CASE("round trip on randomized logs") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 100; ++i) {
    const auto log = testsupport::random_log(rng);
    const auto text = write_xes(log);
    const auto back = parse_xes(text);
    REQUIRE(back.log == log);
    CHECK(back.warnings.empty());
    CHECK(write_xes(back.log) == text);
  }
}
