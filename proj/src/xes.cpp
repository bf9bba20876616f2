#include "sopa/xes.hpp"

#include <deque>
#include <map>
#include <optional>

#include "sopa/error.hpp"
#include "sopa/xml.hpp"

namespace sopa {
namespace {

void string_attr(std::string& out, const char* indent, std::string_view key, std::string_view value) {
  out += indent;
  out += "<string key=\"";
  out += xml::escape(key);
  out += "\" value=\"";
  out += xml::escape(value);
  out += "\"/>\n";
}

void write_event(std::string& out, const ActivityInstance& ai, bool complete) {
  out += "\t\t<event>\n";
  if (complete) {
    for (const auto& d : ai.drivers) {
      if (d.inline_cost) {
        out += "\t\t\t<string key=\"cost:driver\" value=\"" + xml::escape(d.id) + "\">\n";
        out += "\t\t\t\t<float key=\"cost:value\" value=\"" + d.inline_cost->to_string() + "\"/>\n";
        out += "\t\t\t</string>\n";
      } else {
        string_attr(out, "\t\t\t", "cost:driver", d.id);
      }
    }
  }
  string_attr(out, "\t\t\t", "concept:name", ai.activity);
  string_attr(out, "\t\t\t", "lifecycle:transition", complete ? "complete" : "start");
  out += "\t\t\t<date key=\"time:timestamp\" value=\"" + (complete ? ai.complete : ai.start).to_string() + "\"/>\n";
  out += "\t\t</event>\n";
}

struct RawEvent {
  std::string name;
  std::string transition;
  std::optional<Timestamp> timestamp;
  std::vector<DriverRef> drivers;
  std::optional<ExactDecimal> event_cost;
  long line = 0;
};

ExactDecimal cost_value(const xml::Element& e, const std::string& src) {
  try {
    return ExactDecimal::parse(e.required_attr("value", src));
  } catch (const Error& err) {
    throw ParseError("cost:value: " + err.message(), {src, e.line, e.local});
  }
}

RawEvent read_event(const xml::Element& ev, const std::string& src, std::vector<std::string>& warnings,
                    const std::string& trace_id) {
  RawEvent out;
  out.line = ev.line;
  for (const auto& a : ev.children) {
    const auto key = a.attr("key");
    if (!key) continue;
    if (*key == "concept:name") {
      out.name = a.required_attr("value", src);
    } else if (*key == "lifecycle:transition") {
      out.transition = a.required_attr("value", src);
    } else if (*key == "time:timestamp") {
      try {
        out.timestamp = Timestamp::parse(a.required_attr("value", src));
      } catch (const ParseError& err) {
        throw ParseError(err.message(), {src, a.line, a.local});
      }
    } else if (*key == "cost:driver") {
      DriverRef d{a.required_attr("value", src), std::nullopt};
      for (const auto& nested : a.children)
        if (nested.attr("key") == std::optional<std::string>("cost:value")) d.inline_cost = cost_value(nested, src);
      bool duplicate = false;
      for (const auto& existing : out.drivers) duplicate = duplicate || existing.id == d.id;
      if (duplicate) {
        warnings.push_back(src + (src.empty() ? "" : ":") + std::to_string(a.line) + ": trace '" + trace_id +
                           "': duplicate cost:driver '" + d.id + "' collapsed");
      } else {
        out.drivers.push_back(std::move(d));
      }
    } else if (*key == "cost:value") {
      out.event_cost = cost_value(a, src);
    }
  }
  if (out.name.empty()) throw ParseError("event without concept:name", {src, ev.line, ev.local});
  if (out.transition.empty()) out.transition = "complete";
  if (out.event_cost) {
    if (out.drivers.size() > 1)
      throw ParseError("event-level cost:value is ambiguous with several cost:driver attributes; nest it instead",
                       {src, ev.line, ev.local});
    if (out.drivers.empty()) {
      out.drivers.push_back(DriverRef{out.name, out.event_cost});
    } else if (!out.drivers.front().inline_cost) {
      out.drivers.front().inline_cost = out.event_cost;
    }
  }
  return out;
}

}  // namespace

std::string write_xes(const EventLog& log) {
  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<log xes.version=\"2.0\" xes.features=\"nested-attributes\" xmlns=\"http://www.xes-standard.org/\">\n";
  out += "\t<extension name=\"Concept\" prefix=\"concept\" uri=\"http://www.xes-standard.org/concept.xesext\"/>\n";
  out += "\t<extension name=\"Lifecycle\" prefix=\"lifecycle\" uri=\"http://www.xes-standard.org/lifecycle.xesext\"/>\n";
  out += "\t<extension name=\"Time\" prefix=\"time\" uri=\"http://www.xes-standard.org/time.xesext\"/>\n";
  out += "\t<extension name=\"Cost\" prefix=\"cost\" uri=\"urn:sopa:xes-cost-extension:1.0\"/>\n";
  for (const auto& t : log.traces) {
    out += "\t<trace>\n";
    string_attr(out, "\t\t", "concept:name", t.id);
    if (t.variant) string_attr(out, "\t\t", "cost:variant", *t.variant);
    for (const auto& ai : t.instances) {
      write_event(out, ai, false);
      write_event(out, ai, true);
    }
    out += "\t</trace>\n";
  }
  out += "</log>\n";
  return out;
}

XesReadResult parse_xes(std::string_view xml_text, const XesReadOptions& options, std::string_view source) {
  const std::string src(source);
  const xml::Element root = xml::parse(xml_text, source);
  XesReadResult result;

  std::vector<const xml::Element*> traces;
  if (root.local == "trace") {
    traces.push_back(&root);  // bare trace fragment
  } else if (root.local == "log") {
    for (const auto& c : root.children)
      if (c.local == "trace") traces.push_back(&c);
  } else {
    throw ParseError("root element must be <log>, found <" + root.local + ">", {src, root.line, root.local});
  }

  for (const xml::Element* te : traces) {
    ProcessInstance trace;
    std::vector<const xml::Element*> events;
    for (const auto& c : te->children) {
      if (c.local == "event") {
        events.push_back(&c);
        continue;
      }
      const auto key = c.attr("key");
      if (!key) continue;
      if (*key == "concept:name") trace.id = c.required_attr("value", src);
      else if (*key == "cost:variant") trace.variant = c.required_attr("value", src);
    }
    if (trace.id.empty()) throw ParseError("trace without concept:name", {src, te->line, te->local});
    if (options.strict && !trace.variant)
      throw ParseError("trace '" + trace.id + "' has no cost:variant", {src, te->line, te->local});

    std::map<std::string, std::deque<std::size_t>> open;  // activity -> pending instance indices
    for (const xml::Element* ev : events) {
      RawEvent raw = read_event(*ev, src, result.warnings, trace.id);
      if (!raw.timestamp) throw ParseError("event '" + raw.name + "' has no time:timestamp", {src, ev->line, ev->local});
      if (raw.transition == "start") {
        if (!raw.drivers.empty()) {
          result.warnings.push_back(src + (src.empty() ? "" : ":") + std::to_string(ev->line) +
                                    ": cost:driver on a start event is ignored");
        }
        ActivityInstance ai;
        ai.activity = raw.name;
        ai.start = *raw.timestamp;
        ai.sequence = trace.instances.size();
        open[raw.name].push_back(trace.instances.size());
        trace.instances.push_back(std::move(ai));
      } else if (raw.transition == "complete") {
        auto& queue = open[raw.name];
        if (queue.empty())
          throw ParseError("complete event for '" + raw.name + "' in trace '" + trace.id + "' has no matching start",
                           {src, ev->line, ev->local});
        ActivityInstance& ai = trace.instances[queue.front()];
        queue.pop_front();
        ai.complete = *raw.timestamp;
        ai.drivers = std::move(raw.drivers);
      }
      // other lifecycle transitions (schedule, suspend, ...) carry no cost
    }
    for (const auto& [name, queue] : open)
      if (!queue.empty())
        throw ParseError("start event for '" + name + "' in trace '" + trace.id + "' is never completed",
                         {src, te->line, te->local});
    if (trace.instances.empty()) throw ParseError("trace '" + trace.id + "' has no events", {src, te->line, te->local});
    result.log.traces.push_back(std::move(trace));
  }
  try {
    result.log.check_invariants();
  } catch (const Error& err) {
    throw ParseError(err.message(), {src, 0, {}});
  }
  return result;
}

}  // namespace sopa
