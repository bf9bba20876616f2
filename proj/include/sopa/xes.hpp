#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "sopa/core.hpp"

namespace sopa {

struct XesReadOptions {
  // Require every trace to carry a cost:variant attribute.
  bool strict = false;
};

struct XesReadResult {
  EventLog log;
  std::vector<std::string> warnings;
};

// Serializes a log as XES 2.0: per trace concept:name and cost:variant, per
// activity instance a start and a complete event; drivers are repeated
// cost:driver strings on the complete event.
std::string write_xes(const EventLog& log);

// Parses XES. Start/complete events are paired FIFO per activity name;
// duplicate cost:driver values collapse into one driver plus a warning.
// Throws ParseError on malformed documents, unmatched events or bad
// timestamps.
XesReadResult parse_xes(std::string_view xml, const XesReadOptions& options = {}, std::string_view source = {});

}  // namespace sopa
