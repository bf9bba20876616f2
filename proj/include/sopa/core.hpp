#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sopa/decimal.hpp"

namespace sopa {

// Non-empty activity label; equality is exact text match.
class ActivityId {
 public:
  explicit ActivityId(std::string name);
  const std::string& str() const { return name_; }
  friend auto operator<=>(const ActivityId&, const ActivityId&) = default;

 private:
  std::string name_;
};

struct AbstractCostDriver {
  std::string id;
  friend auto operator<=>(const AbstractCostDriver&, const AbstractCostDriver&) = default;
};

struct ConcreteCostDriver {
  std::string id;
  std::string parent;  // abstract driver id
  ExactDecimal cost;
  friend bool operator==(const ConcreteCostDriver&, const ConcreteCostDriver&) = default;
};

// Relation between abstract drivers and the concrete drivers realizing them.
// Each concrete driver has exactly one abstract parent.
class CostDriverHierarchy {
 public:
  // Throws ValidationError on empty ids, negative cost, or a concrete id
  // registered twice.
  void add(const AbstractCostDriver& abstract, ConcreteCostDriver concrete);

  bool has_abstract(const std::string& abstract_id) const;
  const ConcreteCostDriver* find_concrete(const std::string& concrete_id) const;
  std::vector<const ConcreteCostDriver*> concretizations(const std::string& abstract_id) const;
  std::vector<std::pair<std::string, std::string>> pairs() const;  // (abstract, concrete)
  std::size_t size() const { return concrete_.size(); }

 private:
  std::map<std::string, ConcreteCostDriver> concrete_;
  std::map<std::string, std::vector<std::string>> by_abstract_;
};

// Second-resolution instant with the UTC offset it was written with.
struct Timestamp {
  std::int64_t epoch_seconds = 0;  // UTC
  int offset_minutes = 0;

  // Accepts "YYYY-MM-DDTHH:MM:SS[.fff](Z|+HH:MM|-HH:MM)"; fractions are
  // truncated. Throws ParseError.
  static Timestamp parse(const std::string& text);
  std::string to_string() const;  // "2026-07-17T15:35:28+02:00"
  Timestamp plus_seconds(std::int64_t s) const { return {epoch_seconds + s, offset_minutes}; }
  friend auto operator<=>(const Timestamp&, const Timestamp&) = default;
};

// One recorded cost driver on an activity instance. The log stores the
// abstract driver id; the concrete driver is resolved through the trace's
// cost variant unless an inline score was recorded.
struct DriverRef {
  std::string id;
  std::optional<ExactDecimal> inline_cost;
  friend bool operator==(const DriverRef&, const DriverRef&) = default;
};

struct ActivityInstance {
  std::string activity;
  std::vector<DriverRef> drivers;  // set semantics, insertion order kept
  Timestamp start;
  Timestamp complete;
  std::size_t sequence = 0;

  // Adds a driver; returns false (and leaves the set unchanged) if the id
  // is already present.
  bool add_driver(DriverRef driver);
  bool has_driver(const std::string& id) const;
  friend bool operator==(const ActivityInstance&, const ActivityInstance&) = default;
};

struct ProcessInstance {
  std::string id;
  std::optional<std::string> variant;
  std::vector<ActivityInstance> instances;
  friend bool operator==(const ProcessInstance&, const ProcessInstance&) = default;
};

struct EventLog {
  std::vector<ProcessInstance> traces;

  // Trace ids unique, every trace non-empty, sequence indices 0..n-1 in
  // order. Throws ValidationError.
  void check_invariants() const;
  friend bool operator==(const EventLog&, const EventLog&) = default;
};

}  // namespace sopa
