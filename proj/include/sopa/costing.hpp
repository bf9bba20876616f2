#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sopa/core.hpp"
#include "sopa/decimal.hpp"
#include "sopa/variant_config.hpp"

namespace sopa {

enum class Resolution { Strict, Lenient };

// The cost function joined with a trace's variant. Inline scores recorded
// in the log take precedence over the config.
class CostResolver {
 public:
  explicit CostResolver(const CostVariantConfig* config = nullptr, Resolution mode = Resolution::Strict)
      : config_(config), mode_(mode) {}

  Resolution mode() const { return mode_; }
  const CostVariantConfig* config() const { return config_; }

  // Concrete driver realizing `driver` in `variant`, or nullopt when it
  // cannot be resolved (lenient mode). Throws CostingError in strict mode.
  std::optional<ConcreteCostDriver> resolve(const std::optional<std::string>& variant, const DriverRef& driver) const;

 private:
  const CostVariantConfig* config_;
  Resolution mode_;
};

// Counts unresolved drivers encountered in lenient mode.
struct CostWarnings {
  std::uint64_t unresolved = 0;
  std::vector<std::string> messages;
  void add(std::string message);
};

ExactDecimal activity_instance_cost(const ActivityInstance& instance, const std::optional<std::string>& variant,
                                    const CostResolver& costs, CostWarnings* warnings = nullptr);

ExactDecimal process_instance_cost(const ProcessInstance& trace, const CostResolver& costs,
                                   CostWarnings* warnings = nullptr);

// Occurrences of `activity` in one trace.
std::uint64_t occurrence_count(const std::string& activity, const ProcessInstance& trace);
// Occurrences of `activity` with exactly the concretization set `concrete_ids`
// (sorted concrete driver ids) in one trace.
std::uint64_t specific_count(const std::string& activity, const std::vector<std::string>& concrete_ids,
                             const ProcessInstance& trace, const CostResolver& costs);

// Weighted average over the distinct concretization sets of the activity.
// Throws CostingError when the activity does not occur.
ExactDecimal average_activity_cost(const std::string& activity, const EventLog& log, const CostResolver& costs);

// Throws CostingError for an empty log.
ExactDecimal average_process_instance_cost(const EventLog& log, const CostResolver& costs);

struct ActivityCostRow {
  std::string name;
  ExactDecimal average_cost;
  std::uint64_t occurrences = 0;
  friend bool operator==(const ActivityCostRow&, const ActivityCostRow&) = default;
};

struct VariantRow {
  std::string id;  // "" for traces without a variant
  std::uint64_t trace_count = 0;
  ExactDecimal average_cost;
  friend bool operator==(const VariantRow&, const VariantRow&) = default;
};

struct CostReport {
  std::string scenario;
  std::vector<ActivityCostRow> per_activity;  // sorted by name
  ExactDecimal average_process_instance_cost;
  std::uint64_t trace_count = 0;
  std::vector<VariantRow> variants;  // sorted by id
  std::uint64_t warning_count = 0;
  std::vector<std::string> warnings;

  const ActivityCostRow* find(const std::string& activity) const;
  friend bool operator==(const CostReport&, const CostReport&) = default;
};

struct AnalyzeOptions {
  std::string scenario;
  Resolution mode = Resolution::Strict;
  unsigned threads = 1;
};

// Full cost analysis of a log. `config` may be null when every driver in
// the log carries an inline score. Throws CostingError (strict mode
// resolution failures, empty log).
CostReport analyze(const EventLog& log, const CostVariantConfig* config, const AnalyzeOptions& options = {});

}  // namespace sopa
