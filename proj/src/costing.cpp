#include "sopa/costing.hpp"

#include <algorithm>
#include <set>
#include <thread>

#include "sopa/error.hpp"

namespace sopa {

void CostWarnings::add(std::string message) {
  ++unresolved;
  constexpr std::size_t kMaxMessages = 100;
  if (messages.size() < kMaxMessages) messages.push_back(std::move(message));
}

std::optional<ConcreteCostDriver> CostResolver::resolve(const std::optional<std::string>& variant,
                                                        const DriverRef& driver) const {
  if (driver.inline_cost)
    return ConcreteCostDriver{driver.id + "=" + driver.inline_cost->to_string(), driver.id, *driver.inline_cost};
  std::string problem;
  if (!variant) {
    problem = "driver '" + driver.id + "' has no inline cost and its trace has no cost variant";
  } else if (!config_) {
    problem = "driver '" + driver.id + "' has no inline cost and no cost variant config was given";
  } else if (const CostVariant* v = config_->find(*variant); !v) {
    problem = "unknown cost variant '" + *variant + "'";
  } else if (const ExactDecimal* cost = v->find_cost(driver.id); !cost) {
    problem = "driver '" + driver.id + "' is not concretized by variant '" + *variant + "'";
  } else {
    return ConcreteCostDriver{concrete_driver_id(*variant, driver.id), driver.id, *cost};
  }
  if (mode_ == Resolution::Strict) throw CostingError(problem);
  return std::nullopt;
}

namespace {

// Resolved concretization set of one activity instance (sorted concrete ids)
// together with its cost.
struct Concretization {
  std::vector<std::string> ids;
  ExactDecimal cost;
};

Concretization concretize(const ActivityInstance& instance, const std::optional<std::string>& variant,
                          const CostResolver& costs, CostWarnings* warnings, const std::string& trace_id) {
  Concretization c;
  for (const auto& d : instance.drivers) {
    std::optional<ConcreteCostDriver> concrete;
    try {
      concrete = costs.resolve(variant, d);
    } catch (const CostingError& err) {
      throw CostingError((trace_id.empty() ? std::string() : "trace '" + trace_id + "', ") + "activity '" +
                         instance.activity + "': " + err.message());
    }
    if (!concrete) {
      if (warnings)
        warnings->add((trace_id.empty() ? std::string() : "trace '" + trace_id + "', ") + "activity '" +
                      instance.activity + "': unresolved driver '" + d.id + "' skipped");
      continue;
    }
    c.ids.push_back(concrete->id);
    c.cost += concrete->cost;
  }
  std::sort(c.ids.begin(), c.ids.end());
  return c;
}

}  // namespace

ExactDecimal activity_instance_cost(const ActivityInstance& instance, const std::optional<std::string>& variant,
                                    const CostResolver& costs, CostWarnings* warnings) {
  return concretize(instance, variant, costs, warnings, {}).cost;
}

ExactDecimal process_instance_cost(const ProcessInstance& trace, const CostResolver& costs, CostWarnings* warnings) {
  ExactDecimal total;
  for (const auto& ai : trace.instances) total += concretize(ai, trace.variant, costs, warnings, trace.id).cost;
  return total;
}

std::uint64_t occurrence_count(const std::string& activity, const ProcessInstance& trace) {
  return static_cast<std::uint64_t>(std::count_if(trace.instances.begin(), trace.instances.end(),
                                                  [&](const ActivityInstance& ai) { return ai.activity == activity; }));
}

std::uint64_t specific_count(const std::string& activity, const std::vector<std::string>& concrete_ids,
                             const ProcessInstance& trace, const CostResolver& costs) {
  std::uint64_t n = 0;
  for (const auto& ai : trace.instances)
    if (ai.activity == activity && concretize(ai, trace.variant, costs, nullptr, trace.id).ids == concrete_ids) ++n;
  return n;
}

ExactDecimal average_activity_cost(const std::string& activity, const EventLog& log, const CostResolver& costs) {
  // Group instances of the activity by concretization set; each distinct
  // set contributes specific_count * activity_instance_cost.
  std::map<std::vector<std::string>, std::pair<std::uint64_t, ExactDecimal>> by_set;
  std::uint64_t occurrences = 0;
  for (const auto& t : log.traces) {
    occurrences += occurrence_count(activity, t);
    for (const auto& ai : t.instances) {
      if (ai.activity != activity) continue;
      Concretization c = concretize(ai, t.variant, costs, nullptr, t.id);
      auto [it, inserted] = by_set.try_emplace(std::move(c.ids), 0, c.cost);
      ++it->second.first;
    }
  }
  if (occurrences == 0) throw CostingError("activity '" + activity + "' does not occur in the log");
  ExactDecimal weighted;
  for (const auto& [ids, entry] : by_set) weighted += entry.second * entry.first;
  return weighted / occurrences;
}

ExactDecimal average_process_instance_cost(const EventLog& log, const CostResolver& costs) {
  if (log.traces.empty()) throw CostingError("cannot average over an empty log");
  ExactDecimal total;
  for (const auto& t : log.traces) total += process_instance_cost(t, costs);
  return total / static_cast<std::uint64_t>(log.traces.size());
}

const ActivityCostRow* CostReport::find(const std::string& activity) const {
  for (const auto& r : per_activity)
    if (r.name == activity) return &r;
  return nullptr;
}

namespace {

struct PartialSums {
  std::map<std::string, std::pair<std::uint64_t, ExactDecimal>> activities;  // count, total cost
  std::map<std::string, std::pair<std::uint64_t, ExactDecimal>> variants;    // traces, total cost
  ExactDecimal total;
  CostWarnings warnings;
};

void accumulate(const EventLog& log, std::size_t begin, std::size_t end, const CostResolver& costs, PartialSums& out) {
  for (std::size_t i = begin; i < end; ++i) {
    const auto& t = log.traces[i];
    ExactDecimal trace_cost;
    for (const auto& ai : t.instances) {
      const ExactDecimal c = concretize(ai, t.variant, costs, &out.warnings, t.id).cost;
      auto& slot = out.activities[ai.activity];
      ++slot.first;
      slot.second += c;
      trace_cost += c;
    }
    auto& v = out.variants[t.variant.value_or("")];
    ++v.first;
    v.second += trace_cost;
    out.total += trace_cost;
  }
}

}  // namespace

CostReport analyze(const EventLog& log, const CostVariantConfig* config, const AnalyzeOptions& options) {
  if (log.traces.empty()) throw CostingError("cannot analyze an empty log");
  const CostResolver costs(config, options.mode);

  unsigned threads = options.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : options.threads;
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, log.traces.size()));
  std::vector<PartialSums> parts(std::max(1u, threads));
  const std::size_t n = log.traces.size();
  if (parts.size() == 1) {
    accumulate(log, 0, n, costs, parts[0]);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(parts.size());
    for (std::size_t p = 0; p < parts.size(); ++p)
      pool.emplace_back([&, p] {
        try {
          accumulate(log, n * p / parts.size(), n * (p + 1) / parts.size(), costs, parts[p]);
        } catch (...) {
          errors[p] = std::current_exception();
        }
      });
    for (auto& t : pool) t.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  // Sums are exact, so merge order does not matter.
  PartialSums merged = std::move(parts[0]);
  for (std::size_t p = 1; p < parts.size(); ++p) {
    for (auto& [k, v] : parts[p].activities) {
      auto& slot = merged.activities[k];
      slot.first += v.first;
      slot.second += v.second;
    }
    for (auto& [k, v] : parts[p].variants) {
      auto& slot = merged.variants[k];
      slot.first += v.first;
      slot.second += v.second;
    }
    merged.total += parts[p].total;
    merged.warnings.unresolved += parts[p].warnings.unresolved;
    for (auto& m : parts[p].warnings.messages)
      if (merged.warnings.messages.size() < 100) merged.warnings.messages.push_back(std::move(m));
  }

  CostReport report;
  report.scenario = options.scenario;
  for (const auto& [name, slot] : merged.activities)
    report.per_activity.push_back({name, slot.second / slot.first, slot.first});
  report.trace_count = n;
  report.average_process_instance_cost = merged.total / static_cast<std::uint64_t>(n);
  for (const auto& [id, slot] : merged.variants) report.variants.push_back({id, slot.first, slot.second / slot.first});
  report.warning_count = merged.warnings.unresolved;
  report.warnings = std::move(merged.warnings.messages);
  return report;
}

}  // namespace sopa
