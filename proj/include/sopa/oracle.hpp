#pragma once

#include <map>
#include <string>
#include <vector>

#include "sopa/bpmn.hpp"
#include "sopa/decimal.hpp"
#include "sopa/variant_config.hpp"

namespace sopa {

// Expected number of visits of every node per process instance, from the
// flow equations of the model (exclusive splits scale by probability,
// parallel splits copy, parallel joins synchronize). Throws ValidationError
// when the system is singular, i.e. some loop cannot terminate.
std::vector<ExactDecimal> expected_node_visits(const ProcessModel& model);

// Expected executions per instance, summed over tasks sharing an activity
// label.
std::map<std::string, ExactDecimal> expected_activity_executions(const ProcessModel& model);

struct ExpectedActivity {
  std::string name;
  ExactDecimal expected_executions;  // per process instance
  ExactDecimal average_cost;         // expected cost per execution
};

struct Expectation {
  std::vector<ExpectedActivity> per_activity;  // sorted by name
  ExactDecimal average_process_instance_cost;
};

// Sum over variants of frequency * sum over tasks of expected executions *
// the task's driver costs under that variant. Throws CostingError when a
// variant does not concretize an annotated driver.
ExactDecimal expected_process_cost(const ProcessModel& model, const CostVariantConfig& config);

Expectation expect(const ProcessModel& model, const CostVariantConfig& config);

}  // namespace sopa
