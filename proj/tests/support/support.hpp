#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "sopa/bpmn.hpp"
#include "sopa/core.hpp"
#include "sopa/decimal.hpp"
#include "sopa/variant_config.hpp"

namespace testsupport {

std::string fixture_path(const std::string& relative);
std::string read_text(const std::string& path);
std::string temp_dir();

// Random log with unique trace ids, awkward names (markup characters,
// tabs, non-ASCII), optional variants, inline costs and timezone offsets.
sopa::EventLog random_log(std::mt19937_64& rng, std::size_t max_traces = 12);

// Log whose drivers all resolve through `config` (every trace carries a
// variant from it).
sopa::EventLog random_costed_log(std::mt19937_64& rng, const sopa::CostVariantConfig& config,
                                 const std::vector<std::string>& activities, std::size_t traces);

sopa::CostVariantConfig random_config(std::mt19937_64& rng, const std::vector<std::string>& drivers,
                                      std::size_t variants);

// Random acyclic block-structured model with at most `max_nodes` nodes,
// built from sequences, exclusive and parallel blocks; exclusive branches
// sometimes end early in their own end event.
sopa::ProcessModel random_acyclic_model(std::mt19937_64& rng, std::size_t max_nodes);

// Expected executions per activity label by exhaustive enumeration of
// every run of the token game (acyclic models only).
std::map<std::string, sopa::ExactDecimal> enumerate_executions(const sopa::ProcessModel& model);

}  // namespace testsupport
