#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "sopa/bpmn.hpp"
#include "sopa/core.hpp"
#include "sopa/variant_config.hpp"

namespace sopa {

enum class VariantMode { Sampled, ExactQuota };

struct SimulationSettings {
  std::uint64_t instances = 1;
  std::uint64_t seed = 42;
  VariantMode variant_mode = VariantMode::Sampled;
  std::uint64_t max_iterations = 10'000;  // visits of any single node per trace
  Timestamp base_timestamp = Timestamp::parse("2026-07-17T15:35:28+02:00");
  unsigned threads = 1;  // 0 = hardware concurrency
};

// Independent random stream for one trace; a pure function of
// (seed, trace_index).
class InstanceRng {
 public:
  static constexpr std::uint64_t kResolution = std::uint64_t{1} << 53;

  InstanceRng(std::uint64_t seed, std::uint64_t trace_index);
  // Uniform integer in [0, 2^53).
  std::uint64_t next() { return engine_() >> 11; }
  // Uniform double in [0, 1).
  double uniform() { return static_cast<double>(next()) / static_cast<double>(kResolution); }

 private:
  std::mt19937_64 engine_;
};

InstanceRng derive_instance_rng(std::uint64_t seed, std::uint64_t trace_index);

// ceil(p * 2^53): a draw u from InstanceRng::next() satisfies u < threshold
// exactly when u / 2^53 < p.
std::uint64_t probability_threshold(const ExactDecimal& p);

// Largest-remainder allocation of `instances` over the variant frequencies
// (ties broken by config order).
std::vector<std::uint64_t> exact_quotas(const CostVariantConfig& config, std::uint64_t instances);

// Reads SOPA_THREADS (0 or unset = hardware concurrency).
unsigned threads_from_env();

// Token-game simulation. Throws ValidationError when validate() reports
// diagnostics and SimulationError when a trace exceeds max_iterations.
// Output is independent of settings.threads.
EventLog simulate(const ProcessModel& model, const CostVariantConfig& config, const SimulationSettings& settings);

}  // namespace sopa
