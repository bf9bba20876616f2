#include "sopa/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>

#include "sopa/error.hpp"

namespace sopa {

InstanceRng::InstanceRng(std::uint64_t seed, std::uint64_t trace_index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(trace_index), static_cast<std::uint32_t>(trace_index >> 32)};
  engine_.seed(seq);
}

InstanceRng derive_instance_rng(std::uint64_t seed, std::uint64_t trace_index) { return InstanceRng(seed, trace_index); }

std::uint64_t probability_threshold(const ExactDecimal& p) {
  mpz_class scaled = p.rational().get_num() * (mpz_class(1) << 53);
  mpz_class q;
  mpz_cdiv_q(q.get_mpz_t(), scaled.get_mpz_t(), p.rational().get_den_mpz_t());
  if (q > mpz_class(std::to_string(InstanceRng::kResolution), 10)) return InstanceRng::kResolution;
  return std::stoull(q.get_str());
}

std::vector<std::uint64_t> exact_quotas(const CostVariantConfig& config, std::uint64_t instances) {
  const mpz_class n(std::to_string(instances), 10);
  std::vector<std::uint64_t> quota(config.variants.size());
  std::vector<mpq_class> remainder(config.variants.size());
  std::uint64_t assigned = 0;
  for (std::size_t i = 0; i < config.variants.size(); ++i) {
    const mpq_class exact = config.variants[i].frequency.rational() * n;
    mpz_class fl;
    mpz_fdiv_q(fl.get_mpz_t(), exact.get_num_mpz_t(), exact.get_den_mpz_t());
    quota[i] = std::stoull(fl.get_str());
    remainder[i] = exact - fl;
    assigned += quota[i];
  }
  std::vector<std::size_t> order(config.variants.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (std::size_t k = 0; assigned < instances && !order.empty(); k = (k + 1) % order.size()) {
    ++quota[order[k]];
    ++assigned;
  }
  return quota;
}

unsigned threads_from_env() {
  if (const char* v = std::getenv("SOPA_THREADS")) {
    char* end = nullptr;
    const unsigned long n = std::strtoul(v, &end, 10);
    if (end != v && *end == '\0' && n > 0) return static_cast<unsigned>(n);
  }
  return 0;
}

namespace {

// Precomputed routing tables shared read-only by all workers.
struct Plan {
  const ProcessModel* model = nullptr;
  std::vector<std::vector<std::uint64_t>> thresholds;  // per node, cumulative, exclusive splits only
  std::vector<std::uint64_t> variant_thresholds;
  std::vector<std::size_t> quota_variant;  // exact-quota: variant per trace block boundary
  std::vector<std::uint64_t> quota_end;
};

class TraceRun {
 public:
  TraceRun(const Plan& plan, const SimulationSettings& settings, std::uint64_t index)
      : plan_(plan), model_(*plan.model), settings_(settings), index_(index), rng_(settings.seed, index),
        visits_(model_.nodes().size(), 0), clock_(settings.base_timestamp) {}

  ProcessInstance run(const CostVariantConfig& config) {
    ProcessInstance trace;
    trace.id = std::to_string(index_);
    const std::uint64_t variant_draw = rng_.next();
    std::size_t v = 0;
    if (settings_.variant_mode == VariantMode::Sampled) {
      while (v + 1 < plan_.variant_thresholds.size() && variant_draw >= plan_.variant_thresholds[v]) ++v;
    } else {
      while (v + 1 < plan_.quota_end.size() && index_ >= plan_.quota_end[v]) ++v;
    }
    trace.variant = config.variants[v].id;
    walk(model_.start(), std::nullopt);
    if (instances_.empty())
      throw SimulationError("trace " + std::to_string(index_) + " reached an end event without executing any task");
    trace.instances = std::move(instances_);
    return trace;
  }

 private:
  std::size_t next_of(std::size_t node) const { return model_.flows()[model_.nodes()[node].outgoing.front()].target; }

  void visit(std::size_t node) {
    if (++visits_[node] > settings_.max_iterations) {
      const Node& n = model_.nodes()[node];
      throw SimulationError("trace " + std::to_string(index_) + " exceeded " + std::to_string(settings_.max_iterations) +
                            " iterations in the loop through " + std::string(to_string(n.kind)) + " '" +
                            (n.name.empty() ? n.id : n.name) + "'");
    }
  }

  void emit(const Node& task) {
    ActivityInstance ai;
    ai.activity = task.name;
    for (const auto& d : task.drivers) ai.add_driver(DriverRef{d, std::nullopt});
    ai.start = clock_;
    ai.complete = clock_.plus_seconds(1);
    clock_ = clock_.plus_seconds(2);
    ai.sequence = instances_.size();
    instances_.push_back(std::move(ai));
  }

  // Executes from `node` until an end event or, inside a parallel branch,
  // until the token arrives at `join`. Returns the node where it stopped.
  std::size_t walk(std::size_t node, std::optional<std::size_t> join) {
    for (;;) {
      const Node& n = model_.nodes()[node];
      if (join && node == *join) return node;
      visit(node);
      switch (n.kind) {
        case NodeKind::End:
          if (join) throw SimulationError("trace " + std::to_string(index_) + " reached end event '" + n.id + "' inside a parallel block");
          return node;
        case NodeKind::Start:
          node = next_of(node);
          break;
        case NodeKind::Task:
          emit(n);
          node = next_of(node);
          break;
        case NodeKind::ExclusiveGateway:
          if (model_.is_exclusive_split(node)) {
            const std::uint64_t u = rng_.next();
            const auto& th = plan_.thresholds[node];
            std::size_t k = 0;
            while (k + 1 < th.size() && u >= th[k]) ++k;
            node = model_.flows()[n.outgoing[k]].target;
          } else {
            node = next_of(node);
          }
          break;
        case NodeKind::ParallelGateway:
          if (model_.is_parallel_split(node)) {
            const std::size_t matching = model_.matching_join(node);
            for (auto f : n.outgoing) walk(model_.flows()[f].target, matching);
            visit(matching);
            node = next_of(matching);
          } else if (model_.is_parallel_join(node)) {
            throw SimulationError("trace " + std::to_string(index_) + " reached parallel join '" + n.id + "' outside its block");
          } else {
            node = next_of(node);
          }
          break;
      }
    }
  }

  const Plan& plan_;
  const ProcessModel& model_;
  const SimulationSettings& settings_;
  std::uint64_t index_;
  InstanceRng rng_;
  std::vector<std::uint64_t> visits_;
  Timestamp clock_;
  std::vector<ActivityInstance> instances_;
};

}  // namespace

EventLog simulate(const ProcessModel& model, const CostVariantConfig& config, const SimulationSettings& settings) {
  if (config.variants.empty()) throw SimulationError("cost variant config declares no variants");
  if (settings.instances == 0) throw SimulationError("instances must be at least 1");
  if (settings.max_iterations == 0) throw SimulationError("max_iterations must be at least 1");
  if (const auto diags = validate(model, config); !diags.empty())
    throw ValidationError("model is not simulatable: " + diags.front().message +
                          (diags.size() > 1 ? " (and " + std::to_string(diags.size() - 1) + " more)" : ""));

  Plan plan;
  plan.model = &model;
  plan.thresholds.resize(model.nodes().size());
  for (std::size_t i = 0; i < model.nodes().size(); ++i) {
    if (!model.is_exclusive_split(i)) continue;
    ExactDecimal cumulative;
    for (auto f : model.nodes()[i].outgoing) {
      cumulative += *model.flows()[f].probability;
      plan.thresholds[i].push_back(probability_threshold(cumulative));
    }
  }
  ExactDecimal cumulative;
  for (const auto& v : config.variants) {
    cumulative += v.frequency;
    plan.variant_thresholds.push_back(probability_threshold(cumulative));
  }
  if (settings.variant_mode == VariantMode::ExactQuota) {
    std::uint64_t end = 0;
    for (auto q : exact_quotas(config, settings.instances)) {
      end += q;
      plan.quota_end.push_back(end);
    }
  }

  std::vector<ProcessInstance> traces(settings.instances);
  unsigned threads = settings.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : settings.threads;
  threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, settings.instances));

  std::atomic<std::uint64_t> next{0};
  std::mutex error_mutex;
  std::optional<std::uint64_t> error_index;
  std::exception_ptr error;
  auto worker = [&] {
    for (;;) {
      const std::uint64_t i = next.fetch_add(1);
      if (i >= settings.instances) return;
      try {
        traces[i] = TraceRun(plan, settings, i).run(config);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error_index || i < *error_index) {
          error_index = i;
          error = std::current_exception();
        }
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);

  EventLog log;
  log.traces = std::move(traces);
  return log;
}

}  // namespace sopa
