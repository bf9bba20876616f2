#include "support.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <stdexcept>

#include <unistd.h>

namespace testsupport {

using namespace sopa;

std::string fixture_path(const std::string& relative) { return std::string(SOPA_FIXTURES_DIR) + "/" + relative; }

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string temp_dir() {
  static const std::string dir = [] {
    auto base = std::filesystem::temp_directory_path() / ("sopa-tests-" + std::to_string(::getpid()));
    std::filesystem::create_directories(base);
    return base.string();
  }();
  return dir;
}

namespace {

const std::vector<std::string> kNames = {"Check <contents> & \"assess\"", "Sift 'n' select", "Prüfung der Unterlagen",
                                         "a\tb", "Interview", "x", "Finalize contract (HR)", "  padded  "};

ExactDecimal random_cost(std::mt19937_64& rng) {
  std::uniform_int_distribution<std::uint64_t> mant(0, 99999);
  std::uniform_int_distribution<int> exp(3, 9);
  return ExactDecimal::parse(std::to_string(mant(rng)) + "e-" + std::to_string(exp(rng)));
}

}  // namespace

EventLog random_log(std::mt19937_64& rng, std::size_t max_traces) {
  std::uniform_int_distribution<std::size_t> ntraces(1, max_traces);
  std::uniform_int_distribution<std::size_t> nevents(1, 8);
  std::uniform_int_distribution<std::size_t> pick(0, kNames.size() - 1);
  std::uniform_int_distribution<int> coin(0, 3);
  std::uniform_int_distribution<std::int64_t> epoch(0, 4'000'000'000LL);
  std::uniform_int_distribution<int> offset(-12 * 4, 14 * 4);
  EventLog log;
  const std::size_t n = ntraces(rng);
  for (std::size_t t = 0; t < n; ++t) {
    ProcessInstance trace;
    trace.id = "case " + std::to_string(t) + (coin(rng) == 0 ? " & <co>" : "");
    if (coin(rng) != 0) trace.variant = kNames[pick(rng)];
    Timestamp clock{epoch(rng), offset(rng) * 15};
    const std::size_t m = nevents(rng);
    for (std::size_t i = 0; i < m; ++i) {
      ActivityInstance ai;
      ai.activity = kNames[pick(rng)];
      ai.sequence = i;
      ai.start = clock;
      clock = clock.plus_seconds(coin(rng) * 100);
      ai.complete = clock;
      const int drivers = coin(rng);
      for (int d = 0; d < drivers; ++d) {
        DriverRef ref{kNames[pick(rng)], std::nullopt};
        if (coin(rng) == 0) ref.inline_cost = random_cost(rng);
        ai.add_driver(std::move(ref));
      }
      trace.instances.push_back(std::move(ai));
    }
    log.traces.push_back(std::move(trace));
  }
  return log;
}

CostVariantConfig random_config(std::mt19937_64& rng, const std::vector<std::string>& drivers, std::size_t variants) {
  CostVariantConfig config;
  config.count = 100;
  std::uniform_int_distribution<std::uint64_t> w(1, 9);
  std::vector<std::uint64_t> weights;
  std::uint64_t total = 0;
  for (std::size_t v = 0; v < variants; ++v) total += weights.emplace_back(w(rng));
  for (std::size_t v = 0; v < variants; ++v) {
    CostVariant variant;
    variant.id = "variant " + std::to_string(v);
    variant.frequency = ExactDecimal::ratio(weights[v], total);
    for (const auto& d : drivers) variant.driver_costs.emplace_back(d, random_cost(rng));
    config.variants.push_back(std::move(variant));
  }
  return config;
}

EventLog random_costed_log(std::mt19937_64& rng, const CostVariantConfig& config, const std::vector<std::string>& activities,
                           std::size_t traces) {
  std::uniform_int_distribution<std::size_t> nevents(1, 10);
  std::uniform_int_distribution<std::size_t> pick_activity(0, activities.size() - 1);
  std::uniform_int_distribution<std::size_t> pick_variant(0, config.variants.size() - 1);
  std::uniform_int_distribution<int> coin(0, 2);
  EventLog log;
  for (std::size_t t = 0; t < traces; ++t) {
    ProcessInstance trace;
    trace.id = std::to_string(t);
    const CostVariant& v = config.variants[pick_variant(rng)];
    trace.variant = v.id;
    const std::size_t m = nevents(rng);
    Timestamp clock{1'800'000'000, 120};
    for (std::size_t i = 0; i < m; ++i) {
      ActivityInstance ai;
      ai.activity = activities[pick_activity(rng)];
      ai.sequence = i;
      ai.start = clock;
      ai.complete = clock.plus_seconds(1);
      clock = clock.plus_seconds(2);
      for (const auto& [driver, cost] : v.driver_costs)
        if (coin(rng) == 0) ai.add_driver({driver, std::nullopt});
      trace.instances.push_back(std::move(ai));
    }
    log.traces.push_back(std::move(trace));
  }
  return log;
}

namespace {

struct Builder {
  std::mt19937_64& rng;
  ProcessModel model;
  std::size_t budget;
  std::size_t next_id = 0;
  std::size_t next_flow = 0;

  std::string fresh(const char* prefix) { return std::string(prefix) + std::to_string(next_id++); }

  std::size_t add(NodeKind kind, const std::string& name = {}) {
    Node n;
    n.kind = kind;
    n.id = fresh(kind == NodeKind::Task ? "t" : kind == NodeKind::End ? "e" : "g");
    n.name = name;
    if (kind == NodeKind::Task) {
      if (name == "A" || name == "B") n.drivers.push_back("mail");
      if (name == "B" || name == "C") n.drivers.push_back("paper");
    }
    if (budget > 0) --budget;
    return model.add_node(std::move(n));
  }
  void connect(std::size_t from, std::size_t to, std::optional<ExactDecimal> p = std::nullopt) {
    model.add_flow("f" + std::to_string(next_flow++), model.nodes()[from].id, model.nodes()[to].id, p);
  }

  std::string task_name() {
    static const char* names[] = {"A", "B", "C", "D"};
    std::uniform_int_distribution<int> d(0, 3);
    return names[d(rng)];
  }

  // Emits a block; returns (entry, exit). exit may be npos when every
  // path of the block ends in an end event.
  std::pair<std::size_t, std::size_t> block(int depth) {
    std::uniform_int_distribution<int> kind(0, 5);
    const int k = (depth > 3 || budget < 4) ? 0 : kind(rng);
    if (k <= 1) {
      const auto t = add(NodeKind::Task, task_name());
      return {t, t};
    }
    if (k == 2) {
      auto [a_in, a_out] = block(depth + 1);
      auto [b_in, b_out] = block(depth + 1);
      connect(a_out, b_in);
      return {a_in, b_out};
    }
    const bool exclusive = k != 5;
    const auto split = add(exclusive ? NodeKind::ExclusiveGateway : NodeKind::ParallelGateway);
    const auto join = add(exclusive ? NodeKind::ExclusiveGateway : NodeKind::ParallelGateway);
    std::uniform_int_distribution<int> nbranch(2, 3);
    const int branches = nbranch(rng);
    std::vector<std::uint64_t> weights;
    std::uint64_t total = 0;
    std::uniform_int_distribution<std::uint64_t> w(0, 4);
    for (int b = 0; b < branches; ++b) total += weights.emplace_back(w(rng));
    if (total == 0) total = weights[0] = 1;
    bool early_end_used = false;
    int joined = 0;
    for (int b = 0; b < branches; ++b) {
      std::optional<ExactDecimal> p;
      if (exclusive) p = ExactDecimal::ratio(weights[b], total);
      std::uniform_int_distribution<int> early(0, 3);
      if (exclusive && !early_end_used && b > 0 && budget > 0 && early(rng) == 0) {
        early_end_used = true;
        const auto e = add(NodeKind::End);
        connect(split, e, p);
        continue;
      }
      auto [in, out] = block(depth + 1);
      connect(split, in, p);
      connect(out, join);
      ++joined;
    }
    if (joined == 1) {
      // A one-input exclusive join is still a valid pass-through.
    }
    return {split, join};
  }
};

}  // namespace

ProcessModel random_acyclic_model(std::mt19937_64& rng, std::size_t max_nodes) {
  for (;;) {
    Builder b{rng, {}, max_nodes > 4 ? max_nodes - 4 : 1};
    const auto start = b.add(NodeKind::Start);
    const auto first = b.add(NodeKind::Task, "A");
    auto [in, out] = b.block(0);
    const auto end = b.add(NodeKind::End);
    b.connect(start, first);
    b.connect(first, in);
    b.connect(out, end);
    if (b.model.nodes().size() > max_nodes) continue;
    if (!b.model.finalize().empty()) continue;
    return std::move(b.model);
  }
}

std::map<std::string, ExactDecimal> enumerate_executions(const ProcessModel& model) {
  std::map<std::string, ExactDecimal> result;
  for (auto t : model.tasks()) result[model.nodes()[t].name];
  using Marking = std::map<std::size_t, int>;  // flow -> tokens

  std::function<void(Marking, mpq_class, std::size_t)> explore = [&](Marking m, mpq_class weight, std::size_t fired) {
    if (fired > 10'000) throw std::runtime_error("enumeration did not terminate");
    // Fire the lowest-index enabled node.
    for (std::size_t n = 0; n < model.nodes().size(); ++n) {
      const Node& node = model.nodes()[n];
      if (node.kind == NodeKind::Start) continue;
      const bool and_join = node.kind == NodeKind::ParallelGateway && node.incoming.size() > 1;
      std::vector<std::size_t> consume;
      if (and_join) {
        bool all = true;
        for (auto f : node.incoming) all = all && m[f] > 0;
        if (!all) continue;
        consume = node.incoming;
      } else {
        for (auto f : node.incoming)
          if (m[f] > 0) {
            consume = {f};
            break;
          }
        if (consume.empty()) continue;
      }
      for (auto f : consume) --m[f];
      if (node.kind == NodeKind::Task) result[node.name] = ExactDecimal::from_rational(result[node.name].rational() + weight);
      if (node.kind == NodeKind::ExclusiveGateway && node.outgoing.size() > 1) {
        for (auto f : node.outgoing) {
          const mpq_class p = model.flows()[f].probability->rational();
          if (sgn(p) == 0) continue;
          Marking next = m;
          ++next[f];
          explore(next, weight * p, fired + 1);
        }
        return;
      }
      for (auto f : node.outgoing) ++m[f];
      explore(m, weight, fired + 1);
      return;
    }
  };
  Marking initial;
  initial[model.nodes()[model.start()].outgoing.front()] = 1;
  explore(initial, mpq_class(1), 0);
  return result;
}

}  // namespace testsupport
