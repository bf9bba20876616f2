#include "sopa/oracle.hpp"

#include <algorithm>

#include "sopa/error.hpp"

namespace sopa {

std::vector<ExactDecimal> expected_node_visits(const ProcessModel& model) {
  if (!model.structural_diagnostics().empty())
    throw ValidationError("model is not well-formed: " + model.structural_diagnostics().front().message);
  const auto& nodes = model.nodes();
  const auto& flows = model.flows();
  const std::size_t n = nodes.size();

  // Rows of (I - W) x = b, dense; models are small.
  std::vector<std::vector<mpq_class>> a(n, std::vector<mpq_class>(n + 1));
  for (std::size_t i = 0; i < n; ++i) {
    a[i][i] = 1;
    if (i == model.start()) a[i][n] = 1;
    const bool join = model.is_parallel_join(i);
    const mpq_class scale = join ? mpq_class(1, static_cast<unsigned long>(nodes[i].incoming.size())) : mpq_class(1);
    for (auto f : nodes[i].incoming) {
      const std::size_t src = flows[f].source;
      mpq_class w = model.is_exclusive_split(src) ? flows[f].probability->rational() : mpq_class(1);
      a[i][src] -= w * scale;
    }
  }

  // Gauss-Jordan elimination over the rationals.
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    while (pivot < n && sgn(a[pivot][col]) == 0) ++pivot;
    if (pivot == n)
      throw ValidationError("flow equations are singular: a loop through '" +
                            (nodes[col].name.empty() ? nodes[col].id : nodes[col].name) + "' cannot terminate");
    std::swap(a[pivot], a[col]);
    const mpq_class inv = 1 / a[col][col];
    for (std::size_t k = col; k <= n; ++k) a[col][k] *= inv;
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || sgn(a[r][col]) == 0) continue;
      const mpq_class factor = a[r][col];
      for (std::size_t k = col; k <= n; ++k) a[r][k] -= factor * a[col][k];
    }
  }
  std::vector<ExactDecimal> visits;
  visits.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (sgn(a[i][n]) < 0)
      throw ValidationError("flow equations have no non-negative solution at '" + nodes[i].id + "'");
    visits.push_back(ExactDecimal::from_rational(a[i][n]));
  }
  return visits;
}

std::map<std::string, ExactDecimal> expected_activity_executions(const ProcessModel& model) {
  const auto visits = expected_node_visits(model);
  std::map<std::string, ExactDecimal> out;
  for (auto t : model.tasks()) out[model.nodes()[t].name] += visits[t];
  return out;
}

Expectation expect(const ProcessModel& model, const CostVariantConfig& config) {
  if (config.variants.empty()) throw CostingError("cost variant config declares no variants");
  const auto executions = expected_activity_executions(model);
  Expectation e;
  for (const auto& [name, count] : executions) {
    // Tasks sharing a label carry the same drivers; take the first.
    const auto tasks = model.tasks();
    const auto it = std::find_if(tasks.begin(), tasks.end(), [&](std::size_t t) { return model.nodes()[t].name == name; });
    const Node& task = model.nodes()[*it];
    ExactDecimal per_execution;
    for (const auto& v : config.variants) {
      ExactDecimal c;
      for (const auto& d : task.drivers) c += cost_function(config, v.id, d);
      per_execution += v.frequency * c;
    }
    e.per_activity.push_back({name, count, per_execution});
    e.average_process_instance_cost += count * per_execution;
  }
  return e;
}

ExactDecimal expected_process_cost(const ProcessModel& model, const CostVariantConfig& config) {
  return expect(model, config).average_process_instance_cost;
}

}  // namespace sopa
