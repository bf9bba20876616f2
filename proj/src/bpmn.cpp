#include "sopa/bpmn.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include "sopa/error.hpp"
#include "sopa/xml.hpp"

namespace sopa {

std::string_view to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::Start: return "startEvent";
    case NodeKind::End: return "endEvent";
    case NodeKind::Task: return "task";
    case NodeKind::ExclusiveGateway: return "exclusiveGateway";
    case NodeKind::ParallelGateway: return "parallelGateway";
  }
  return "?";
}

std::string_view to_string(EndOutcome outcome) {
  switch (outcome) {
    case EndOutcome::Completed: return "completed";
    case EndOutcome::Failed: return "failed";
    case EndOutcome::Cancelled: return "cancelled";
  }
  return "?";
}

std::size_t ProcessModel::add_node(Node node) {
  if (node.id.empty()) throw ValidationError("node id must not be empty", {{}, node.line, std::string(to_string(node.kind))});
  if (node_index_.count(node.id) || flow_index_.count(node.id))
    throw ValidationError("duplicate element id '" + node.id + "'", {{}, node.line, std::string(to_string(node.kind))});
  if (node.kind == NodeKind::Task && node.name.empty())
    throw ValidationError("task '" + node.id + "' has no name", {{}, node.line, "task"});
  node.incoming.clear();
  node.outgoing.clear();
  const std::size_t index = nodes_.size();
  node_index_.emplace(node.id, index);
  nodes_.push_back(std::move(node));
  finalized_ = false;
  return index;
}

std::size_t ProcessModel::add_flow(const std::string& id, const std::string& source_id, const std::string& target_id,
                                   std::optional<ExactDecimal> probability) {
  if (id.empty()) throw ValidationError("sequence flow id must not be empty");
  if (node_index_.count(id) || flow_index_.count(id)) throw ValidationError("duplicate element id '" + id + "'");
  auto s = find_node(source_id);
  auto t = find_node(target_id);
  if (!s) throw ValidationError("sequence flow '" + id + "' references unknown source '" + source_id + "'");
  if (!t) throw ValidationError("sequence flow '" + id + "' references unknown target '" + target_id + "'");
  const std::size_t index = flows_.size();
  flows_.push_back(Flow{id, *s, *t, std::move(probability), 0});
  flow_index_.emplace(id, index);
  nodes_[*s].outgoing.push_back(index);
  nodes_[*t].incoming.push_back(index);
  finalized_ = false;
  return index;
}

std::optional<std::size_t> ProcessModel::find_node(std::string_view id) const {
  auto it = node_index_.find(id);
  if (it == node_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> ProcessModel::find_flow(std::string_view id) const {
  auto it = flow_index_.find(id);
  if (it == flow_index_.end()) return std::nullopt;
  return it->second;
}

bool ProcessModel::is_exclusive_split(std::size_t n) const {
  return nodes_[n].kind == NodeKind::ExclusiveGateway && nodes_[n].outgoing.size() > 1;
}

bool ProcessModel::is_parallel_split(std::size_t n) const {
  return nodes_[n].kind == NodeKind::ParallelGateway && nodes_[n].outgoing.size() > 1;
}

bool ProcessModel::is_parallel_join(std::size_t n) const {
  return nodes_[n].kind == NodeKind::ParallelGateway && nodes_[n].incoming.size() > 1;
}

std::vector<std::size_t> ProcessModel::tasks() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < nodes_.size(); ++i)
    if (nodes_[i].kind == NodeKind::Task) out.push_back(i);
  return out;
}

std::vector<std::string> ProcessModel::annotated_drivers() const {
  std::set<std::string> all;
  for (const auto& n : nodes_)
    for (const auto& d : n.drivers) all.insert(d);
  return {all.begin(), all.end()};
}

std::vector<Diagnostic> ProcessModel::finalize() {
  std::vector<Diagnostic> diags;
  auto report = [&](std::string code, std::string msg) { diags.push_back({std::move(code), std::move(msg)}); };
  matching_join_.clear();

  std::vector<std::size_t> starts;
  std::size_t ends = 0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const Node& n = nodes_[i];
    switch (n.kind) {
      case NodeKind::Start:
        starts.push_back(i);
        if (!n.incoming.empty()) report("start-incoming", "start event '" + n.id + "' has incoming flows");
        if (n.outgoing.size() != 1) report("start-outgoing", "start event '" + n.id + "' must have exactly one outgoing flow");
        break;
      case NodeKind::End:
        ++ends;
        if (!n.outgoing.empty()) report("end-outgoing", "end event '" + n.id + "' has outgoing flows");
        if (n.incoming.empty()) report("end-incoming", "end event '" + n.id + "' has no incoming flow");
        break;
      case NodeKind::Task:
        if (n.incoming.empty()) report("task-incoming", "task '" + n.name + "' has no incoming flow");
        if (n.outgoing.size() != 1) report("task-outgoing", "task '" + n.name + "' must have exactly one outgoing flow");
        break;
      case NodeKind::ExclusiveGateway:
      case NodeKind::ParallelGateway:
        if (n.incoming.empty() || n.outgoing.empty())
          report("gateway-dangling", "gateway '" + n.id + "' needs incoming and outgoing flows");
        if (n.incoming.size() > 1 && n.outgoing.size() > 1)
          report("gateway-mixed", "gateway '" + n.id + "' both splits and joins; use two gateways");
        break;
    }
  }
  if (starts.size() != 1)
    report(starts.empty() ? "missing-start" : "duplicate-start",
           "model must have exactly one start event, found " + std::to_string(starts.size()));
  if (ends == 0) report("missing-end", "model has no end event");
  if (!starts.empty()) start_ = starts.front();

  // Probabilities: only on exclusive-split flows, all present, summing to 1.
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const Node& n = nodes_[i];
    if (is_exclusive_split(i)) {
      ExactDecimal sum;
      bool complete = true;
      for (auto f : n.outgoing) {
        if (!flows_[f].probability) {
          complete = false;
          report("missing-probability", "flow '" + flows_[f].id + "' leaving exclusive gateway '" + n.id + "' has no probability");
        } else {
          if (*flows_[f].probability > ExactDecimal(1))
            report("probability-range", "flow '" + flows_[f].id + "' probability exceeds 1");
          sum += *flows_[f].probability;
        }
      }
      if (complete && sum != ExactDecimal(1))
        report("probability-sum", "probabilities leaving exclusive gateway '" + n.id + "' sum to " + sum.to_string() + ", expected 1");
    } else {
      for (auto f : n.outgoing)
        if (flows_[f].probability)
          report("probability-on-non-exclusive", "flow '" + flows_[f].id + "' carries a probability but does not leave an exclusive split");
    }
  }

  // Reachability from the start event.
  if (starts.size() == 1) {
    std::vector<bool> seen(nodes_.size(), false);
    std::vector<std::size_t> stack{start_};
    seen[start_] = true;
    while (!stack.empty()) {
      const auto n = stack.back();
      stack.pop_back();
      for (auto f : nodes_[n].outgoing)
        if (!seen[flows_[f].target]) {
          seen[flows_[f].target] = true;
          stack.push_back(flows_[f].target);
        }
    }
    for (std::size_t i = 0; i < nodes_.size(); ++i)
      if (!seen[i]) report("unreachable", std::string(to_string(nodes_[i].kind)) + " '" + nodes_[i].id + "' is not reachable from the start event");
  }

  // Parallel blocks: every split has one matching join that all branches
  // reach, no end event inside, and nothing enters the block from outside.
  std::map<std::size_t, int> state;  // 1 = in progress, 2 = done
  std::function<std::optional<std::size_t>(std::size_t)> resolve = [&](std::size_t split) -> std::optional<std::size_t> {
    if (auto it = matching_join_.find(split); it != matching_join_.end()) return it->second;
    if (state[split] == 1) {
      report("unstructured-parallel", "parallel gateway '" + nodes_[split].id + "' is re-entered before its join");
      return std::nullopt;
    }
    state[split] = 1;
    std::set<std::size_t> joins;
    std::set<std::size_t> inside;
    std::vector<std::size_t> stack;
    bool ok = true;
    for (auto f : nodes_[split].outgoing) stack.push_back(flows_[f].target);
    while (!stack.empty() && ok) {
      const auto n = stack.back();
      stack.pop_back();
      if (is_parallel_join(n)) {
        joins.insert(n);
        continue;
      }
      if (!inside.insert(n).second) continue;
      if (nodes_[n].kind == NodeKind::End) {
        report("unstructured-parallel", "end event '" + nodes_[n].id + "' is reachable inside the parallel block of '" + nodes_[split].id + "'");
        ok = false;
        break;
      }
      if (is_parallel_split(n)) {
        auto inner = resolve(n);
        if (!inner) {
          ok = false;
          break;
        }
        inside.insert(*inner);
        for (auto f : nodes_[*inner].outgoing) stack.push_back(flows_[f].target);
        continue;
      }
      if (n == split) {
        report("unstructured-parallel", "parallel gateway '" + nodes_[split].id + "' loops back to itself");
        ok = false;
        break;
      }
      for (auto f : nodes_[n].outgoing) stack.push_back(flows_[f].target);
    }
    state[split] = 2;
    if (!ok) return std::nullopt;
    if (joins.size() != 1) {
      report("unstructured-parallel", "branches of parallel gateway '" + nodes_[split].id + "' do not meet in a single join");
      return std::nullopt;
    }
    const auto join = *joins.begin();
    if (nodes_[join].incoming.size() != nodes_[split].outgoing.size())
      report("unstructured-parallel", "parallel join '" + nodes_[join].id + "' has " + std::to_string(nodes_[join].incoming.size()) +
                                          " incoming flows but split '" + nodes_[split].id + "' has " +
                                          std::to_string(nodes_[split].outgoing.size()) + " branches");
    for (auto n : inside)
      for (auto f : nodes_[n].incoming) {
        const auto src = flows_[f].source;
        if (src != split && !inside.count(src) && !(is_parallel_join(n) && n == join))
          report("unstructured-parallel", "flow '" + flows_[f].id + "' enters the parallel block of '" + nodes_[split].id + "' from outside");
      }
    for (auto f : nodes_[join].incoming)
      if (flows_[f].source != split && !inside.count(flows_[f].source))
        report("unstructured-parallel", "flow '" + flows_[f].id + "' enters parallel join '" + nodes_[join].id + "' from outside its block");
    matching_join_[split] = join;
    return join;
  };
  std::set<std::size_t> matched_joins;
  for (std::size_t i = 0; i < nodes_.size(); ++i)
    if (is_parallel_split(i))
      if (auto j = resolve(i)) matched_joins.insert(*j);
  for (std::size_t i = 0; i < nodes_.size(); ++i)
    if (is_parallel_join(i) && !matched_joins.count(i))
      report("unstructured-parallel", "parallel join '" + nodes_[i].id + "' has no matching split");

  // Annotations.
  const std::set<std::string> declared(declared_drivers.begin(), declared_drivers.end());
  std::map<std::string, std::vector<std::string>> by_label;
  for (const auto& n : nodes_) {
    if (n.kind != NodeKind::Task) {
      if (!n.drivers.empty()) report("annotation-on-non-task", "only tasks may carry cost drivers ('" + n.id + "')");
      continue;
    }
    std::set<std::string> seen;
    for (const auto& d : n.drivers) {
      if (!seen.insert(d).second) report("duplicate-annotation", "task '" + n.name + "' lists driver '" + d + "' twice");
      if (!declared.empty() && !declared.count(d))
        report("undeclared-driver", "task '" + n.name + "' references undeclared driver '" + d + "'");
    }
    auto [it, inserted] = by_label.emplace(n.name, n.drivers);
    if (!inserted && std::set<std::string>(it->second.begin(), it->second.end()) != seen)
      report("inconsistent-annotation", "tasks named '" + n.name + "' carry different cost driver sets");
  }

  structural_ = diags;
  finalized_ = true;
  return diags;
}

namespace {

bool is_bpmn(const xml::Element& e) { return e.ns == kBpmnNamespace; }
bool is_sopa(const xml::Element& e) { return e.ns == kSopaNamespace; }

const std::set<std::string, std::less<>> kTaskElements = {
    "task", "userTask", "manualTask", "serviceTask", "sendTask", "receiveTask", "scriptTask", "businessRuleTask"};

std::optional<ExactDecimal> parse_probability(const std::string& text, const xml::Element& e, const std::string& src) {
  try {
    return ExactDecimal::parse(text);
  } catch (const Error& err) {
    throw ParseError("probability: " + err.message(), {src, e.line, e.local});
  }
}

// Collects sopa extension content of a flow node or sequence flow.
void read_extensions(const xml::Element& owner, const std::string& src, std::vector<std::string>* drivers,
                     std::optional<ExactDecimal>* probability) {
  for (const auto& child : owner.children) {
    if (!(is_bpmn(child) && child.local == "extensionElements")) continue;
    for (const auto& ext : child.children) {
      if (!is_sopa(ext)) continue;
      if (ext.local == "costDriver") {
        if (!drivers) throw ParseError("cost drivers may only annotate tasks", {src, ext.line, ext.local});
        drivers->push_back(ext.required_attr("id", src));
      } else if (ext.local == "probability") {
        if (!probability) throw ParseError("probabilities may only annotate sequence flows", {src, ext.line, ext.local});
        *probability = parse_probability(ext.required_attr("value", src), ext, src);
      } else {
        throw ParseError("unsupported sopa extension <" + ext.local + ">", {src, ext.line, ext.local});
      }
    }
  }
}

void check_node_children(const xml::Element& e, const std::string& src) {
  for (const auto& child : e.children) {
    if (!is_bpmn(child)) continue;
    if (child.local == "incoming" || child.local == "outgoing" || child.local == "documentation" ||
        child.local == "extensionElements")
      continue;
    throw ParseError("unsupported BPMN element <" + child.local + "> inside <" + e.local + ">", {src, child.line, child.local});
  }
}

void read_process(const xml::Element& process, ProcessModel& model, const std::string& src) {
  struct PendingFlow {
    std::string id, source, target;
    std::optional<ExactDecimal> probability;
    long line;
  };
  std::vector<PendingFlow> flows;
  for (const auto& e : process.children) {
    if (is_sopa(e)) throw ParseError("sopa extensions belong inside <extensionElements>", {src, e.line, e.local});
    if (!is_bpmn(e)) continue;
    const std::string& tag = e.local;
    if (tag == "documentation" || tag == "laneSet" || tag == "textAnnotation" || tag == "association") continue;
    if (tag == "extensionElements") {
      for (const auto& ext : e.children) {
        if (!is_sopa(ext)) continue;
        if (ext.local != "declareDriver")
          throw ParseError("unsupported sopa extension <" + ext.local + "> on <process>", {src, ext.line, ext.local});
        model.declared_drivers.push_back(ext.required_attr("id", src));
      }
      continue;
    }
    if (tag == "sequenceFlow") {
      PendingFlow f{e.required_attr("id", src), e.required_attr("sourceRef", src), e.required_attr("targetRef", src), {}, e.line};
      if (auto p = e.attr(kSopaNamespace, "probability")) f.probability = parse_probability(*p, e, src);
      read_extensions(e, src, nullptr, &f.probability);
      flows.push_back(std::move(f));
      continue;
    }
    Node node;
    node.id = e.required_attr("id", src);
    node.name = e.attr("name").value_or("");
    node.line = e.line;
    if (tag == "startEvent") {
      node.kind = NodeKind::Start;
    } else if (tag == "endEvent") {
      node.kind = NodeKind::End;
      const std::string outcome = e.attr(kSopaNamespace, "outcome").value_or("completed");
      if (outcome == "completed") node.outcome = EndOutcome::Completed;
      else if (outcome == "failed") node.outcome = EndOutcome::Failed;
      else if (outcome == "cancelled") node.outcome = EndOutcome::Cancelled;
      else throw ParseError("end event outcome must be completed|failed|cancelled, got '" + outcome + "'", {src, e.line, tag});
    } else if (kTaskElements.count(tag)) {
      node.kind = NodeKind::Task;
      if (node.name.empty()) throw ParseError("task '" + node.id + "' has no name", {src, e.line, tag});
    } else if (tag == "exclusiveGateway") {
      node.kind = NodeKind::ExclusiveGateway;
    } else if (tag == "parallelGateway") {
      node.kind = NodeKind::ParallelGateway;
    } else {
      throw ParseError("unsupported BPMN element <" + tag + ">", {src, e.line, tag});
    }
    check_node_children(e, src);
    read_extensions(e, src, node.kind == NodeKind::Task ? &node.drivers : nullptr, nullptr);
    try {
      model.add_node(std::move(node));
    } catch (const Error& err) {
      throw ValidationError(err.message(), {src, e.line, tag});
    }
  }
  for (auto& f : flows) {
    try {
      const auto idx = model.add_flow(f.id, f.source, f.target, std::move(f.probability));
      model.flow(idx).line = f.line;
    } catch (const Error& err) {
      throw ValidationError(err.message(), {src, f.line, "sequenceFlow"});
    }
  }
}

void throw_if_diagnostics(const std::vector<Diagnostic>& diags, const std::string& src) {
  if (diags.empty()) return;
  std::string msg = "invalid process model: " + diags.front().message;
  if (diags.size() > 1) msg += " (and " + std::to_string(diags.size() - 1) + " more)";
  throw ValidationError(msg, {src, 0, {}});
}

}  // namespace

void apply_sidecar(ProcessModel& model, std::string_view sidecar, std::string_view source) {
  const std::string src(source);
  const xml::Element root = xml::parse(sidecar, source);
  if (root.local != "sopaAnnotations")
    throw ParseError("sidecar root must be <sopaAnnotations>, found <" + root.local + ">", {src, root.line, root.local});
  for (const auto& e : root.children) {
    if (e.local == "task") {
      const std::string name = e.required_attr("name", src);
      std::vector<std::string> drivers;
      for (const auto& d : e.children) {
        if (d.local != "costDriver") throw ParseError("unexpected <" + d.local + "> in sidecar <task>", {src, d.line, d.local});
        drivers.push_back(d.required_attr("id", src));
      }
      bool found = false;
      for (std::size_t i = 0; i < model.nodes().size(); ++i)
        if (model.nodes()[i].kind == NodeKind::Task && model.nodes()[i].name == name) {
          model.node(i).drivers = drivers;
          found = true;
        }
      if (!found) throw ValidationError("sidecar annotates unknown task '" + name + "'", {src, e.line, e.local});
    } else if (e.local == "flow") {
      const std::string id = e.required_attr("id", src);
      auto f = model.find_flow(id);
      if (!f) throw ValidationError("sidecar references unknown sequence flow '" + id + "'", {src, e.line, e.local});
      model.flow(*f).probability = parse_probability(e.required_attr("probability", src), e, src);
    } else if (e.local == "declareDriver") {
      model.declared_drivers.push_back(e.required_attr("id", src));
    } else {
      throw ParseError("unexpected <" + e.local + "> in <sopaAnnotations>", {src, e.line, e.local});
    }
  }
  throw_if_diagnostics(model.finalize(), src);
}

ProcessModel parse_model(std::string_view bpmn_xml, std::string_view sidecar, std::string_view source,
                         std::string_view sidecar_source) {
  const std::string src(source);
  const xml::Element root = xml::parse(bpmn_xml, source);
  if (!(is_bpmn(root) && root.local == "definitions"))
    throw ParseError("root element must be BPMN <definitions>, found <" + root.local + ">", {src, root.line, root.local});

  ProcessModel model;
  bool have_process = false;
  for (const auto& e : root.children) {
    if (!is_bpmn(e)) continue;  // diagram interchange and foreign extensions
    if (e.local == "process") {
      const bool has_flow_nodes = std::any_of(e.children.begin(), e.children.end(), [](const xml::Element& c) {
        return is_bpmn(c) && c.local != "documentation" && c.local != "laneSet" && c.local != "extensionElements";
      });
      if (!has_flow_nodes) continue;  // empty pool
      if (have_process) throw ParseError("only one executable process per model is supported", {src, e.line, e.local});
      have_process = true;
      read_process(e, model, src);
    } else if (e.local == "collaboration") {
      for (const auto& c : e.children)
        if (is_bpmn(c) && c.local != "participant" && c.local != "documentation" && c.local != "textAnnotation" &&
            c.local != "association")
          throw ParseError("unsupported BPMN element <" + c.local + "> in <collaboration>", {src, c.line, c.local});
    } else if (e.local == "documentation" || e.local == "extensionElements") {
      continue;
    } else {
      throw ParseError("unsupported BPMN element <" + e.local + ">", {src, e.line, e.local});
    }
  }
  if (!have_process) throw ParseError("model contains no process with flow elements", {src, root.line, root.local});
  if (sidecar.empty()) {
    throw_if_diagnostics(model.finalize(), src);
  } else {
    apply_sidecar(model, sidecar, sidecar_source);
  }
  return model;
}

std::vector<Diagnostic> validate(const ProcessModel& model, const CostVariantConfig& config) {
  std::vector<Diagnostic> diags = model.structural_diagnostics();

  std::set<std::pair<std::string, std::string>> reported;
  for (const auto& n : model.nodes()) {
    if (n.kind != NodeKind::Task) continue;
    for (const auto& d : n.drivers)
      for (const auto& v : config.variants)
        if (!v.find_cost(d) && reported.insert({d, v.id}).second)
          diags.push_back({"driver-not-concretized", "task '" + n.name + "' annotates driver '" + d +
                                                         "' which variant '" + v.id + "' does not concretize"});
  }
  if (config.variants.empty()) diags.push_back({"no-variants", "cost variant config declares no variants"});

  // Loop termination: every node reachable through positive-probability
  // flows must be able to reach an end event through such flows.
  const auto& nodes = model.nodes();
  const auto& flows = model.flows();
  auto live = [&](std::size_t f) { return !flows[f].probability || !flows[f].probability->is_zero(); };
  if (!nodes.empty() && model.structural_diagnostics().empty()) {
    std::vector<bool> reach(nodes.size(), false), exits(nodes.size(), false);
    std::vector<std::size_t> stack{model.start()};
    reach[model.start()] = true;
    while (!stack.empty()) {
      auto n = stack.back();
      stack.pop_back();
      for (auto f : nodes[n].outgoing)
        if (live(f) && !reach[flows[f].target]) {
          reach[flows[f].target] = true;
          stack.push_back(flows[f].target);
        }
    }
    for (std::size_t i = 0; i < nodes.size(); ++i)
      if (nodes[i].kind == NodeKind::End) {
        exits[i] = true;
        stack.push_back(i);
      }
    while (!stack.empty()) {
      auto n = stack.back();
      stack.pop_back();
      for (auto f : nodes[n].incoming)
        if (live(f) && !exits[flows[f].source]) {
          exits[flows[f].source] = true;
          stack.push_back(flows[f].source);
        }
    }
    for (std::size_t i = 0; i < nodes.size(); ++i)
      if (reach[i] && !exits[i])
        diags.push_back({"loop-cannot-terminate", "loop cannot terminate: " + std::string(to_string(nodes[i].kind)) + " '" +
                                                      (nodes[i].name.empty() ? nodes[i].id : nodes[i].name) +
                                                      "' has no reachable end event"});
  }
  return diags;
}

}  // namespace sopa
