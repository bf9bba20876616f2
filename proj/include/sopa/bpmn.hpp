#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sopa/decimal.hpp"
#include "sopa/variant_config.hpp"

namespace sopa {

// Namespace of the cost-driver and simulation-parameter extension elements.
inline constexpr std::string_view kSopaNamespace = "urn:sopa:bpmn-extensions:1.0";
inline constexpr std::string_view kBpmnNamespace = "http://www.omg.org/spec/BPMN/20100524/MODEL";

enum class NodeKind { Start, End, Task, ExclusiveGateway, ParallelGateway };
enum class EndOutcome { Completed, Failed, Cancelled };

std::string_view to_string(NodeKind kind);
std::string_view to_string(EndOutcome outcome);

struct Node {
  std::string id;
  NodeKind kind = NodeKind::Task;
  std::string name;
  std::vector<std::string> drivers;  // abstract driver ids, tasks only
  EndOutcome outcome = EndOutcome::Completed;
  std::vector<std::size_t> incoming;  // flow indices
  std::vector<std::size_t> outgoing;  // flow indices
  long line = 0;
};

struct Flow {
  std::string id;
  std::size_t source = 0;
  std::size_t target = 0;
  std::optional<ExactDecimal> probability;  // exclusive-split flows only
  long line = 0;
};

struct Diagnostic {
  std::string code;
  std::string message;
  friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

// BPMN-subset process graph. Build it with add_node/add_flow or
// parse_model; call finalize() before using structural queries.
class ProcessModel {
 public:
  std::size_t add_node(Node node);
  std::size_t add_flow(const std::string& id, const std::string& source_id, const std::string& target_id,
                       std::optional<ExactDecimal> probability = std::nullopt);

  // Abstract drivers the model declares. When empty, any annotation is
  // accepted.
  std::vector<std::string> declared_drivers;

  // Computes gateway roles and parallel block structure. Returns the
  // structural problems found (empty when the model is well-formed).
  std::vector<Diagnostic> finalize();
  // Result of the last finalize().
  const std::vector<Diagnostic>& structural_diagnostics() const { return structural_; }

  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<Flow>& flows() const { return flows_; }
  Node& node(std::size_t i) { return nodes_.at(i); }
  Flow& flow(std::size_t i) { return flows_.at(i); }
  std::optional<std::size_t> find_node(std::string_view id) const;
  std::optional<std::size_t> find_flow(std::string_view id) const;
  std::size_t start() const { return start_; }

  bool is_exclusive_split(std::size_t n) const;
  bool is_parallel_split(std::size_t n) const;
  bool is_parallel_join(std::size_t n) const;
  // Matching join of a parallel split (valid after a clean finalize()).
  std::size_t matching_join(std::size_t split) const { return matching_join_.at(split); }

  std::vector<std::size_t> tasks() const;
  // Distinct abstract drivers annotated on any task, sorted.
  std::vector<std::string> annotated_drivers() const;

 private:
  std::vector<Node> nodes_;
  std::vector<Flow> flows_;
  std::map<std::string, std::size_t, std::less<>> node_index_;
  std::map<std::string, std::size_t, std::less<>> flow_index_;
  std::size_t start_ = 0;
  std::map<std::size_t, std::size_t> matching_join_;
  std::vector<Diagnostic> structural_;
  bool finalized_ = false;
};

// Parses BPMN 2.0 XML restricted to start/end events, tasks, exclusive and
// parallel gateways and sequence flows. `sidecar`, when non-empty, is an
// annotation document (<sopaAnnotations>) mapping task names to drivers and
// flow ids to probabilities; it overrides inline extension values.
// Throws ParseError (syntax, unsupported elements) or ValidationError
// (structural rules).
ProcessModel parse_model(std::string_view bpmn_xml, std::string_view sidecar = {},
                         std::string_view source = {}, std::string_view sidecar_source = {});

// Applies a sidecar document to an already parsed model and re-finalizes.
void apply_sidecar(ProcessModel& model, std::string_view sidecar, std::string_view source = {});

// Empty iff the model is structurally sound, every exclusive split's
// probabilities sum to one, every annotated driver is concretized by every
// variant, and every loop can reach an end event.
std::vector<Diagnostic> validate(const ProcessModel& model, const CostVariantConfig& config);

}  // namespace sopa
