#include "sopa/variant_config.hpp"

#include <set>

#include "sopa/error.hpp"
#include "sopa/xml.hpp"

namespace sopa {

const ExactDecimal* CostVariant::find_cost(const std::string& abstract_driver) const {
  for (const auto& [id, cost] : driver_costs)
    if (id == abstract_driver) return &cost;
  return nullptr;
}

const CostVariant* CostVariantConfig::find(const std::string& variant_id) const {
  for (const auto& v : variants)
    if (v.id == variant_id) return &v;
  return nullptr;
}

namespace {

ExactDecimal decimal_attr(const xml::Element& e, std::string_view name, std::string_view source) {
  const std::string text = e.required_attr(name, source);
  try {
    return ExactDecimal::parse(text);
  } catch (const Error& err) {
    throw ParseError("attribute '" + std::string(name) + "': " + err.message(),
                     {std::string(source), e.line, e.local});
  }
}

}  // namespace

CostVariantConfig parse_variant_config(std::string_view xml_text, const VariantConfigOptions& options,
                                       std::string_view source) {
  const std::string src(source);
  const xml::Element root = xml::parse(xml_text, source);
  if (root.local != "costVariantConfig")
    throw ParseError("root element must be <costVariantConfig>, found <" + root.local + ">", {src, root.line, root.local});

  CostVariantConfig config;
  const std::string count_text = root.required_attr("count", source);
  {
    bool ok = !count_text.empty() && count_text.size() <= 18;
    for (char c : count_text) ok = ok && c >= '0' && c <= '9';
    if (!ok || std::stoull(count_text) == 0)
      throw ParseError("attribute 'count' must be a positive integer, got '" + count_text + "'", {src, root.line, root.local});
    config.count = std::stoull(count_text);
  }

  std::set<std::string> variant_ids;
  for (const auto& ve : root.children) {
    if (ve.local != "variant")
      throw ParseError("unexpected element <" + ve.local + "> in <costVariantConfig>", {src, ve.line, ve.local});
    CostVariant v;
    v.id = ve.required_attr("id", source);
    if (v.id.empty()) throw ValidationError("variant id must not be empty", {src, ve.line, ve.local});
    if (!variant_ids.insert(v.id).second)
      throw ValidationError("duplicate variant id '" + v.id + "'", {src, ve.line, ve.local});
    v.frequency = decimal_attr(ve, "frequency", source);
    if (v.frequency > ExactDecimal(1))
      throw ValidationError("variant '" + v.id + "' frequency " + v.frequency.to_string() + " exceeds 1",
                            {src, ve.line, ve.local});
    std::set<std::string> driver_ids;
    for (const auto& de : ve.children) {
      if (de.local != "driver")
        throw ParseError("unexpected element <" + de.local + "> in <variant>", {src, de.line, de.local});
      std::string id = de.required_attr("id", source);
      if (id.empty()) throw ValidationError("driver id must not be empty", {src, de.line, de.local});
      if (!driver_ids.insert(id).second)
        throw ValidationError("variant '" + v.id + "' lists driver '" + id + "' twice", {src, de.line, de.local});
      v.driver_costs.emplace_back(std::move(id), decimal_attr(de, "cost", source));
    }
    config.variants.push_back(std::move(v));
  }
  if (config.variants.empty()) throw ValidationError("cost variant config declares no variants", {src, root.line, root.local});

  ExactDecimal sum;
  for (const auto& v : config.variants) sum += v.frequency;
  if (sum != ExactDecimal(1)) {
    const mpq_class deviation = abs(sum.rational() - 1);
    const mpq_class tolerance(1, 1000000000);
    if (!options.tolerant_frequencies || deviation > tolerance)
      throw ValidationError("variant frequencies sum to " + sum.to_string() + ", expected 1", {src, root.line, root.local});
    for (auto& v : config.variants) v.frequency = v.frequency / sum;
  }
  return config;
}

std::string serialize_variant_config(const CostVariantConfig& config) {
  std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<costVariantConfig count=\"" + std::to_string(config.count) + "\">\n";
  for (const auto& v : config.variants) {
    out += "    <variant id=\"" + xml::escape(v.id) + "\" frequency=\"" + v.frequency.to_string() + "\">\n";
    for (const auto& [id, cost] : v.driver_costs)
      out += "        <driver id=\"" + xml::escape(id) + "\" cost=\"" + cost.to_string() + "\"/>\n";
    out += "    </variant>\n";
  }
  out += "</costVariantConfig>\n";
  return out;
}

ExactDecimal cost_function(const CostVariantConfig& config, const std::string& variant_id,
                           const std::string& abstract_driver_id) {
  const CostVariant* v = config.find(variant_id);
  if (!v) throw CostingError("unknown cost variant '" + variant_id + "'");
  const ExactDecimal* cost = v->find_cost(abstract_driver_id);
  if (!cost)
    throw CostingError("driver '" + abstract_driver_id + "' is not concretized by variant '" + variant_id + "'");
  return *cost;
}

std::string concrete_driver_id(const std::string& variant_id, const std::string& abstract_id) {
  return abstract_id + "@" + variant_id;
}

CostDriverHierarchy hierarchy_from_config(const CostVariantConfig& config) {
  CostDriverHierarchy h;
  for (const auto& v : config.variants)
    for (const auto& [abstract, cost] : v.driver_costs)
      h.add(AbstractCostDriver{abstract}, ConcreteCostDriver{concrete_driver_id(v.id, abstract), abstract, cost});
  return h;
}

}  // namespace sopa
