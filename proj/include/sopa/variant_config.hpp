#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sopa/core.hpp"
#include "sopa/decimal.hpp"

namespace sopa {

// A named, frequency-weighted concretization of abstract cost drivers.
struct CostVariant {
  std::string id;
  ExactDecimal frequency;
  // (abstract driver id, concrete cost) in document order.
  std::vector<std::pair<std::string, ExactDecimal>> driver_costs;

  const ExactDecimal* find_cost(const std::string& abstract_driver) const;
  friend bool operator==(const CostVariant&, const CostVariant&) = default;
};

struct CostVariantConfig {
  std::uint64_t count = 1;  // default instance count
  std::vector<CostVariant> variants;

  const CostVariant* find(const std::string& variant_id) const;
  friend bool operator==(const CostVariantConfig&, const CostVariantConfig&) = default;
};

struct VariantConfigOptions {
  // Accept frequency sums within 1e-9 of one and renormalize them exactly.
  bool tolerant_frequencies = false;
};

// Parses the <costVariantConfig> format. Throws ParseError for malformed
// documents and ValidationError for rule violations (frequency sum,
// duplicate ids, negative cost).
CostVariantConfig parse_variant_config(std::string_view xml, const VariantConfigOptions& options = {},
                                       std::string_view source = {});

// Canonical serialization; parse_variant_config(serialize(c)) == c.
std::string serialize_variant_config(const CostVariantConfig& config);

// Cost the variant assigns to an abstract driver. Throws CostingError for
// an unknown variant or a driver the variant does not concretize.
ExactDecimal cost_function(const CostVariantConfig& config, const std::string& variant_id,
                           const std::string& abstract_driver_id);

// Concrete driver id used for the concretization of `abstract_id` by
// `variant_id`.
std::string concrete_driver_id(const std::string& variant_id, const std::string& abstract_id);

// Hierarchy with one concrete driver per (variant, abstract driver) pair.
CostDriverHierarchy hierarchy_from_config(const CostVariantConfig& config);

}  // namespace sopa
