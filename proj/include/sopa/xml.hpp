#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace sopa::xml {

// Namespace-resolved element tree with source line numbers. Attributes
// without a prefix keep their plain local name; prefixed ones are stored as
// "namespace-uri|local".
struct Element {
  std::string ns;     // namespace URI, empty if none
  std::string local;  // local name
  std::vector<std::pair<std::string, std::string>> attributes;
  std::vector<Element> children;
  std::string text;
  long line = 0;

  std::optional<std::string> attr(std::string_view name) const;
  std::optional<std::string> attr(std::string_view ns_uri, std::string_view name) const;
  // Throws ParseError naming the element and line.
  std::string required_attr(std::string_view name, std::string_view source = {}) const;
  std::string qualified() const { return ns.empty() ? local : "{" + ns + "}" + local; }
};

// Parses a complete document. DOCTYPE declarations are rejected. Throws
// ParseError with line context; `source` names the file in messages.
Element parse(std::string_view bytes, std::string_view source = {});

std::string escape(std::string_view text);

}  // namespace sopa::xml
