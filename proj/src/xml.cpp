#include "sopa/xml.hpp"

#include <expat.h>

#include <memory>

#include "sopa/error.hpp"

namespace sopa::xml {
namespace {

constexpr char kSeparator = '|';

struct Builder {
  XML_Parser parser = nullptr;
  std::vector<Element*> stack;
  Element root;
  bool have_root = false;
  std::string error;
};

void split_name(const char* raw, std::string& ns, std::string& local) {
  std::string_view name(raw);
  if (auto pos = name.find(kSeparator); pos != std::string_view::npos) {
    ns = std::string(name.substr(0, pos));
    local = std::string(name.substr(pos + 1));
  } else {
    ns.clear();
    local = std::string(name);
  }
}

void XMLCALL on_start(void* data, const XML_Char* name, const XML_Char** atts) {
  auto* b = static_cast<Builder*>(data);
  Element e;
  split_name(name, e.ns, e.local);
  e.line = static_cast<long>(XML_GetCurrentLineNumber(b->parser));
  for (int i = 0; atts[i] != nullptr; i += 2) e.attributes.emplace_back(atts[i], atts[i + 1]);
  if (b->stack.empty()) {
    b->root = std::move(e);
    b->have_root = true;
    b->stack.push_back(&b->root);
  } else {
    auto& children = b->stack.back()->children;
    children.push_back(std::move(e));
    b->stack.push_back(&children.back());
  }
}

void XMLCALL on_end(void* data, const XML_Char*) {
  auto* b = static_cast<Builder*>(data);
  b->stack.pop_back();
}

void XMLCALL on_text(void* data, const XML_Char* s, int len) {
  auto* b = static_cast<Builder*>(data);
  if (!b->stack.empty()) b->stack.back()->text.append(s, static_cast<std::size_t>(len));
}

void XMLCALL on_doctype(void* data, const XML_Char*, const XML_Char*, const XML_Char*, int) {
  auto* b = static_cast<Builder*>(data);
  b->error = "DOCTYPE declarations are not supported";
  XML_StopParser(b->parser, XML_FALSE);
}

}  // namespace

std::optional<std::string> Element::attr(std::string_view name) const {
  for (const auto& [k, v] : attributes)
    if (k == name) return v;
  return std::nullopt;
}

std::optional<std::string> Element::attr(std::string_view ns_uri, std::string_view name) const {
  std::string key = std::string(ns_uri) + kSeparator + std::string(name);
  return attr(key);
}

std::string Element::required_attr(std::string_view name, std::string_view source) const {
  if (auto v = attr(name)) return *v;
  throw ParseError("missing attribute '" + std::string(name) + "'", {std::string(source), line, local});
}

Element parse(std::string_view bytes, std::string_view source) {
  std::unique_ptr<std::remove_pointer_t<XML_Parser>, decltype(&XML_ParserFree)> parser(
      XML_ParserCreateNS("UTF-8", kSeparator), &XML_ParserFree);
  if (!parser) throw ParseError("cannot create XML parser");
  Builder b;
  b.parser = parser.get();
  XML_SetUserData(parser.get(), &b);
  XML_SetElementHandler(parser.get(), on_start, on_end);
  XML_SetCharacterDataHandler(parser.get(), on_text);
  XML_SetStartDoctypeDeclHandler(parser.get(), on_doctype);
  const auto status = XML_Parse(parser.get(), bytes.data(), static_cast<int>(bytes.size()), XML_TRUE);
  if (status != XML_STATUS_OK) {
    const long line = static_cast<long>(XML_GetCurrentLineNumber(parser.get()));
    std::string msg = !b.error.empty() ? b.error : std::string("malformed XML: ") + XML_ErrorString(XML_GetErrorCode(parser.get()));
    throw ParseError(msg, {std::string(source), line, {}});
  }
  if (!b.have_root) throw ParseError("empty XML document", {std::string(source), 0, {}});
  return std::move(b.root);
}

std::string escape(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      case '\n': out += "&#10;"; break;
      case '\t': out += "&#9;"; break;
      case '\r': out += "&#13;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace sopa::xml
