#pragma once

#include <stdexcept>
#include <string>

namespace sopa {

// Location of a problem inside an input document. Empty fields are omitted
// when the error is rendered.
struct SourceContext {
  std::string file;
  long line = 0;
  std::string element;
};

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& message, SourceContext ctx = {})
      : std::runtime_error(render(message, ctx)), message_(message), ctx_(std::move(ctx)) {}

  const std::string& message() const { return message_; }
  const SourceContext& context() const { return ctx_; }

 private:
  static std::string render(const std::string& message, const SourceContext& ctx) {
    std::string out;
    if (!ctx.file.empty()) out += ctx.file + ":";
    if (ctx.line > 0) out += std::to_string(ctx.line) + ":";
    if (!ctx.element.empty()) out += " <" + ctx.element + ">:";
    if (!out.empty()) out += " ";
    return out + message;
  }

  std::string message_;
  SourceContext ctx_;
};

// Malformed input document (XML syntax, grammar, attribute values).
class ParseError : public Error {
 public:
  using Error::Error;
};

// Input was well-formed but violates a semantic rule.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Simulation could not complete a trace.
class SimulationError : public Error {
 public:
  using Error::Error;
};

// Costing could not resolve a driver or variant.
class CostingError : public Error {
 public:
  using Error::Error;
};

}  // namespace sopa
