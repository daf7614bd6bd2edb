#include "vsuspect/errors.hpp"

namespace vsuspect {

namespace {

std::string summarize(const std::vector<Diagnostic>& diagnostics) {
  if (diagnostics.empty()) return "validation failed";
  std::string out = diagnostics.front().path + ": " + diagnostics.front().message;
  if (diagnostics.size() > 1) {
    out += " (and " + std::to_string(diagnostics.size() - 1) + " more)";
  }
  return out;
}

}  // namespace

ValidationError::ValidationError(std::vector<Diagnostic> diagnostics)
    : std::runtime_error(summarize(diagnostics)), diagnostics_(std::move(diagnostics)) {}

ValidationError::ValidationError(std::string path, std::string message)
    : ValidationError(std::vector<Diagnostic>{{std::move(path), std::move(message)}}) {}

EngineError::EngineError(std::string code, std::string message, std::string field)
    : std::runtime_error(message), code_(std::move(code)), field_(std::move(field)) {}

}  // namespace vsuspect
