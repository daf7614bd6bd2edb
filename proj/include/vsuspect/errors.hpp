#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace vsuspect {

/// One problem found in an input document. `path` is a JSON-pointer-like
/// location such as `/events/2/label`.
struct Diagnostic {
  std::string path;
  std::string message;
};

/// Raised when a document fails validation. Loaders collect every problem
/// they can find before throwing, so `diagnostics()` is never empty.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(std::vector<Diagnostic> diagnostics);
  ValidationError(std::string path, std::string message);

  const std::vector<Diagnostic>& diagnostics() const noexcept { return diagnostics_; }

 private:
  std::vector<Diagnostic> diagnostics_;
};

/// Invalid argument to an engine operation (unknown id, bad field value...).
/// `field` names the offending input field when there is one.
class EngineError : public std::runtime_error {
 public:
  EngineError(std::string code, std::string message, std::string field = {});

  const std::string& code() const noexcept { return code_; }
  const std::string& field() const noexcept { return field_; }

 private:
  std::string code_;
  std::string field_;
};

}  // namespace vsuspect
