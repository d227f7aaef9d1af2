#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace proskill {

struct SourceLoc {
  int line = 1;
  int column = 1;

  friend bool operator==(const SourceLoc&, const SourceLoc&) = default;
};

enum class Severity { Error, Warning };

struct Diagnostic {
  Severity severity = Severity::Error;
  SourceLoc loc;
  std::string message;
};

using Diagnostics = std::vector<Diagnostic>;

/// Renders `file:line:col: severity: message`.
std::string format_diagnostic(const Diagnostic& d, std::string_view file);

bool has_errors(const Diagnostics& diags);

/// Thrown by convenience entry points that cannot return diagnostics by value.
class DiagnosticError : public std::runtime_error {
 public:
  explicit DiagnosticError(Diagnostics diags);
  const Diagnostics& diagnostics() const noexcept { return diags_; }

 private:
  Diagnostics diags_;
};

}  // namespace proskill
