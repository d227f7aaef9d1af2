#include "proskill/diagnostic.hpp"

#include <algorithm>
#include <sstream>

namespace proskill {

std::string format_diagnostic(const Diagnostic& d, std::string_view file) {
  std::ostringstream out;
  out << file << ':' << d.loc.line << ':' << d.loc.column << ": "
      << (d.severity == Severity::Error ? "error" : "warning") << ": " << d.message;
  return out.str();
}

bool has_errors(const Diagnostics& diags) {
  return std::any_of(diags.begin(), diags.end(),
                     [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

namespace {
std::string summarize(const Diagnostics& diags) {
  if (diags.empty()) return "invalid program";
  std::string msg = format_diagnostic(diags.front(), "<input>");
  if (diags.size() > 1) msg += " (+" + std::to_string(diags.size() - 1) + " more)";
  return msg;
}
}  // namespace

DiagnosticError::DiagnosticError(Diagnostics diags)
    : std::runtime_error(summarize(diags)), diags_(std::move(diags)) {}

}  // namespace proskill
