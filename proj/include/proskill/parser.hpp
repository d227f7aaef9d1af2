#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "proskill/ast.hpp"
#include "proskill/diagnostic.hpp"

namespace proskill::ast {

struct ParseResult {
  std::optional<SkillProgram> program;
  Diagnostics diagnostics;

  bool ok() const { return program.has_value() && !has_errors(diagnostics); }
};

/// Surface syntax to AST. No name resolution happens here.
ParseResult parse_program(std::string_view source);

/// Name resolution, type checks, call graph, recursion and entry selection.
/// `entry` forces the entry composite when the program has several candidates.
ParseResult validate_program(SkillProgram program,
                             const std::optional<std::string>& entry = std::nullopt);

/// parse + validate; throws DiagnosticError on any error.
SkillProgram load_program(std::string_view source,
                          const std::optional<std::string>& entry = std::nullopt);

/// Reads a file and calls load_program; diagnostics are prefixed with the path.
SkillProgram load_program_file(const std::string& path,
                               const std::optional<std::string>& entry = std::nullopt);

}  // namespace proskill::ast
