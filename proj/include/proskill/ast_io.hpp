#pragma once

#include <string>

#include <json.hpp>

#include "proskill/ast.hpp"

namespace proskill::ast {

/// Canonical JSON view of a program (keys sorted, source order kept for lists).
nlohmann::json to_json(const SkillProgram& prog);

/// Renders the program back to ProSkill source. Re-parsing the output yields
/// a structurally equal program.
std::string pretty_print(const SkillProgram& prog);

/// FNV-1a of the canonical JSON view without source locations, as 16 hex digits.
std::string program_hash(const SkillProgram& prog);

/// Shortest decimal spelling that reads back to the same double.
std::string format_number(double v);

}  // namespace proskill::ast
