#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "proskill/ast.hpp"
#include "proskill/ir.hpp"
#include "proskill/sexpr.hpp"
#include "proskill/translator.hpp"

namespace proskill::check {

struct Property {
  enum class Kind { Reachable, Absent, DeadlockFree, LeadsToWithin };

  std::string name;
  Kind kind = Kind::Reachable;
  ir::Expr p;
  ir::Expr q;            // LeadsToWithin only
  ir::Value ticks = 0;   // LeadsToWithin only
  std::string text;      // source form of the predicates
  std::optional<bool> expect;
};

std::string to_string(Property::Kind k);

/// Predicates use the test syntax of skill bodies over network variables:
/// `(= var value)`, `(var value)`, `(< var n)`, `(and ..)`, `(or ..)`, `(not ..)`,
/// `t`, `nil` and `proc@state` atoms. `skill.status` and `skill.res` name the
/// fields of a skill record. Throws std::invalid_argument.
ir::Expr parse_predicate(const SExpr& e, const ir::ProcessNetwork& net);
ir::Expr parse_predicate(std::string_view text, const ir::ProcessNetwork& net);

/// One property per line: `name KIND expr [expr] [ticks] [expect TRUE|FALSE]`.
/// KIND is REACHABLE, ABSENT, DEADLOCK_FREE or LEADSTO; ticks take an optional
/// `s` suffix for seconds. Lines starting with '#' are comments.
std::vector<Property> parse_properties(std::string_view text, const ir::ProcessNetwork& net);

/// Default properties of a translated CHECK unit.
std::vector<Property> default_properties(const ast::SkillProgram& prog,
                                         const translate::TranslationUnit& unit);
/// Default properties of a hand-written network: deadlock freedom only.
std::vector<Property> default_properties(const ir::ProcessNetwork& net);

}  // namespace proskill::check
